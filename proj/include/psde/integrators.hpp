#pragma once

#include <limits>
#include <string_view>

#include "psde/model.hpp"
#include "psde/sphere.hpp"
#include "psde/vec3.hpp"

namespace psde {

enum class Scheme
{
    euler_naive,      //!< (1 - eps h) Omega + noise, no normalisation
    euler_renorm,     //!< naive Euler followed by projection to the sphere
    geometric_euler,  //!< log-Euler energy, exponential-map angle
    milstein_rkmk,    //!< log-Milstein energy, Lie-group rotation with Levy area
};

std::string_view to_string(Scheme scheme);
Scheme scheme_from_string(std::string_view name);

/*!
 * How the tangent frame for the angular noise is obtained at each step.
 *
 * transported: the frame is rotated along with Omega by the same rotation,
 *   so the Levy-area term (rotation about Omega) acts on the frame. This is
 *   what makes the rotation update strong order one.
 * polar: the frame is recomputed from the polar coordinates of Omega.
 */
enum class FrameMode
{
    transported,
    polar,
};

/*!
 * Increments for one step.
 *
 * dw1, dw2 and levy_a are drawn on the clock dgamma; step_angle rescales them
 * to the clock the scheme needs (2 eps h, or the trapezoid h (eps_n + eps_n+1)),
 * so draws may be made on a unit clock (dgamma = h) before E_{n+1} is known.
 * In two dimensions dw2 is the radial component used only by the Euler schemes.
 */
struct NoiseDraw
{
    double xi_e{0.0};
    double dw1{0.0};
    double dw2{0.0};
    double levy_a{0.0};
    double dgamma{0.0};
};

//! Axis-aligned closed domain; unbounded axes use +-infinity.
struct Box
{
    static constexpr double inf = std::numeric_limits<double>::infinity();

    Vec3 lo{-inf, -inf, -inf};
    Vec3 hi{inf, inf, inf};

    bool contains(const Vec3& x) const
    {
        return x.x >= lo.x && x.x <= hi.x && x.y >= lo.y && x.y <= hi.y
               && x.z >= lo.z && x.z <= hi.z;
    }
};

struct ParticleState
{
    Vec3 x;
    Direction omega;
    TangentFrame frame;  //!< used in dim 3 only
    double y{0.0};       //!< log-energy
    bool alive{true};
};

//! Numerical switches that are not part of the model.
struct StepOptions
{
    FrameMode frame_mode{FrameMode::transported};
    bool milstein_correction{true};  //!< false only for negative-control runs
};

//! Angular clock increment needed by a scheme over one step.
double angular_clock(double e, double e_next, double h, Scheme scheme,
                     const ModelParams& params);

double step_energy_euler(double y, double h, double xi_e, const ModelParams& params);
double step_energy_milstein(double y, double h, double xi_e, const ModelParams& params);

// Variants reusing coefficients already evaluated at E_n = exp(y).
double step_energy_euler(double y, const CoeffBundle& cb, double h, double xi_e);
double step_energy_milstein(double y, const CoeffBundle& cb, double h, double xi_e,
                            bool correction = true);

struct AngleUpdate
{
    Direction omega;
    TangentFrame frame;
};

AngleUpdate step_angle(const Direction& omega, const TangentFrame& frame, double e,
                       double e_next, double h, const NoiseDraw& noise, Scheme scheme,
                       const ModelParams& params, FrameMode mode = FrameMode::transported);

//! Convenience overload using the polar frame at omega (dim 3) and no frame output.
Direction step_angle(const Direction& omega, double e, double e_next, double h,
                     const NoiseDraw& noise, Scheme scheme, const ModelParams& params);

inline Vec3 step_position(const Vec3& x, const Direction& omega, double h)
{
    return x + h * omega.vec();
}

ParticleState apply_killing(ParticleState state, const Box& box,
                            const ModelParams& params);

//! One explicit step: position with pre-step Omega, then energy, then angle,
//! then killing.
ParticleState full_step(const ParticleState& state, const NoiseDraw& noise, double h,
                        Scheme scheme, const ModelParams& params, const Box& box,
                        const StepOptions& opts = {});

ParticleState full_step(const ParticleState& state, const CoeffBundle& cb,
                        const NoiseDraw& noise, double h, Scheme scheme,
                        const ModelParams& params, const Box& box,
                        const StepOptions& opts = {});

//! Initial state with the frame set up for the direction's dimension.
ParticleState make_state(const Vec3& x, const Direction& omega, double e);

}  // namespace psde
