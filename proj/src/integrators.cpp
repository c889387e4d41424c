#include "psde/integrators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace psde {

std::string_view to_string(Scheme scheme)
{
    switch (scheme)
    {
        case Scheme::euler_naive: return "euler_naive";
        case Scheme::euler_renorm: return "euler_renorm";
        case Scheme::geometric_euler: return "geometric_euler";
        case Scheme::milstein_rkmk: return "milstein_rkmk";
    }
    return "?";
}

Scheme scheme_from_string(std::string_view name)
{
    for (Scheme s : {Scheme::euler_naive, Scheme::euler_renorm,
                     Scheme::geometric_euler, Scheme::milstein_rkmk})
    {
        if (to_string(s) == name)
            return s;
    }
    throw std::invalid_argument("scheme: unknown value '" + std::string(name) + "'");
}

double angular_clock(double e, double e_next, double h, Scheme scheme,
                     const ModelParams& params)
{
    if (scheme == Scheme::milstein_rkmk)
        return h * (angular_eps(e, params) + angular_eps(e_next, params));
    return 2.0 * angular_eps(e, params) * h;
}

// --- energy ---------------------------------------------------------------

double step_energy_euler(double y, const CoeffBundle& cb, double h, double xi_e)
{
    const double inv_e = std::exp(-y);
    const double t = cb.sqrt_t * cb.sqrt_t;
    return y - h * cb.s * inv_e - 0.5 * h * t * inv_e * inv_e
           + cb.sqrt_t * inv_e * xi_e;
}

double step_energy_milstein(double y, const CoeffBundle& cb, double h, double xi_e,
                            bool correction)
{
    double y_next = step_energy_euler(y, cb, h, xi_e);
    if (correction)
    {
        // b b' for b(Y) = sqrt(T(e^Y)) e^-Y
        const double inv_e = std::exp(-y);
        const double bb = cb.sqrt_t * cb.dsqrt_t_de * inv_e
                          - cb.sqrt_t * cb.sqrt_t * inv_e * inv_e;
        y_next += 0.5 * bb * (xi_e * xi_e - h);
    }
    return y_next;
}

double step_energy_euler(double y, double h, double xi_e, const ModelParams& params)
{
    return step_energy_euler(y, coeff_bundle(std::exp(y), params), h, xi_e);
}

double step_energy_milstein(double y, double h, double xi_e, const ModelParams& params)
{
    return step_energy_milstein(y, coeff_bundle(std::exp(y), params), h, xi_e);
}

// --- angle ----------------------------------------------------------------

namespace {

struct Scaled
{
    double dw1;
    double dw2;
    double a;
};

Scaled rescale(const NoiseDraw& noise, double clock)
{
    if (!(noise.dgamma > 0) || !(clock > 0))
        return {0.0, 0.0, 0.0};
    const double r = clock / noise.dgamma;
    const double s = std::sqrt(r);
    return {s * noise.dw1, s * noise.dw2, r * noise.levy_a};
}

Vec3 perp2(const Vec3& w) { return {-w.y, w.x, 0.0}; }

AngleUpdate euler_update(const Direction& omega, const TangentFrame& frame, double eps,
                         double h, const Scaled& dw, bool renorm)
{
    const int dim = omega.dim();
    const Vec3& w = omega.vec();
    Vec3 next;
    if (dim == 2)
    {
        // Ambient planar noise written in the (tangent, radial) basis.
        const double n = omega.norm();
        const Vec3 radial = (1.0 / n) * w;
        next = (1.0 - eps * h) * w + dw.dw1 * perp2(radial) + dw.dw2 * radial;
    }
    else
    {
        next = (1.0 - eps * h) * w + dw.dw1 * frame.u1 + dw.dw2 * frame.u2;
    }

    AngleUpdate out;
    out.omega = renorm ? Direction::normalized(next, dim)
                       : Direction::unnormalized(next, dim);
    if (dim == 3)
        out.frame = reorthonormalize(frame, Direction::normalized(next, dim));
    return out;
}

}  // namespace

AngleUpdate step_angle(const Direction& omega, const TangentFrame& frame, double e,
                       double e_next, double h, const NoiseDraw& noise, Scheme scheme,
                       const ModelParams& params, FrameMode mode)
{
    const double clock = angular_clock(e, e_next, h, scheme, params);
    const Scaled dw = rescale(noise, clock);
    const int dim = omega.dim();
    const TangentFrame f = (dim == 3 && mode == FrameMode::polar) ? frame_at(omega)
                                                                  : frame;

    switch (scheme)
    {
        case Scheme::euler_naive:
        case Scheme::euler_renorm:
            return euler_update(omega, f, angular_eps(e, params), h, dw,
                                scheme == Scheme::euler_renorm);
        case Scheme::geometric_euler:
        case Scheme::milstein_rkmk: {
            if (dim == 2)
                return {rotate_s1(omega, dw.dw1), f};
            // Both schemes rotate by the generator dw1 u1 + dw2 u2; the geometric
            // Euler step drops the Levy-area component and, since its generator
            // is tangent, is the geodesic along xi x Omega.
            const Vec3 gen = dw.dw1 * f.u1 + dw.dw2 * f.u2;
            AngleUpdate out;
            Vec3 xi;
            if (scheme == Scheme::geometric_euler)
            {
                xi = gen;
                out.omega = geodesic_exp(omega, cross(gen, omega.vec()));
            }
            else
            {
                xi = gen + dw.a * omega.vec();
                out.omega = rotation_exp(omega, xi);
            }
            TangentFrame g;
            g.u1 = rotate(f.u1, xi);
            g.u2 = rotate(f.u2, xi);
            out.frame = reorthonormalize(g, out.omega);
            return out;
        }
    }
    throw std::logic_error("step_angle: unhandled scheme");
}

Direction step_angle(const Direction& omega, double e, double e_next, double h,
                     const NoiseDraw& noise, Scheme scheme, const ModelParams& params)
{
    const TangentFrame f = omega.dim() == 3 ? frame_at(omega) : TangentFrame{};
    return step_angle(omega, f, e, e_next, h, noise, scheme, params, FrameMode::polar)
        .omega;
}

// --- full step ------------------------------------------------------------

ParticleState apply_killing(ParticleState state, const Box& box,
                            const ModelParams& params)
{
    if (!state.alive)
        return state;
    if (std::exp(state.y) <= params.e_min || !box.contains(state.x))
        state.alive = false;
    return state;
}

ParticleState full_step(const ParticleState& state, const CoeffBundle& cb,
                        const NoiseDraw& noise, double h, Scheme scheme,
                        const ModelParams& params, const Box& box,
                        const StepOptions& opts)
{
    if (!state.alive)
        return state;

    ParticleState next = state;
    next.x = step_position(state.x, state.omega, h);
    next.y = scheme == Scheme::milstein_rkmk
                 ? step_energy_milstein(state.y, cb, h, noise.xi_e,
                                        opts.milstein_correction)
                 : step_energy_euler(state.y, cb, h, noise.xi_e);

    const double e = std::exp(state.y);
    const double e_next = std::exp(next.y);
    AngleUpdate upd = step_angle(state.omega, state.frame, e, e_next, h, noise, scheme,
                                 params, opts.frame_mode);
    next.omega = upd.omega;
    next.frame = upd.frame;
    return apply_killing(next, box, params);
}

ParticleState full_step(const ParticleState& state, const NoiseDraw& noise, double h,
                        Scheme scheme, const ModelParams& params, const Box& box,
                        const StepOptions& opts)
{
    if (!state.alive)
        return state;
    return full_step(state, coeff_bundle(std::exp(state.y), params), noise, h, scheme,
                     params, box, opts);
}

ParticleState make_state(const Vec3& x, const Direction& omega, double e)
{
    ParticleState s;
    s.x = x;
    s.omega = omega;
    if (omega.dim() == 3)
        s.frame = frame_at(omega);
    s.y = std::log(e);
    s.alive = true;
    return s;
}

}  // namespace psde
