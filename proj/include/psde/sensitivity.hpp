#pragma once

#include "psde/model.hpp"

namespace psde {

//! J^theta = dE/dtheta carried along one path.
struct SensitivityState
{
    double j_alpha{0.0};
    double j_p{0.0};
    double j_kappa{0.0};

    double& operator[](Param theta)
    {
        return theta == Param::alpha ? j_alpha : theta == Param::p ? j_p : j_kappa;
    }
    double operator[](Param theta) const
    {
        return theta == Param::alpha ? j_alpha : theta == Param::p ? j_p : j_kappa;
    }
};

//! Which of the three sensitivities are propagated.
struct ParamSet
{
    bool alpha{false};
    bool p{false};
    bool kappa{false};

    bool contains(Param theta) const
    {
        return theta == Param::alpha ? alpha : theta == Param::p ? p : kappa;
    }
    void insert(Param theta)
    {
        (theta == Param::alpha ? alpha : theta == Param::p ? p : kappa) = true;
    }
    bool empty() const { return !alpha && !p && !kappa; }

    static ParamSet all() { return {true, true, true}; }
};

/*!
 * One linear update of a single J component.
 *
 * Euler: J - (dS/dth + dS/dE J) h + (dsqT/dth + dsqT/dE J) xi.
 * Milstein adds 1/2 d/dE[sqT (dsqT/dth + dsqT/dE J)] (xi^2 - h), J held fixed.
 */
double step_sens_component(double j, const CoeffBundle& cb, double d2sqrt_t_de2,
                           const ParamDerivs& d, double h, double xi_e, bool milstein);

//! Updates every enabled component; the rest are returned unchanged.
SensitivityState step_sens_euler(const SensitivityState& j, double e, double h,
                                 double xi_e, const ModelParams& params,
                                 ParamSet enabled = ParamSet::all());

SensitivityState step_sens_milstein(const SensitivityState& j, double e, double h,
                                    double xi_e, const ModelParams& params,
                                    ParamSet enabled = ParamSet::all());

//! Either variant, reusing coefficients already evaluated at e.
SensitivityState step_sens(const SensitivityState& j, const CoeffBundle& cb, double e,
                           double h, double xi_e, const ModelParams& params,
                           ParamSet enabled, bool milstein);

//! kappa = 0 energy E(t) = (E0^p - t/alpha)^(1/p).
double det_energy(double t, const ModelParams& params, double e0);

struct StoppingTimeSens
{
    double dT_dalpha{0.0};
    double dT_dp{0.0};
};

StoppingTimeSens det_stopping_time_sens(const ModelParams& params, double e0);

//! dE(t)/dtheta along the kappa = 0 path; theta is alpha or p.
double det_energy_sens(double t, const ModelParams& params, double e0, Param theta);

/*!
 * The same sensitivity expressed through the current deterministic energy e
 * (at the time where E(t) = e). Defined for every e in (0, e0], so it can be
 * evaluated along a discrete path that outlives the exact critical time.
 */
double det_energy_sens_at(double e, const ModelParams& params, double e0, Param theta);

}  // namespace psde
