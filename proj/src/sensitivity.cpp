#include "psde/sensitivity.hpp"

#include <cmath>
#include <stdexcept>

namespace psde {

double step_sens_component(double j, const CoeffBundle& cb, double d2sqrt_t_de2,
                           const ParamDerivs& d, double h, double xi_e, bool milstein)
{
    const double g = d.dsqrt_t_dtheta + cb.dsqrt_t_de * j;
    double next = j - (d.ds_dtheta + cb.ds_de * j) * h + g * xi_e;
    if (milstein)
    {
        const double dg_de = d.d2sqrt_t_dtheta_de + d2sqrt_t_de2 * j;
        next += 0.5 * (cb.dsqrt_t_de * g + cb.sqrt_t * dg_de) * (xi_e * xi_e - h);
    }
    return next;
}

SensitivityState step_sens(const SensitivityState& j, const CoeffBundle& cb, double e,
                           double h, double xi_e, const ModelParams& params,
                           ParamSet enabled, bool milstein)
{
    const double d2 = milstein ? d2sqrt_t_de2(cb, e, params) : 0.0;
    SensitivityState out = j;
    for (Param theta : all_params)
    {
        if (!enabled.contains(theta))
            continue;
        out[theta] = step_sens_component(j[theta], cb, d2,
                                         param_derivs(cb, e, params, theta), h, xi_e,
                                         milstein);
    }
    return out;
}

namespace {

SensitivityState step_all(const SensitivityState& j, double e, double h, double xi_e,
                          const ModelParams& params, ParamSet enabled, bool milstein)
{
    return step_sens(j, coeff_bundle(e, params), e, h, xi_e, params, enabled, milstein);
}

}  // namespace

SensitivityState step_sens_euler(const SensitivityState& j, double e, double h,
                                 double xi_e, const ModelParams& params, ParamSet enabled)
{
    return step_all(j, e, h, xi_e, params, enabled, false);
}

SensitivityState step_sens_milstein(const SensitivityState& j, double e, double h,
                                    double xi_e, const ModelParams& params,
                                    ParamSet enabled)
{
    return step_all(j, e, h, xi_e, params, enabled, true);
}

namespace {

// Remaining E^p at time t; throws past the critical time alpha E0^p.
double remaining(double t, const ModelParams& params, double e0)
{
    const double u = std::pow(e0, params.p) - t / params.alpha;
    if (!(t >= 0) || !(u > 0))
        throw DomainError("deterministic energy undefined at t = " + std::to_string(t));
    return u;
}

}  // namespace

double det_energy(double t, const ModelParams& params, double e0)
{
    if (t == 0.0)
        return e0;
    return std::pow(remaining(t, params, e0), 1.0 / params.p);
}

StoppingTimeSens det_stopping_time_sens(const ModelParams& params, double e0)
{
    const double p = params.p;
    const double e0p = std::pow(e0, p);
    const double eminp = std::pow(params.e_min, p);
    return {e0p - eminp,
            params.alpha * (std::log(e0) * e0p - std::log(params.e_min) * eminp)};
}

double det_energy_sens(double t, const ModelParams& params, double e0, Param theta)
{
    const double p = params.p;
    const double u = remaining(t, params, e0);
    if (t == 0.0 && theta != Param::kappa)
        return 0.0;
    switch (theta)
    {
        case Param::alpha:
            return t / (params.alpha * params.alpha * p) * std::pow(u, 1.0 / p - 1.0);
        case Param::p: {
            const double e0p = std::pow(e0, p);
            return e0p * std::log(e0) / p * std::pow(u, 1.0 / p - 1.0)
                   - std::log(u) * std::pow(u, 1.0 / p) / (p * p);
        }
        case Param::kappa: break;
    }
    throw std::invalid_argument("det_energy_sens: kappa has no deterministic sensitivity");
}

double det_energy_sens_at(double e, const ModelParams& params, double e0, Param theta)
{
    if (!(e > 0) || !(e <= e0))
        throw DomainError("det_energy_sens_at: energy must lie in (0, e0]");
    const double p = params.p;
    const double e0p = std::pow(e0, p);
    const double ep = std::pow(e, p);
    switch (theta)
    {
        case Param::alpha: return (e0p - ep) / (params.alpha * p) * e / ep;
        case Param::p: return (e0p * std::log(e0) - ep * std::log(e)) / p * e / ep;
        case Param::kappa: break;
    }
    throw std::invalid_argument("det_energy_sens_at: kappa has no deterministic sensitivity");
}

}  // namespace psde
