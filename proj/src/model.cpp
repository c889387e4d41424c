#include "psde/model.hpp"

#include <cmath>

namespace psde {

namespace {

void require(bool ok, const char* field, const char* what)
{
    if (!ok)
        throw std::invalid_argument(std::string(field) + ": " + what);
}

void check_positive(double e)
{
    if (!(e > 0))
        throw DomainError("energy must be positive, got " + std::to_string(e));
}

void check_energy(double e, const ModelParams& params)
{
    if (!(e >= params.e_min))
        throw DomainError("energy " + std::to_string(e) + " below e_min "
                          + std::to_string(params.e_min));
}

// sqrt(kappa / (p alpha)), the prefactor of sqrt(T) = c E^(1 - p/2).
double straggling_prefactor(const ModelParams& params)
{
    return std::sqrt(params.kappa / (params.p * params.alpha));
}

}  // namespace

std::string_view to_string(Param theta)
{
    switch (theta)
    {
        case Param::alpha: return "alpha";
        case Param::p: return "p";
        case Param::kappa: return "kappa";
    }
    return "?";
}

std::string_view to_string(AngularModel model)
{
    return model == AngularModel::constant ? "constant" : "moliere";
}

Param param_from_string(std::string_view name)
{
    if (name == "alpha")
        return Param::alpha;
    if (name == "p")
        return Param::p;
    if (name == "kappa")
        return Param::kappa;
    throw std::invalid_argument("unknown parameter '" + std::string(name) + "'");
}

AngularModel angular_model_from_string(std::string_view name)
{
    if (name == "constant")
        return AngularModel::constant;
    if (name == "moliere")
        return AngularModel::moliere;
    throw std::invalid_argument("angular_model: unknown value '" + std::string(name)
                                + "'");
}

void ModelParams::validate() const
{
    require(alpha > 0 && std::isfinite(alpha), "alpha", "must be positive");
    require(p >= 1.0 && p <= 2.0, "p", "must lie in [1, 2]");
    require(kappa >= 0 && std::isfinite(kappa), "kappa", "must be non-negative");
    require(eps0 >= 0 && std::isfinite(eps0), "eps0", "must be non-negative");
    require(eps_bar >= 0 && std::isfinite(eps_bar), "eps_bar", "must be non-negative");
    require(eps_c > 0 && std::isfinite(eps_c), "eps_c", "must be positive");
    require(e_min > 0 && std::isfinite(e_min), "e_min", "must be positive");
    require(delta > 0 && std::isfinite(delta), "delta", "must be positive");
}

double stopping_power(double e, const ModelParams& params)
{
    check_positive(e);
    return std::pow(e, 1.0 - params.p) / (params.p * params.alpha);
}

double straggling_sqrt(double e, const ModelParams& params)
{
    check_positive(e);
    return straggling_prefactor(params) * std::pow(e, 1.0 - 0.5 * params.p);
}

double angular_eps(double e, const ModelParams& params)
{
    if (!(e > 0))
        throw DomainError("angular_eps needs positive energy");
    if (params.angular_model == AngularModel::constant)
        return params.eps0;
    return params.eps_bar / (e * e + params.eps_c * params.eps_c);
}

CoeffBundle coeff_bundle_log(double y, const ModelParams& params)
{
    const double p = params.p;
    const double e = std::exp(y);
    const double e_half = std::exp(-0.5 * p * y);  // E^(-p/2)
    const double c = straggling_prefactor(params);

    CoeffBundle cb;
    cb.s = e * e_half * e_half / (p * params.alpha);
    cb.ds_de = (1.0 - p) * cb.s / e;
    cb.dsqrt_t_de = c * (1.0 - 0.5 * p) * e_half;
    cb.sqrt_t = c * e * e_half;
    cb.eps = angular_eps(e, params);
    return cb;
}

CoeffBundle coeff_bundle(double e, const ModelParams& params)
{
    check_energy(e, params);
    return coeff_bundle_log(std::log(e), params);
}

double d2sqrt_t_de2(double e, const ModelParams& params)
{
    check_energy(e, params);
    const double half_p = 0.5 * params.p;
    return -straggling_prefactor(params) * half_p * (1.0 - half_p)
           * std::pow(e, -half_p - 1.0);
}

ParamDerivs param_derivs(const CoeffBundle& cb, double e, const ModelParams& params,
                         Param theta)
{
    ParamDerivs d;
    switch (theta)
    {
        case Param::alpha:
            d.ds_dtheta = -cb.s / params.alpha;
            d.dsqrt_t_dtheta = -cb.sqrt_t / (2.0 * params.alpha);
            d.d2sqrt_t_dtheta_de = -cb.dsqrt_t_de / (2.0 * params.alpha);
            break;
        case Param::p: {
            const double log_e = std::log(e);
            d.ds_dtheta = -cb.s / params.p - log_e * cb.s;
            d.dsqrt_t_dtheta = -cb.sqrt_t / (2.0 * params.p) - 0.5 * log_e * cb.sqrt_t;
            d.d2sqrt_t_dtheta_de = -cb.dsqrt_t_de / (2.0 * params.p)
                                   - 0.5 * (cb.sqrt_t / e + log_e * cb.dsqrt_t_de);
            break;
        }
        case Param::kappa:
            if (!(params.kappa > 0))
                throw DomainError("kappa sensitivity is singular at kappa = 0");
            d.ds_dtheta = 0.0;
            d.dsqrt_t_dtheta = cb.sqrt_t / (2.0 * params.kappa);
            d.d2sqrt_t_dtheta_de = cb.dsqrt_t_de / (2.0 * params.kappa);
            break;
    }
    return d;
}

ParamDerivs param_derivs(double e, const ModelParams& params, Param theta)
{
    return param_derivs(coeff_bundle(e, params), e, params, theta);
}

double d2sqrt_t_de2(const CoeffBundle& cb, double e, const ModelParams& params)
{
    return -0.5 * params.p * cb.dsqrt_t_de / e;
}

double calibrate_kappa(double var_r, const ModelParams& params, double e0)
{
    if (!(var_r >= 0) || !(e0 > 0))
        throw std::invalid_argument("calibrate_kappa: need var_r >= 0 and e0 > 0");
    return (params.p + 1.0) * var_r
           / (params.p * params.alpha * std::pow(e0, params.p + 1.0));
}

double range_variance(const ModelParams& params, double e0)
{
    return params.kappa * params.p * params.alpha * std::pow(e0, params.p + 1.0)
           / (params.p + 1.0);
}

double csda_range(double e0, const ModelParams& params)
{
    if (e0 == params.e_min)
        return 0.0;
    if (!(e0 > params.e_min))
        throw DomainError("csda_range: e0 below e_min");
    return params.alpha * (std::pow(e0, params.p) - std::pow(params.e_min, params.p));
}

}  // namespace psde
