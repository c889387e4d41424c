#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace psde {

//! Raised when a coefficient is requested outside its domain of definition.
class DomainError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

enum class AngularModel
{
    constant,  //!< eps(E) = eps0
    moliere,   //!< eps(E) = eps_bar / (E^2 + eps_c^2)
};

//! Parameters that the energy equation depends on (sensitivity targets).
enum class Param
{
    alpha,
    p,
    kappa,
};

inline constexpr Param all_params[] = {Param::alpha, Param::p, Param::kappa};

std::string_view to_string(Param theta);
std::string_view to_string(AngularModel model);
Param param_from_string(std::string_view name);
AngularModel angular_model_from_string(std::string_view name);

/*!
 * Physical and numerical constants of the transport model.
 *
 * Units: lengths and track-length "time" in cm, energies in MeV.
 */
struct ModelParams
{
    double alpha{0.0022};   //!< stopping-power scale [cm MeV^-p]
    double p{1.77};         //!< stopping-power exponent, in [1, 2]
    double kappa{0.0};      //!< straggling amplitude
    double eps0{0.005};     //!< constant angular diffusion [rad^2/cm]
    double eps_bar{19.3};   //!< Moliere scale [MeV^2 rad^2/cm]
    double eps_c{5.0};      //!< Moliere regulariser [MeV]
    double e_min{4.0};      //!< killing threshold [MeV]
    double delta{0.5};      //!< mollifier width [MeV]
    AngularModel angular_model{AngularModel::constant};

    //! Throws std::invalid_argument naming the first offending field.
    void validate() const;
};

//! Stopping power, diffusion and their energy derivatives at one energy.
struct CoeffBundle
{
    double s{0.0};           //!< S(E) [MeV/cm]
    double sqrt_t{0.0};      //!< sqrt(T(E)) [MeV/sqrt(cm)]
    double ds_de{0.0};       //!< dS/dE
    double dsqrt_t_de{0.0};  //!< d sqrt(T)/dE
    double eps{0.0};         //!< angular diffusion [rad^2/cm]
};

//! Parameter derivatives of the energy coefficients at one energy.
struct ParamDerivs
{
    double ds_dtheta{0.0};
    double dsqrt_t_dtheta{0.0};
    double d2sqrt_t_dtheta_de{0.0};
};

// Bragg-Kleeman stopping power S(E) = E^(1-p) / (p alpha).
double stopping_power(double e, const ModelParams& params);

// sqrt(T(E)) with T(E) = kappa S(E) E.
double straggling_sqrt(double e, const ModelParams& params);

double angular_eps(double e, const ModelParams& params);

//! All coefficients at energy e; requires e >= e_min.
CoeffBundle coeff_bundle(double e, const ModelParams& params);

//! Same as coeff_bundle but evaluated from log-energy y = ln E.
//! Skips the e_min check; callers guarantee the state is alive.
CoeffBundle coeff_bundle_log(double y, const ModelParams& params);

//! Second energy derivative of sqrt(T); needed by the Milstein sensitivity step.
double d2sqrt_t_de2(double e, const ModelParams& params);

/*!
 * Derivatives of S and sqrt(T) with respect to one model parameter, plus the
 * mixed derivative d^2 sqrt(T) / (d theta dE).
 *
 * theta = kappa needs kappa > 0 since d sqrt(T)/d kappa = sqrt(T) / (2 kappa).
 */
ParamDerivs param_derivs(double e, const ModelParams& params, Param theta);

// Unchecked variants reusing coefficients already evaluated at e.
ParamDerivs param_derivs(const CoeffBundle& cb, double e, const ModelParams& params,
                         Param theta);
double d2sqrt_t_de2(const CoeffBundle& cb, double e, const ModelParams& params);

//! Straggling amplitude reproducing a given range variance.
double calibrate_kappa(double var_r, const ModelParams& params, double e0);

//! Range variance kappa p alpha E0^(p+1) / (p+1); inverse of calibrate_kappa.
double range_variance(const ModelParams& params, double e0);

//! Deterministic track length alpha (E0^p - E_min^p) at which E reaches e_min.
double csda_range(double e0, const ModelParams& params);

}  // namespace psde
