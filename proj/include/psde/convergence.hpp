#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "psde/integrators.hpp"
#include "psde/model.hpp"
#include "psde/montecarlo.hpp"
#include "psde/sensitivity.hpp"

namespace psde {

//! Setup of a strong-convergence experiment; defaults are the reference study.
struct ConvergenceSetup
{
    ModelParams params = default_params();
    double e0{62.0};
    Vec3 x0{0.0, 0.0, 0.0};
    Vec3 direction{1.0, 0.0, 0.0};
    int dim{3};
    double t_final{0.1};
    std::uint64_t seed{1};
    int levy_terms{10};
    StepOptions step;
    int workers{1};

    static ModelParams default_params()
    {
        ModelParams p;
        p.alpha = 0.022;
        p.p = 1.77;
        p.kappa = 0.075;
        p.eps0 = 1e-5;
        p.e_min = 1.0;  // far below anything reached by t_final
        return p;
    }
};

struct PathEnd
{
    ParticleState state;
    SensitivityState sens;
};

struct CoupledResult
{
    PathEnd coarse;
    PathEnd reference;
};

//! Sum consecutive increments into one, with the chained Levy area
//! A = sum A_k + 1/2 sum (W1_<k dW2_k - W2_<k dW1_k).
NoiseDraw aggregate_noise(std::span<const NoiseDraw> fine);

//! Fine increments for one path over [0, t_final] on step h_ref (unit clock).
std::vector<NoiseDraw> fine_noise(const ConvergenceSetup& setup, std::uint64_t index,
                                  double h_ref);

//! Run a single path with the given increments (each over h) from the setup's
//! initial state. Milstein schemes also propagate J with the Milstein step.
PathEnd run_path(const ConvergenceSetup& setup, std::span<const NoiseDraw> noise,
                 double h, Scheme scheme);

//! Coarse path at h_coarse and reference milstein_rkmk path at h_ref, both
//! driven by the same fine increments.
CoupledResult coupled_path(const ConvergenceSetup& setup, std::uint64_t index,
                           double h_coarse, double h_ref, Scheme scheme);

struct Slopes
{
    double e{0.0};
    double omega{0.0};
    double x{0.0};
    std::array<double, 3> j{};
};

struct StrongErrorReport
{
    Scheme scheme{Scheme::milstein_rkmk};
    std::vector<double> h_values;
    std::vector<double> err_e, err_omega, err_x;
    std::array<std::vector<double>, 3> err_j;
    Slopes slopes;
    std::uint64_t n_paths{0};
    double t_final{0.0};
    double h_ref{0.0};
    //! Errors of an m = 1 coupling (coarse step = h_ref); all zero when the
    //! coupling is exact. Not part of the fit.
    std::array<double, 6> self_test{};
};

StrongErrorReport strong_error_study(const ConvergenceSetup& setup, Scheme scheme,
                                     const std::vector<double>& h_values, double h_ref,
                                     std::uint64_t n_paths);

//! Least-squares slope of log(err) against log(h).
double fit_slope(std::span<const double> h, std::span<const double> err);

}  // namespace psde
