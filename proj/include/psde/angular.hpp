#pragma once

#include <cstdint>
#include <vector>

#include "psde/integrators.hpp"

namespace psde {

//! Pure angular diffusion on S^1 at constant eps0 (energy frozen).
struct AngularDemoConfig
{
    Scheme scheme{Scheme::geometric_euler};
    double eps0{0.1};
    double h{0.01};
    double t_max{5.0};
    std::uint64_t n_paths{10000};
    std::uint64_t seed{1};
    int bins{50};
    int workers{1};

    std::size_t n_steps() const;
};

struct AngularDemoResult
{
    std::vector<double> norm_path0;    //!< |Omega_n| of path 0, n = 0..N
    std::vector<double> mean_norm;     //!< mean |Omega_n| over paths
    std::vector<double> final_norm;    //!< |Omega_N| per path
    std::vector<double> max_norm_dev;  //!< max_n ||Omega_n| - 1| per path
    std::vector<double> terminal_angle;  //!< atan2 in [-pi, pi) per path
    std::vector<std::uint64_t> histogram;  //!< bins over [-pi, pi)
};

AngularDemoResult angular_demo(const AngularDemoConfig& config);

//! Kolmogorov-Smirnov statistic D of samples against uniform on [-pi, pi).
double ks_uniform_statistic(std::vector<double> angles);

//! Asymptotic critical value of D at significance level alpha.
double ks_critical(std::size_t n, double alpha);

}  // namespace psde
