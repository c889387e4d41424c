#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "psde/integrators.hpp"
#include "psde/model.hpp"
#include "psde/observables.hpp"
#include "psde/sensitivity.hpp"

namespace psde {

//! Invalid run configuration; carries the offending field name.
class ConfigError : public std::invalid_argument
{
  public:
    ConfigError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field))
    {
    }
    const std::string& field() const { return field_; }

  private:
    std::string field_;
};

struct BeamSpec
{
    double e0{62.0};
    double energy_spread_rel{0.01};
    Vec3 x0{0.0, 2.0, 0.0};
    double transverse_sigma{0.1};
    Vec3 direction{1.0, 0.0, 0.0};
};

struct RunConfig
{
    Scheme scheme{Scheme::milstein_rkmk};
    std::uint64_t n_paths{200000};
    double h{0.005};
    double t_max{0.0};  //!< 0 selects 1.5 csda_range, rounded up to whole steps
    std::uint64_t seed{1};
    int dim{2};
    BeamSpec beam;
    GridSpec grid;
    ModelParams params;
    ParamSet sens;
    int workers{1};
    DepositMode mode{DepositMode::hard_tau};
    Kernel kernel{Kernel::nearest};
    bool project_z{false};  //!< required to deposit dim-3 paths on the (x, y) grid
    int levy_terms{10};
    StepOptions step;
    bool trace_energy{false};

    //! Throws ConfigError naming the first invalid field.
    void validate() const;

    double resolved_t_max() const;
    std::size_t n_steps() const;
    SensEstimator estimator() const;
    DepositMode effective_mode() const;
    //! Spatial domain: the grid extent in (x, y), unbounded in z.
    Box domain() const;
    //! Parameters used for transport; differs from params only by a lowered
    //! kill threshold in mollified mode.
    ModelParams transport_params() const;
};

/*!
 * Independent, reproducible stream for one path.
 *
 * A 64-bit Mersenne Twister seeded through std::seed_seq from (seed, index),
 * so the sequence depends only on that pair and never on scheduling.
 */
class PathRng
{
  public:
    PathRng(std::uint64_t seed, std::uint64_t index);

    double normal() { return normal_(engine_); }
    double uniform() { return std::generate_canonical<double, 53>(engine_); }

  private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

inline PathRng path_rng(std::uint64_t seed, std::uint64_t index)
{
    return PathRng(seed, index);
}

struct NoiseOptions
{
    int levy_terms{10};
    bool levy{true};     //!< sample the Levy area (dim 3)
    bool radial{false};  //!< draw the radial component in dim 2
};

/*!
 * Energy increment ~ N(0, h) and angular increments ~ N(0, dgamma).
 *
 * The Levy area is sampled jointly with (dw1, dw2) from a truncated
 * Fourier series with a Gaussian approximation of the truncated tail.
 */
NoiseDraw draw_noise(PathRng& rng, double h, double dgamma, int dim,
                     const NoiseOptions& opts = {});

//! Levy area given the increments over a clock interval dgamma.
double sample_levy_area(PathRng& rng, double dw1, double dw2, double dgamma, int terms);

struct InitialState
{
    ParticleState state;
    SensitivityState sens;
};

//! Gaussian energy spread (rejection-truncated above e_min) and transverse offset.
InitialState sample_initial(const BeamSpec& beam, int dim, const ModelParams& params,
                            PathRng& rng);

//! Per-step sums over alive paths, for the mean-energy trace.
struct EnergyTrace
{
    std::vector<double> sum;
    std::vector<double> sum_sq;
    std::vector<std::uint64_t> count;

    void resize(std::size_t n);
    void add(std::size_t step, double e);
    void merge(const EnergyTrace& other);
    double mean(std::size_t step) const;
    double se(std::size_t step) const;
};

struct RunSummary
{
    std::uint64_t n_paths{0};
    std::uint64_t survived{0};        //!< alive at t_max
    double terminal_depth_sum{0.0};   //!< sum of final x coordinates
    std::uint64_t cemetery_violations{0};
    double wall_seconds{0.0};

    double survived_fraction() const;
    double mean_terminal_depth() const;
};

struct EnsembleResult
{
    DoseGrid grid;
    RunSummary summary;
    EnergyTrace trace;
};

//! OpenMP-parallel ensemble; bit-identical to the serial version for any
//! worker count.
EnsembleResult run_ensemble(const RunConfig& config);

//! Serial reference implementation.
EnsembleResult run_ensemble_serial(const RunConfig& config);

//! Number of fixed reduction blocks the paths are split into.
std::size_t reduction_blocks(std::uint64_t n_paths);

struct SensField
{
    std::vector<double> value;
    std::vector<double> se;
};

//! Pathwise sensitivity field of theta from an ensemble run.
SensField pathwise_field(const DoseGrid& grid, Param theta);

/*!
 * Central finite difference (D(theta + d) - D(theta - d)) / (2 d) per cell.
 * Branches use seeds (seed, seed + 1), or the same seed with common_noise.
 */
SensField fd_dose_sens(Param theta, double delta_theta, const RunConfig& config,
                       bool common_noise = false);

double get_param(const ModelParams& params, Param theta);
void set_param(ModelParams& params, Param theta, double value);

}  // namespace psde
