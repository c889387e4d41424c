#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "psde/integrators.hpp"
#include "psde/model.hpp"
#include "psde/sensitivity.hpp"

namespace psde {

struct GridExtent
{
    double x_min{0.0};
    double x_max{4.0};
    double y_min{0.0};
    double y_max{4.0};
};

struct GridSpec
{
    int nx{200};
    int ny{50};
    GridExtent extent;

    double dx() const { return (extent.x_max - extent.x_min) / nx; }
    double dy() const { return (extent.y_max - extent.y_min) / ny; }
    double cell_area() const { return dx() * dy(); }
    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
    //! Row-major index (ix over x fastest within a y row); -1 outside.
    long index_of(double x, double y) const;
    double x_center(int ix) const { return extent.x_min + (ix + 0.5) * dx(); }
    double y_center(int iy) const { return extent.y_min + (iy + 0.5) * dy(); }
    std::size_t index(int ix, int iy) const
    {
        return static_cast<std::size_t>(iy) * nx + ix;
    }
};

enum class Kernel
{
    nearest,   //!< cell indicator / cell area
    gaussian,  //!< isotropic, bandwidth one cell width, truncated at 3 sigma
};

enum class DepositMode
{
    hard_tau,   //!< accumulate until the killing time
    mollified,  //!< weight by the smooth survival indicator
};

struct MollifierSpec
{
    double delta{0.5};
    double e_min{4.0};
};

double mollified_indicator(double e, const MollifierSpec& spec);
double mollified_indicator_de(double e, const MollifierSpec& spec);

/*!
 * Per-path scratch accumulator.
 *
 * Contributions of one path are summed here so that per-cell second moments
 * (and thus standard errors) are available after commit to a DoseGrid.
 */
class PathTally
{
  public:
    explicit PathTally(const GridSpec& spec);

    const GridSpec& spec() const { return spec_; }
    void add(std::size_t cell, double dose, const std::array<double, 3>& sens);
    //! Scatter a weight vector at position (x, y) through the kernel.
    void scatter(double x, double y, Kernel kernel, double dose,
                 const std::array<double, 3>& sens);

  private:
    friend class DoseGrid;

    GridSpec spec_;
    std::vector<double> dose_;
    std::array<std::vector<double>, 3> sens_;
    std::vector<std::size_t> touched_;
    std::vector<char> mark_;
};

//! Per-cell Monte Carlo sums over paths.
class DoseGrid
{
  public:
    DoseGrid() = default;
    explicit DoseGrid(const GridSpec& spec);

    const GridSpec& spec() const { return spec_; }
    std::uint64_t n_paths() const { return n_paths_; }

    //! Fold one finished path into the sums and clear the tally.
    void commit(PathTally& tally);
    //! Count a path that deposited nothing.
    void count_empty_path() { ++n_paths_; }
    void merge(const DoseGrid& other);

    double dose(std::size_t cell) const;
    double dose_se(std::size_t cell) const;
    double sens(Param theta, std::size_t cell) const;
    double sens_se(Param theta, std::size_t cell) const;

    std::vector<double> dose_field() const;
    std::vector<double> sens_field(Param theta) const;
    //! Dose summed over y (times dy), one value per x column.
    std::vector<double> depth_profile() const;

    // Raw sums, exposed for exact comparisons.
    const std::vector<double>& dose_sum() const { return dose_; }
    const std::vector<double>& sens_sum(Param theta) const;

  private:
    static double mean(double sum, std::uint64_t n);
    static double se(double sum, double sum_sq, std::uint64_t n);

    GridSpec spec_;
    std::vector<double> dose_, dose_sq_;
    std::array<std::vector<double>, 3> sens_, sens_sq_;
    std::uint64_t n_paths_{0};
};

//! How the per-step sensitivity weights are formed.
enum class SensEstimator
{
    none,
    no_straggling,  //!< kappa = 0: deterministic J plus boundary term at death
    mollified,      //!< full model with the smooth indicator
};

struct DepositSpec
{
    DepositMode mode{DepositMode::hard_tau};
    Kernel kernel{Kernel::nearest};
    SensEstimator estimator{SensEstimator::none};
    ParamSet sens;
    //! Centred on the physical e_min, which may differ from the transport
    //! kill threshold in mollified mode.
    MollifierSpec mollifier;
};

/*!
 * Left-endpoint rectangle contribution of one step.
 *
 * Dose weight h S(E) (times I(E) in mollified mode); sensitivity weights
 * h [(dS/dth + dS/dE J) I + S dI/dE J] with I = 1, dI/dE = 0 in hard_tau mode.
 * Dead states contribute nothing.
 */
void deposit_step(PathTally& tally, const ParticleState& state,
                  const SensitivityState& j, double h, const ModelParams& params,
                  const DepositSpec& spec);

//! Same, reusing coefficients at E_n. Returns false if the state was dead.
bool deposit_step(PathTally& tally, const ParticleState& state, const CoeffBundle& cb,
                  const SensitivityState& j, double h, const ModelParams& params,
                  const DepositSpec& spec);

//! Boundary term of the kappa = 0 estimator: S(E_min) dT/dtheta deposited at
//! the position where the path reached E_min.
void deposit_boundary(PathTally& tally, double x, double y, double e0,
                      const ModelParams& params, const DepositSpec& spec);

}  // namespace psde
