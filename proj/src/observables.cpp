#include "psde/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace psde {

long GridSpec::index_of(double x, double y) const
{
    if (!(x >= extent.x_min && x < extent.x_max && y >= extent.y_min
          && y < extent.y_max))
        return -1;
    int ix = static_cast<int>((x - extent.x_min) / dx());
    int iy = static_cast<int>((y - extent.y_min) / dy());
    if (ix >= nx)
        ix = nx - 1;
    if (iy >= ny)
        iy = ny - 1;
    return static_cast<long>(index(ix, iy));
}

double mollified_indicator(double e, const MollifierSpec& spec)
{
    return 0.5 * (1.0 + std::tanh((e - spec.e_min) / spec.delta));
}

double mollified_indicator_de(double e, const MollifierSpec& spec)
{
    const double c = std::cosh((e - spec.e_min) / spec.delta);
    return 1.0 / (2.0 * spec.delta * c * c);
}

// --- PathTally --------------------------------------------------------------

PathTally::PathTally(const GridSpec& spec)
    : spec_(spec), dose_(spec.size(), 0.0), mark_(spec.size(), 0)
{
    for (auto& s : sens_)
        s.assign(spec.size(), 0.0);
}

void PathTally::add(std::size_t cell, double dose, const std::array<double, 3>& sens)
{
    if (!mark_[cell])
    {
        mark_[cell] = 1;
        touched_.push_back(cell);
    }
    dose_[cell] += dose;
    for (int k = 0; k < 3; ++k)
        sens_[k][cell] += sens[k];
}

void PathTally::scatter(double x, double y, Kernel kernel, double dose,
                        const std::array<double, 3>& sens)
{
    const double inv_area = 1.0 / spec_.cell_area();
    if (kernel == Kernel::nearest)
    {
        const long cell = spec_.index_of(x, y);
        if (cell < 0)
            return;
        std::array<double, 3> s;
        for (int k = 0; k < 3; ++k)
            s[k] = sens[k] * inv_area;
        add(static_cast<std::size_t>(cell), dose * inv_area, s);
        return;
    }

    // Gaussian kernel with sigma = one cell width per axis, cut at 3 sigma.
    const double dx = spec_.dx();
    const double dy = spec_.dy();
    const double fx = (x - spec_.extent.x_min) / dx - 0.5;
    const double fy = (y - spec_.extent.y_min) / dy - 0.5;
    const int cx = static_cast<int>(std::lround(fx));
    const int cy = static_cast<int>(std::lround(fy));
    const double norm = 1.0 / (2.0 * std::numbers::pi * dx * dy);
    for (int iy = cy - 3; iy <= cy + 3; ++iy)
    {
        if (iy < 0 || iy >= spec_.ny)
            continue;
        const double gy = iy - fy;
        for (int ix = cx - 3; ix <= cx + 3; ++ix)
        {
            if (ix < 0 || ix >= spec_.nx)
                continue;
            const double gx = ix - fx;
            const double w = norm * std::exp(-0.5 * (gx * gx + gy * gy));
            std::array<double, 3> s;
            for (int k = 0; k < 3; ++k)
                s[k] = sens[k] * w;
            add(spec_.index(ix, iy), dose * w, s);
        }
    }
}

// --- DoseGrid ---------------------------------------------------------------

DoseGrid::DoseGrid(const GridSpec& spec)
    : spec_(spec), dose_(spec.size(), 0.0), dose_sq_(spec.size(), 0.0)
{
    for (int k = 0; k < 3; ++k)
    {
        sens_[k].assign(spec.size(), 0.0);
        sens_sq_[k].assign(spec.size(), 0.0);
    }
}

void DoseGrid::commit(PathTally& tally)
{
    for (std::size_t cell : tally.touched_)
    {
        const double d = tally.dose_[cell];
        dose_[cell] += d;
        dose_sq_[cell] += d * d;
        tally.dose_[cell] = 0.0;
        for (int k = 0; k < 3; ++k)
        {
            const double s = tally.sens_[k][cell];
            sens_[k][cell] += s;
            sens_sq_[k][cell] += s * s;
            tally.sens_[k][cell] = 0.0;
        }
        tally.mark_[cell] = 0;
    }
    tally.touched_.clear();
    ++n_paths_;
}

void DoseGrid::merge(const DoseGrid& other)
{
    if (other.spec_.nx != spec_.nx || other.spec_.ny != spec_.ny)
        throw std::invalid_argument("DoseGrid::merge: shape mismatch");
    for (std::size_t i = 0; i < dose_.size(); ++i)
    {
        dose_[i] += other.dose_[i];
        dose_sq_[i] += other.dose_sq_[i];
        for (int k = 0; k < 3; ++k)
        {
            sens_[k][i] += other.sens_[k][i];
            sens_sq_[k][i] += other.sens_sq_[k][i];
        }
    }
    n_paths_ += other.n_paths_;
}

double DoseGrid::mean(double sum, std::uint64_t n)
{
    return n ? sum / static_cast<double>(n) : 0.0;
}

double DoseGrid::se(double sum, double sum_sq, std::uint64_t n)
{
    if (n < 2)
        return 0.0;
    const double dn = static_cast<double>(n);
    const double m = sum / dn;
    const double var = std::max(0.0, (sum_sq / dn - m * m) * dn / (dn - 1.0));
    return std::sqrt(var / dn);
}

double DoseGrid::dose(std::size_t cell) const { return mean(dose_[cell], n_paths_); }

double DoseGrid::dose_se(std::size_t cell) const
{
    return se(dose_[cell], dose_sq_[cell], n_paths_);
}

double DoseGrid::sens(Param theta, std::size_t cell) const
{
    return mean(sens_[static_cast<int>(theta)][cell], n_paths_);
}

double DoseGrid::sens_se(Param theta, std::size_t cell) const
{
    const int k = static_cast<int>(theta);
    return se(sens_[k][cell], sens_sq_[k][cell], n_paths_);
}

const std::vector<double>& DoseGrid::sens_sum(Param theta) const
{
    return sens_[static_cast<int>(theta)];
}

std::vector<double> DoseGrid::dose_field() const
{
    std::vector<double> out(dose_.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = dose(i);
    return out;
}

std::vector<double> DoseGrid::sens_field(Param theta) const
{
    std::vector<double> out(dose_.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = sens(theta, i);
    return out;
}

std::vector<double> DoseGrid::depth_profile() const
{
    std::vector<double> out(spec_.nx, 0.0);
    for (int iy = 0; iy < spec_.ny; ++iy)
        for (int ix = 0; ix < spec_.nx; ++ix)
            out[ix] += dose(spec_.index(ix, iy)) * spec_.dy();
    return out;
}

// --- deposition ---------------------------------------------------------------

bool deposit_step(PathTally& tally, const ParticleState& state, const CoeffBundle& cb,
                  const SensitivityState& j, double h, const ModelParams& params,
                  const DepositSpec& spec)
{
    if (!state.alive)
        return false;

    const double e = std::exp(state.y);
    double ind = 1.0;
    double ind_de = 0.0;
    if (spec.mode == DepositMode::mollified)
    {
        ind = mollified_indicator(e, spec.mollifier);
        ind_de = mollified_indicator_de(e, spec.mollifier);
    }

    std::array<double, 3> sens{0.0, 0.0, 0.0};
    if (spec.estimator != SensEstimator::none)
    {
        for (Param theta : all_params)
        {
            if (!spec.sens.contains(theta))
                continue;
            // Only dS/dtheta is needed here; skip the kappa singularity check
            // since dS/dkappa = 0 identically.
            double ds_dtheta = 0.0;
            if (theta == Param::alpha)
                ds_dtheta = -cb.s / params.alpha;
            else if (theta == Param::p)
                ds_dtheta = -cb.s / params.p - state.y * cb.s;
            const double jt = j[theta];
            sens[static_cast<int>(theta)]
                = h * ((ds_dtheta + cb.ds_de * jt) * ind + cb.s * ind_de * jt);
        }
    }
    tally.scatter(state.x.x, state.x.y, spec.kernel, h * cb.s * ind, sens);
    return true;
}

void deposit_step(PathTally& tally, const ParticleState& state,
                  const SensitivityState& j, double h, const ModelParams& params,
                  const DepositSpec& spec)
{
    if (!state.alive)
        return;
    deposit_step(tally, state, coeff_bundle(std::exp(state.y), params), j, h, params,
                 spec);
}

void deposit_boundary(PathTally& tally, double x, double y, double e0,
                      const ModelParams& params, const DepositSpec& spec)
{
    const StoppingTimeSens dt = det_stopping_time_sens(params, e0);
    const double s_min = stopping_power(params.e_min, params);
    std::array<double, 3> sens{0.0, 0.0, 0.0};
    if (spec.sens.alpha)
        sens[0] = s_min * dt.dT_dalpha;
    if (spec.sens.p)
        sens[1] = s_min * dt.dT_dp;
    tally.scatter(x, y, spec.kernel, 0.0, sens);
}

}  // namespace psde
