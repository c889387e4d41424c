#include "psde/angular.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "psde/montecarlo.hpp"

namespace psde {

std::size_t AngularDemoConfig::n_steps() const
{
    return static_cast<std::size_t>(std::llround(t_max / h));
}

namespace {

constexpr double pi = std::numbers::pi;

double wrap_angle(const Vec3& w)
{
    double a = std::atan2(w.y, w.x);
    if (a >= pi)
        a -= 2.0 * pi;
    return a;
}

}  // namespace

AngularDemoResult angular_demo(const AngularDemoConfig& config)
{
    if (!(config.h > 0) || !(config.t_max > 0))
        throw ConfigError("h", "h and t_max must be positive");
    if (config.bins < 1)
        throw ConfigError("bins", "must be at least 1");
    if (config.n_paths < 1)
        throw ConfigError("n_paths", "must be at least 1");

    ModelParams params;
    params.eps0 = config.eps0;
    params.e_min = 1.0;
    const double e = 10.0;  // irrelevant for constant eps
    const std::size_t n_steps = config.n_steps();
    NoiseOptions nopts;
    nopts.radial = config.scheme == Scheme::euler_naive
                   || config.scheme == Scheme::euler_renorm;

    AngularDemoResult res;
    res.final_norm.resize(config.n_paths);
    res.max_norm_dev.resize(config.n_paths);
    res.terminal_angle.resize(config.n_paths);

    const std::size_t nb = reduction_blocks(config.n_paths);
    std::vector<std::vector<double>> block_sum(nb, std::vector<double>(n_steps + 1, 0.0));
    const long nbl = static_cast<long>(nb);

#pragma omp parallel for schedule(dynamic, 1) num_threads(config.workers)
    for (long b = 0; b < nbl; ++b)
    {
        const std::uint64_t lo = config.n_paths * b / nb;
        const std::uint64_t hi = config.n_paths * (b + 1) / nb;
        auto& sums = block_sum[b];
        for (std::uint64_t i = lo; i < hi; ++i)
        {
            PathRng rng(config.seed, i);
            Direction omega({1.0, 0.0, 0.0}, 2);
            TangentFrame frame;
            double max_dev = 0.0;
            sums[0] += 1.0;
            for (std::size_t n = 0; n < n_steps; ++n)
            {
                const NoiseDraw nz = draw_noise(rng, config.h, config.h, 2, nopts);
                omega = step_angle(omega, frame, e, e, config.h, nz, config.scheme, params)
                            .omega;
                const double nrm = omega.norm();
                sums[n + 1] += nrm;
                max_dev = std::max(max_dev, std::abs(nrm - 1.0));
                if (i == 0)
                {
                    if (res.norm_path0.empty())
                        res.norm_path0.push_back(1.0);
                    res.norm_path0.push_back(nrm);
                }
            }
            res.final_norm[i] = omega.norm();
            res.max_norm_dev[i] = max_dev;
            res.terminal_angle[i] = wrap_angle(omega.vec());
        }
    }

    res.mean_norm.assign(n_steps + 1, 0.0);
    for (const auto& sums : block_sum)
        for (std::size_t n = 0; n <= n_steps; ++n)
            res.mean_norm[n] += sums[n];
    for (double& m : res.mean_norm)
        m /= static_cast<double>(config.n_paths);

    res.histogram.assign(config.bins, 0);
    for (double a : res.terminal_angle)
    {
        auto k = static_cast<long>((a + pi) / (2.0 * pi) * config.bins);
        k = std::clamp<long>(k, 0, config.bins - 1);
        ++res.histogram[k];
    }
    return res;
}

double ks_uniform_statistic(std::vector<double> angles)
{
    std::sort(angles.begin(), angles.end());
    const double n = static_cast<double>(angles.size());
    double d = 0.0;
    for (std::size_t i = 0; i < angles.size(); ++i)
    {
        const double f = (angles[i] + pi) / (2.0 * pi);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

double ks_critical(std::size_t n, double alpha)
{
    return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

}  // namespace psde
