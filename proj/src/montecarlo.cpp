#include "psde/montecarlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace psde {

// --- configuration ----------------------------------------------------------

namespace {

void require(bool ok, const char* field, const std::string& what)
{
    if (!ok)
        throw ConfigError(field, what);
}

}  // namespace

void RunConfig::validate() const
{
    try
    {
        params.validate();
    }
    catch (const std::invalid_argument& err)
    {
        const std::string msg = err.what();
        const auto colon = msg.find(':');
        throw ConfigError(msg.substr(0, colon),
                          colon == std::string::npos ? msg : msg.substr(colon + 2));
    }

    require(n_paths >= 1, "n_paths", "must be at least 1");
    require(h > 0 && std::isfinite(h), "h", "must be positive");
    require(t_max >= 0 && std::isfinite(t_max), "t_max", "must be non-negative");
    if (t_max > 0)
    {
        const double steps = t_max / h;
        require(std::abs(steps - std::round(steps)) <= 1e-9 * std::max(1.0, steps)
                    && std::round(steps) >= 1,
                "t_max", "must be a whole number of steps h");
    }
    require(dim == 2 || dim == 3, "dim", "must be 2 or 3");
    require(beam.e0 > params.e_min && std::isfinite(beam.e0), "e0",
            "must exceed e_min");
    require(beam.energy_spread_rel >= 0, "energy_spread_rel", "must be non-negative");
    require(beam.transverse_sigma >= 0, "transverse_sigma", "must be non-negative");
    require(norm(beam.direction) > 0, "direction", "must be non-zero");
    require(dim == 3 || (beam.direction.z == 0 && beam.x0.z == 0), "direction",
            "planar runs need z = 0");
    require(grid.nx >= 1, "nx", "must be at least 1");
    require(grid.ny >= 1, "ny", "must be at least 1");
    require(grid.extent.x_max > grid.extent.x_min
                && grid.extent.y_max > grid.extent.y_min,
            "extent", "must satisfy x_min < x_max and y_min < y_max");
    require(workers >= 1, "workers", "must be at least 1");
    require(levy_terms >= 1, "levy_terms", "must be at least 1");
    require(dim == 2 || project_z, "project_z",
            "three-dimensional runs deposit on the (x, y) grid only when enabled");
    if (!sens.empty())
    {
        require(params.angular_model == AngularModel::constant, "sens",
                "sensitivities need the constant angular model");
        require(!sens.kappa || params.kappa > 0, "sens",
                "kappa sensitivity needs kappa > 0");
    }
}

double RunConfig::resolved_t_max() const { return static_cast<double>(n_steps()) * h; }

std::size_t RunConfig::n_steps() const
{
    if (t_max > 0)
        return static_cast<std::size_t>(std::llround(t_max / h));
    const double range = csda_range(beam.e0 * (1.0 + 4.0 * beam.energy_spread_rel), params);
    return static_cast<std::size_t>(std::ceil(1.5 * range / h));
}

SensEstimator RunConfig::estimator() const
{
    if (sens.empty())
        return SensEstimator::none;
    if (params.kappa > 0 || mode == DepositMode::mollified)
        return SensEstimator::mollified;
    return SensEstimator::no_straggling;
}

DepositMode RunConfig::effective_mode() const
{
    return estimator() == SensEstimator::mollified ? DepositMode::mollified : mode;
}

Box RunConfig::domain() const
{
    Box b;
    b.lo = {grid.extent.x_min, grid.extent.y_min, -Box::inf};
    b.hi = {grid.extent.x_max, grid.extent.y_max, Box::inf};
    return b;
}

ModelParams RunConfig::transport_params() const
{
    ModelParams tp = params;
    if (effective_mode() == DepositMode::mollified)
    {
        // Follow paths until the indicator is negligible (I < 1e-5).
        tp.e_min = std::min(params.e_min,
                            std::max(params.e_min - 6.0 * params.delta, 0.05));
    }
    return tp;
}

// --- random numbers ---------------------------------------------------------

PathRng::PathRng(std::uint64_t seed, std::uint64_t index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32), 0x70736465u};
    engine_.seed(seq);
}

double sample_levy_area(PathRng& rng, double dw1, double dw2, double dgamma, int terms)
{
    if (!(dgamma > 0))
        return 0.0;
    const double sq = std::sqrt(dgamma);
    const double x1 = dw1 / sq;
    const double x2 = dw2 / sq;
    const double r2 = std::numbers::sqrt2;
    double sum = 0.0;
    double tail = std::numbers::pi * std::numbers::pi / 6.0;
    for (int k = 1; k <= terms; ++k)
    {
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        const double e1 = rng.normal();
        const double e2 = rng.normal();
        sum += (z1 * (r2 * x2 + e2) - z2 * (r2 * x1 + e1)) / k;
        tail -= 1.0 / (static_cast<double>(k) * k);
    }
    const double pi = std::numbers::pi;
    const double a = dgamma / (2.0 * pi) * sum;
    const double tail_var
        = dgamma * dgamma / (2.0 * pi * pi) * (1.0 + x1 * x1 + x2 * x2) * tail;
    return a + std::sqrt(tail_var) * rng.normal();
}

NoiseDraw draw_noise(PathRng& rng, double h, double dgamma, int dim,
                     const NoiseOptions& opts)
{
    NoiseDraw nd;
    nd.dgamma = dgamma;
    nd.xi_e = std::sqrt(h) * rng.normal();
    const double s = std::sqrt(std::max(dgamma, 0.0));
    nd.dw1 = s * rng.normal();
    if (dim == 3)
    {
        nd.dw2 = s * rng.normal();
        if (opts.levy)
            nd.levy_a = sample_levy_area(rng, nd.dw1, nd.dw2, dgamma, opts.levy_terms);
    }
    else if (opts.radial)
    {
        nd.dw2 = s * rng.normal();
    }
    return nd;
}

InitialState sample_initial(const BeamSpec& beam, int dim, const ModelParams& params,
                            PathRng& rng)
{
    const double sd = beam.energy_spread_rel * beam.e0;
    double e = beam.e0;
    do
    {
        e = beam.e0 + sd * rng.normal();
    } while (e <= params.e_min);

    const Direction d = Direction::normalized(beam.direction, dim);
    Vec3 x = beam.x0;
    if (dim == 2)
    {
        const Vec3 perp{-d.vec().y, d.vec().x, 0.0};
        x += beam.transverse_sigma * rng.normal() * perp;
    }
    else
    {
        const TangentFrame f = frame_at(d);
        const double a = rng.normal();
        const double b = rng.normal();
        x += beam.transverse_sigma * (a * f.u1 + b * f.u2);
    }
    return {make_state(x, d, e), SensitivityState{}};
}

// --- energy trace and summary -------------------------------------------------

void EnergyTrace::resize(std::size_t n)
{
    sum.assign(n, 0.0);
    sum_sq.assign(n, 0.0);
    count.assign(n, 0);
}

void EnergyTrace::add(std::size_t step, double e)
{
    sum[step] += e;
    sum_sq[step] += e * e;
    ++count[step];
}

void EnergyTrace::merge(const EnergyTrace& other)
{
    if (sum.size() < other.sum.size())
    {
        sum.resize(other.sum.size(), 0.0);
        sum_sq.resize(other.sum.size(), 0.0);
        count.resize(other.sum.size(), 0);
    }
    for (std::size_t i = 0; i < other.sum.size(); ++i)
    {
        sum[i] += other.sum[i];
        sum_sq[i] += other.sum_sq[i];
        count[i] += other.count[i];
    }
}

double EnergyTrace::mean(std::size_t step) const
{
    return count[step] ? sum[step] / static_cast<double>(count[step]) : 0.0;
}

double EnergyTrace::se(std::size_t step) const
{
    const double n = static_cast<double>(count[step]);
    if (n < 2)
        return 0.0;
    const double m = sum[step] / n;
    const double var = std::max(0.0, (sum_sq[step] / n - m * m) * n / (n - 1.0));
    return std::sqrt(var / n);
}

double RunSummary::survived_fraction() const
{
    return n_paths ? static_cast<double>(survived) / static_cast<double>(n_paths) : 0.0;
}

double RunSummary::mean_terminal_depth() const
{
    return n_paths ? terminal_depth_sum / static_cast<double>(n_paths) : 0.0;
}

// --- path kernel --------------------------------------------------------------

namespace {

struct Prepared
{
    ModelParams tp;
    Box box;
    DepositSpec dspec;
    NoiseOptions nopts;
    std::size_t n_steps{0};
    bool milstein{false};
};

Prepared prepare(const RunConfig& cfg)
{
    cfg.validate();
    Prepared p;
    p.tp = cfg.transport_params();
    p.box = cfg.domain();
    p.dspec.mode = cfg.effective_mode();
    p.dspec.kernel = cfg.kernel;
    p.dspec.estimator = cfg.estimator();
    p.dspec.sens = cfg.sens;
    p.dspec.mollifier = {cfg.params.delta, cfg.params.e_min};
    p.nopts.levy_terms = cfg.levy_terms;
    p.nopts.levy = cfg.scheme == Scheme::milstein_rkmk;
    p.nopts.radial = cfg.scheme == Scheme::euler_naive
                     || cfg.scheme == Scheme::euler_renorm;
    p.n_steps = cfg.n_steps();
    p.milstein = cfg.scheme == Scheme::milstein_rkmk && cfg.step.milstein_correction;
    return p;
}

struct Block
{
    DoseGrid grid;
    EnergyTrace trace;
    RunSummary summary;
};

void simulate_path(const RunConfig& cfg, const Prepared& prep, std::uint64_t index,
                   PathTally& tally, Block& acc)
{
    PathRng rng(cfg.seed, index);
    InitialState init = sample_initial(cfg.beam, cfg.dim, cfg.params, rng);
    ParticleState s = init.state;
    SensitivityState j = init.sens;
    const double e0 = std::exp(s.y);
    const double h = cfg.h;
    const SensEstimator est = prep.dspec.estimator;

    for (std::size_t n = 0; n < prep.n_steps && s.alive; ++n)
    {
        const CoeffBundle cb = coeff_bundle_log(s.y, prep.tp);
        const double e = std::exp(s.y);
        if (cfg.trace_energy)
            acc.trace.add(n, e);

        SensitivityState jd = j;
        if (est == SensEstimator::no_straggling)
        {
            // Through the discrete energy, which stays consistent with the
            // discrete path near its end.
            if (cfg.sens.alpha)
                jd.j_alpha = det_energy_sens_at(std::min(e, e0), cfg.params, e0, Param::alpha);
            if (cfg.sens.p)
                jd.j_p = det_energy_sens_at(std::min(e, e0), cfg.params, e0, Param::p);
        }
        const NoiseDraw nz = draw_noise(rng, h, h, cfg.dim, prep.nopts);
        const ParticleState next
            = full_step(s, cb, nz, h, cfg.scheme, prep.tp, prep.box, cfg.step);

        // A step that crosses e_min deposits only up to the interpolated
        // crossing, so the track ends at the kill level rather than a whole
        // step beyond it.
        double w = 1.0;
        const bool energy_death = !next.alive && std::exp(next.y) <= prep.tp.e_min;
        if (energy_death && prep.dspec.mode == DepositMode::hard_tau)
            w = std::clamp((e - prep.tp.e_min) / (e - std::exp(next.y)), 0.0, 1.0);
        deposit_step(tally, s, cb, jd, w * h, cfg.params, prep.dspec);

        if (est == SensEstimator::mollified)
            j = step_sens(j, cb, e, h, nz.xi_e, prep.tp, cfg.sens, prep.milstein);
        if (energy_death && est == SensEstimator::no_straggling)
        {
            const Vec3 x = s.x + (w * h) * s.omega.vec();
            deposit_boundary(tally, x.x, x.y, e0, cfg.params, prep.dspec);
        }
        s = next;
    }

    // Audit: a dead state must never deposit.
    if (!s.alive && deposit_step(tally, s, CoeffBundle{}, j, h, cfg.params, prep.dspec))
        ++acc.summary.cemetery_violations;

    ++acc.summary.n_paths;
    if (s.alive)
        ++acc.summary.survived;
    acc.summary.terminal_depth_sum += s.x.x;
    acc.grid.commit(tally);
}

void run_block(const RunConfig& cfg, const Prepared& prep, std::size_t b,
               std::size_t n_blocks, Block& acc)
{
    acc.grid = DoseGrid(cfg.grid);
    if (cfg.trace_energy)
        acc.trace.resize(prep.n_steps);
    PathTally tally(cfg.grid);
    const std::uint64_t lo = cfg.n_paths * b / n_blocks;
    const std::uint64_t hi = cfg.n_paths * (b + 1) / n_blocks;
    for (std::uint64_t i = lo; i < hi; ++i)
        simulate_path(cfg, prep, i, tally, acc);
}

EnsembleResult reduce(const RunConfig& cfg, const Prepared& prep,
                      const std::vector<Block>& blocks)
{
    EnsembleResult out;
    out.grid = DoseGrid(cfg.grid);
    if (cfg.trace_energy)
        out.trace.resize(prep.n_steps);
    for (const Block& b : blocks)
    {
        out.grid.merge(b.grid);
        out.trace.merge(b.trace);
        out.summary.n_paths += b.summary.n_paths;
        out.summary.survived += b.summary.survived;
        out.summary.terminal_depth_sum += b.summary.terminal_depth_sum;
        out.summary.cemetery_violations += b.summary.cemetery_violations;
    }
    return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::size_t reduction_blocks(std::uint64_t n_paths)
{
    return static_cast<std::size_t>(std::min<std::uint64_t>(64, n_paths));
}

EnsembleResult run_ensemble_serial(const RunConfig& config)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Prepared prep = prepare(config);
    const std::size_t nb = reduction_blocks(config.n_paths);
    std::vector<Block> blocks(nb);
    for (std::size_t b = 0; b < nb; ++b)
        run_block(config, prep, b, nb, blocks[b]);
    EnsembleResult out = reduce(config, prep, blocks);
    out.summary.wall_seconds = seconds_since(t0);
    return out;
}

EnsembleResult run_ensemble(const RunConfig& config)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Prepared prep = prepare(config);
    const std::size_t nb = reduction_blocks(config.n_paths);
    std::vector<Block> blocks(nb);
    const long n = static_cast<long>(nb);

#pragma omp parallel for schedule(dynamic, 1) num_threads(config.workers)
    for (long b = 0; b < n; ++b)
        run_block(config, prep, static_cast<std::size_t>(b), nb, blocks[b]);

    EnsembleResult out = reduce(config, prep, blocks);
    out.summary.wall_seconds = seconds_since(t0);
    return out;
}

// --- sensitivity fields ---------------------------------------------------------

double get_param(const ModelParams& params, Param theta)
{
    switch (theta)
    {
        case Param::alpha: return params.alpha;
        case Param::p: return params.p;
        case Param::kappa: return params.kappa;
    }
    return 0.0;
}

void set_param(ModelParams& params, Param theta, double value)
{
    switch (theta)
    {
        case Param::alpha: params.alpha = value; break;
        case Param::p: params.p = value; break;
        case Param::kappa: params.kappa = value; break;
    }
}

SensField pathwise_field(const DoseGrid& grid, Param theta)
{
    SensField f;
    const std::size_t n = grid.spec().size();
    f.value.resize(n);
    f.se.resize(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        f.value[i] = grid.sens(theta, i);
        f.se[i] = grid.sens_se(theta, i);
    }
    return f;
}

SensField fd_dose_sens(Param theta, double delta_theta, const RunConfig& config,
                       bool common_noise)
{
    if (!(delta_theta > 0))
        throw ConfigError("fd_delta", "must be positive");

    RunConfig base = config;
    base.mode = config.effective_mode();
    base.sens = ParamSet{};
    base.trace_energy = false;

    const double theta0 = get_param(config.params, theta);
    RunConfig plus = base;
    RunConfig minus = base;
    set_param(plus.params, theta, theta0 + delta_theta);
    set_param(minus.params, theta, theta0 - delta_theta);
    if (!common_noise)
        minus.seed = config.seed + 1;

    const EnsembleResult rp = run_ensemble(plus);
    const EnsembleResult rm = run_ensemble(minus);
    SensField f;
    const std::size_t n = config.grid.size();
    f.value.resize(n);
    f.se.resize(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        f.value[i] = (rp.grid.dose(i) - rm.grid.dose(i)) / (2.0 * delta_theta);
        f.se[i] = std::hypot(rp.grid.dose_se(i), rm.grid.dose_se(i)) / (2.0 * delta_theta);
    }
    return f;
}

}  // namespace psde
