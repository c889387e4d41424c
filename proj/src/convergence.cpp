#include "psde/convergence.hpp"

#include <cmath>
#include <stdexcept>

namespace psde {

NoiseDraw aggregate_noise(std::span<const NoiseDraw> fine)
{
    NoiseDraw out;
    double area = 0.0;
    double cross = 0.0;
    for (const NoiseDraw& d : fine)
    {
        cross += out.dw1 * d.dw2 - out.dw2 * d.dw1;
        area += d.levy_a;
        out.xi_e += d.xi_e;
        out.dw1 += d.dw1;
        out.dw2 += d.dw2;
        out.dgamma += d.dgamma;
    }
    out.levy_a = area + 0.5 * cross;
    return out;
}

namespace {

std::size_t whole_ratio(double a, double b, const char* field)
{
    const double r = a / b;
    const double n = std::round(r);
    if (!(n >= 1) || std::abs(r - n) > 1e-9 * n)
        throw ConfigError(field, "must be a whole multiple of the reference step");
    return static_cast<std::size_t>(n);
}

ParamSet enabled_params(const ModelParams& params)
{
    return {true, true, params.kappa > 0};
}

}  // namespace

std::vector<NoiseDraw> fine_noise(const ConvergenceSetup& setup, std::uint64_t index,
                                  double h_ref)
{
    const std::size_t n = whole_ratio(setup.t_final, h_ref, "t_final");
    PathRng rng(setup.seed, index);
    NoiseOptions opts;
    opts.levy_terms = setup.levy_terms;
    opts.levy = true;
    std::vector<NoiseDraw> out(n);
    for (auto& d : out)
        d = draw_noise(rng, h_ref, h_ref, setup.dim, opts);
    return out;
}

PathEnd run_path(const ConvergenceSetup& setup, std::span<const NoiseDraw> noise,
                 double h, Scheme scheme)
{
    const ModelParams& params = setup.params;
    PathEnd end;
    end.state = make_state(setup.x0, Direction::normalized(setup.direction, setup.dim),
                           setup.e0);
    const ParamSet enabled = enabled_params(params);
    const bool milstein = scheme == Scheme::milstein_rkmk && setup.step.milstein_correction;
    const Box unbounded;
    for (const NoiseDraw& nz : noise)
    {
        if (!end.state.alive)
            break;
        const CoeffBundle cb = coeff_bundle_log(end.state.y, params);
        end.sens = step_sens(end.sens, cb, std::exp(end.state.y), h, nz.xi_e, params,
                             enabled, milstein);
        end.state = full_step(end.state, cb, nz, h, scheme, params, unbounded, setup.step);
    }
    return end;
}

namespace {

std::vector<NoiseDraw> coarsen(const std::vector<NoiseDraw>& fine, std::size_t m)
{
    std::vector<NoiseDraw> out(fine.size() / m);
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = aggregate_noise(std::span(fine).subspan(k * m, m));
    return out;
}

ConvergenceSetup reference_setup(const ConvergenceSetup& setup)
{
    ConvergenceSetup ref = setup;
    ref.step.milstein_correction = true;
    return ref;
}

// Squared differences: E, Omega, X, J_alpha, J_p, J_kappa.
std::array<double, 6> sq_diff(const PathEnd& a, const PathEnd& b)
{
    const double de = std::exp(a.state.y) - std::exp(b.state.y);
    const double dw = distance(a.state.omega.vec(), b.state.omega.vec());
    const double dx = distance(a.state.x, b.state.x);
    std::array<double, 6> out{de * de, dw * dw, dx * dx, 0.0, 0.0, 0.0};
    for (Param theta : all_params)
    {
        const double dj = a.sens[theta] - b.sens[theta];
        out[3 + static_cast<int>(theta)] = dj * dj;
    }
    return out;
}

}  // namespace

CoupledResult coupled_path(const ConvergenceSetup& setup, std::uint64_t index,
                           double h_coarse, double h_ref, Scheme scheme)
{
    const std::size_t m = whole_ratio(h_coarse, h_ref, "h");
    const std::vector<NoiseDraw> fine = fine_noise(setup, index, h_ref);
    if (fine.size() % m != 0)
        throw ConfigError("h", "must divide t_final");
    CoupledResult r;
    r.reference = run_path(reference_setup(setup), fine, h_ref, Scheme::milstein_rkmk);
    r.coarse = run_path(setup, coarsen(fine, m), h_coarse, scheme);
    return r;
}

StrongErrorReport strong_error_study(const ConvergenceSetup& setup, Scheme scheme,
                                     const std::vector<double>& h_values, double h_ref,
                                     std::uint64_t n_paths)
{
    if (n_paths < 1)
        throw ConfigError("n_paths", "must be at least 1");
    const std::size_t n_fine = whole_ratio(setup.t_final, h_ref, "t_final");
    std::vector<std::size_t> ms;
    for (double h : h_values)
    {
        const std::size_t m = whole_ratio(h, h_ref, "h_values");
        if (n_fine % m != 0)
            throw ConfigError("h_values", "must divide t_final");
        ms.push_back(m);
    }
    for (std::size_t i = 1; i < h_values.size(); ++i)
        if (!(h_values[i] < h_values[i - 1]))
            throw ConfigError("h_values", "must be strictly decreasing");

    const std::size_t nh = h_values.size();
    // Per-path squared errors, rows (path, h + self-test) x 6 components.
    std::vector<std::array<double, 6>> sq(n_paths * (nh + 1));
    const ConvergenceSetup ref_setup = reference_setup(setup);
    const long np = static_cast<long>(n_paths);

#pragma omp parallel for schedule(dynamic, 4) num_threads(setup.workers)
    for (long i = 0; i < np; ++i)
    {
        const auto idx = static_cast<std::uint64_t>(i);
        const std::vector<NoiseDraw> fine = fine_noise(setup, idx, h_ref);
        const PathEnd ref = run_path(ref_setup, fine, h_ref, Scheme::milstein_rkmk);
        for (std::size_t k = 0; k < nh; ++k)
        {
            const PathEnd coarse
                = run_path(setup, coarsen(fine, ms[k]), h_values[k], scheme);
            sq[idx * (nh + 1) + k] = sq_diff(coarse, ref);
        }
        const PathEnd self = run_path(ref_setup, coarsen(fine, 1), h_ref,
                                      Scheme::milstein_rkmk);
        sq[idx * (nh + 1) + nh] = sq_diff(self, ref);
    }

    StrongErrorReport rep;
    rep.scheme = scheme;
    rep.h_values = h_values;
    rep.n_paths = n_paths;
    rep.t_final = setup.t_final;
    rep.h_ref = h_ref;
    std::vector<std::array<double, 6>> rms(nh + 1, std::array<double, 6>{});
    for (std::uint64_t i = 0; i < n_paths; ++i)
        for (std::size_t k = 0; k <= nh; ++k)
            for (int c = 0; c < 6; ++c)
                rms[k][c] += sq[i * (nh + 1) + k][c];
    for (auto& row : rms)
        for (double& v : row)
            v = std::sqrt(v / static_cast<double>(n_paths));

    for (std::size_t k = 0; k < nh; ++k)
    {
        rep.err_e.push_back(rms[k][0]);
        rep.err_omega.push_back(rms[k][1]);
        rep.err_x.push_back(rms[k][2]);
        for (int t = 0; t < 3; ++t)
            rep.err_j[t].push_back(rms[k][3 + t]);
    }
    rep.self_test = rms[nh];

    if (nh >= 3)
    {
        rep.slopes.e = fit_slope(rep.h_values, rep.err_e);
        rep.slopes.omega = fit_slope(rep.h_values, rep.err_omega);
        rep.slopes.x = fit_slope(rep.h_values, rep.err_x);
        for (int t = 0; t < 3; ++t)
        {
            const bool on = t < 2 || setup.params.kappa > 0;
            rep.slopes.j[t] = on ? fit_slope(rep.h_values, rep.err_j[t]) : 0.0;
        }
    }
    return rep;
}

double fit_slope(std::span<const double> h, std::span<const double> err)
{
    if (h.size() != err.size() || h.size() < 3)
        throw std::invalid_argument("fit_slope: need at least three (h, err) pairs");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(h.size());
    for (std::size_t i = 0; i < h.size(); ++i)
    {
        if (!(h[i] > 0) || !(err[i] > 0))
            throw std::invalid_argument("fit_slope: values must be positive");
        const double x = std::log(h[i]);
        const double y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace psde
