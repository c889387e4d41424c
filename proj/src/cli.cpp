#include "psde/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "psde/angular.hpp"

namespace psde::cli {

// --- defaults -----------------------------------------------------------------

namespace {

json model_defaults()
{
    return {{"alpha", 0.0022},        {"p", 1.77},           {"kappa", 0.0},
            {"eps0", 0.005},          {"angular_model", "constant"},
            {"eps_bar", 19.3},        {"eps_c", 5.0},        {"e_min", 4.0},
            {"delta", 0.5}};
}

}  // namespace

json dose_defaults()
{
    json d = model_defaults();
    d.update({{"e0", 62.0},
              {"energy_spread_rel", 0.01},
              {"x0", 0.0},
              {"y0", 2.0},
              {"transverse_sigma", 0.1},
              {"nx", 200},
              {"ny", 50},
              {"extent", {0.0, 4.0, 0.0, 4.0}},
              {"h", 0.005},
              {"t_max", 0.0},
              {"n_paths", 200000},
              {"seed", 1},
              {"scheme", "milstein_rkmk"},
              {"workers", 1},
              {"sens", json::array()},
              {"dim", 2},
              {"deposit_mode", "hard_tau"},
              {"kernel", "nearest"},
              {"levy_terms", 10},
              {"project_z", false},
              {"frame_mode", "transported"}});
    return d;
}

json sensitivity_defaults()
{
    json d = dose_defaults();
    d.update({{"theta", "alpha"},
              {"estimator", "pathwise"},
              {"fd_delta", 0.01},
              {"fd_common_noise", false}});
    return d;
}

json convergence_defaults()
{
    json d = model_defaults();
    d.update({{"alpha", 0.022},
              {"kappa", 0.075},
              {"eps0", 1e-5},
              {"e_min", 1.0},
              {"e0", 62.0},
              {"t_final", 0.1},
              {"h_values", {0.02, 0.01, 0.005, 0.0025}},
              {"h_ref", 1e-4},
              {"n_paths", 1000},
              {"seed", 1},
              {"scheme", "milstein_rkmk"},
              {"workers", 1},
              {"dim", 3},
              {"levy_terms", 10},
              {"frame_mode", "transported"},
              {"include_self_test", false},
              {"milstein_correction", true}});
    return d;
}

json angular_defaults()
{
    return {{"eps0", 0.1},
            {"h", 0.01},
            {"t_max", 5.0},
            {"n_paths", 10000},
            {"seed", 1},
            {"bins", 50},
            {"workers", 1},
            {"schemes", {"euler_naive", "euler_renorm", "geometric_euler", "milstein_rkmk"}}};
}

json calibrate_defaults()
{
    return {{"sigma_r", 0.072}, {"alpha", 0.0022}, {"p", 1.77}, {"e0", 62.0}};
}

// --- resolution -----------------------------------------------------------------

namespace {

const char* kind_name(const json& v)
{
    if (v.is_boolean())
        return "boolean";
    if (v.is_number_integer())
        return "integer";
    if (v.is_number())
        return "number";
    if (v.is_string())
        return "string";
    if (v.is_array())
        return "array";
    return "value";
}

bool same_kind(const json& def, const json& v)
{
    if (def.is_boolean())
        return v.is_boolean();
    if (def.is_number_integer())
        return v.is_number_integer() || (v.is_number_float() && std::isfinite(v.get<double>())
                                         && std::floor(v.get<double>()) == v.get<double>());
    if (def.is_number())
        return v.is_number();
    if (def.is_string())
        return v.is_string();
    if (def.is_array())
    {
        if (!v.is_array())
            return false;
        if (def.empty())
            return std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_string(); });
        return std::all_of(v.begin(), v.end(),
                           [&](const json& e) { return same_kind(def.front(), e); });
    }
    return false;
}

void merge_into(json& out, const json& defaults, const json& src)
{
    if (src.is_null())
        return;
    if (!src.is_object())
        throw ConfigError("config", "must be a JSON object");
    for (const auto& [key, value] : src.items())
    {
        if (!defaults.contains(key))
            throw ConfigError(key, "unknown key");
        const json& def = defaults.at(key);
        if (!same_kind(def, value))
            throw ConfigError(key, std::string("expected ") + kind_name(def));
        if (def.is_number_integer() && value.is_number_float())
            out[key] = static_cast<long long>(value.get<double>());
        else
            out[key] = value;
    }
}

}  // namespace

json resolve_config(const json& defaults, const json& file, const json& overrides)
{
    json out = defaults;
    merge_into(out, defaults, file);
    merge_into(out, defaults, overrides);
    return out;
}

json parse_flag_value(const std::string& key, const json& def, const std::string& text)
{
    auto number = [&](const std::string& s) {
        try
        {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size())
                throw std::invalid_argument(s);
            return v;
        }
        catch (const std::exception&)
        {
            throw ConfigError(key, "expected number, got '" + s + "'");
        }
    };
    auto integer = [&](const std::string& s) {
        try
        {
            std::size_t pos = 0;
            const long long v = std::stoll(s, &pos);
            if (pos != s.size())
                throw std::invalid_argument(s);
            return v;
        }
        catch (const std::exception&)
        {
            throw ConfigError(key, "expected integer, got '" + s + "'");
        }
    };

    if (def.is_boolean())
    {
        if (text == "true" || text == "1")
            return true;
        if (text == "false" || text == "0")
            return false;
        throw ConfigError(key, "expected boolean");
    }
    if (def.is_number_integer())
        return integer(text);
    if (def.is_number())
        return number(text);
    if (def.is_string())
        return text;
    if (def.is_array())
    {
        json arr = json::array();
        std::stringstream ss(text);
        std::string item;
        const bool numeric = !def.empty() && def.front().is_number();
        while (std::getline(ss, item, ','))
        {
            if (item.empty())
                continue;
            if (numeric)
                arr.push_back(number(item));
            else
                arr.push_back(item);
        }
        return arr;
    }
    throw ConfigError(key, "unsupported flag type");
}

json load_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read config file '" + path + "'");
    try
    {
        return json::parse(in);
    }
    catch (const json::parse_error& err)
    {
        throw ConfigError("config", std::string("invalid JSON: ") + err.what());
    }
}

json canonical(const json& resolved)
{
    json c = resolved;
    c.erase("workers");
    return c;
}

// --- conversion -----------------------------------------------------------------

namespace {

ModelParams to_model(const json& r)
{
    ModelParams m;
    m.alpha = r.at("alpha").get<double>();
    m.p = r.at("p").get<double>();
    m.kappa = r.at("kappa").get<double>();
    m.eps0 = r.at("eps0").get<double>();
    m.eps_bar = r.at("eps_bar").get<double>();
    m.eps_c = r.at("eps_c").get<double>();
    m.e_min = r.at("e_min").get<double>();
    m.delta = r.at("delta").get<double>();
    try
    {
        m.angular_model = angular_model_from_string(r.at("angular_model").get<std::string>());
    }
    catch (const std::invalid_argument& err)
    {
        throw ConfigError("angular_model", err.what());
    }
    return m;
}

template <class F>
auto keyed(const char* key, F&& f)
{
    try
    {
        return f();
    }
    catch (const ConfigError&)
    {
        throw;
    }
    catch (const std::exception& err)
    {
        throw ConfigError(key, err.what());
    }
}

FrameMode frame_mode_from(const json& r)
{
    const std::string s = r.at("frame_mode").get<std::string>();
    if (s == "transported")
        return FrameMode::transported;
    if (s == "polar")
        return FrameMode::polar;
    throw ConfigError("frame_mode", "expected 'transported' or 'polar'");
}

std::uint64_t non_negative_int(const json& r, const char* key)
{
    const long long v = r.at(key).get<long long>();
    if (v < 0)
        throw ConfigError(key, "must be non-negative");
    return static_cast<std::uint64_t>(v);
}

}  // namespace

RunConfig to_run_config(const json& r)
{
    RunConfig c;
    c.params = to_model(r);
    c.scheme = keyed("scheme", [&] { return scheme_from_string(r.at("scheme").get<std::string>()); });
    c.n_paths = non_negative_int(r, "n_paths");
    c.h = r.at("h").get<double>();
    c.t_max = r.at("t_max").get<double>();
    c.seed = non_negative_int(r, "seed");
    c.dim = r.at("dim").get<int>();
    c.workers = r.at("workers").get<int>();
    c.levy_terms = r.at("levy_terms").get<int>();
    c.project_z = r.at("project_z").get<bool>();
    c.beam.e0 = r.at("e0").get<double>();
    c.beam.energy_spread_rel = r.at("energy_spread_rel").get<double>();
    c.beam.x0 = {r.at("x0").get<double>(), r.at("y0").get<double>(), 0.0};
    c.beam.transverse_sigma = r.at("transverse_sigma").get<double>();
    c.grid.nx = r.at("nx").get<int>();
    c.grid.ny = r.at("ny").get<int>();
    const json& ext = r.at("extent");
    if (ext.size() != 4)
        throw ConfigError("extent", "expected [x_min, x_max, y_min, y_max]");
    c.grid.extent = {ext[0].get<double>(), ext[1].get<double>(), ext[2].get<double>(),
                     ext[3].get<double>()};
    for (const auto& name : r.at("sens"))
        c.sens.insert(keyed("sens", [&] { return param_from_string(name.get<std::string>()); }));

    const std::string mode = r.at("deposit_mode").get<std::string>();
    if (mode == "hard_tau")
        c.mode = DepositMode::hard_tau;
    else if (mode == "mollified")
        c.mode = DepositMode::mollified;
    else
        throw ConfigError("deposit_mode", "expected 'hard_tau' or 'mollified'");

    const std::string kernel = r.at("kernel").get<std::string>();
    if (kernel == "nearest")
        c.kernel = Kernel::nearest;
    else if (kernel == "gaussian")
        c.kernel = Kernel::gaussian;
    else
        throw ConfigError("kernel", "expected 'nearest' or 'gaussian'");

    c.step.frame_mode = frame_mode_from(r);
    c.validate();
    return c;
}

ConvergenceSetup to_convergence_setup(const json& r)
{
    ConvergenceSetup s;
    s.params = to_model(r);
    keyed("alpha", [&] {
        s.params.validate();
        return 0;
    });
    s.e0 = r.at("e0").get<double>();
    if (!(s.e0 > s.params.e_min))
        throw ConfigError("e0", "must exceed e_min");
    s.t_final = r.at("t_final").get<double>();
    if (!(s.t_final > 0))
        throw ConfigError("t_final", "must be positive");
    s.seed = non_negative_int(r, "seed");
    s.dim = r.at("dim").get<int>();
    if (s.dim != 2 && s.dim != 3)
        throw ConfigError("dim", "must be 2 or 3");
    s.levy_terms = r.at("levy_terms").get<int>();
    if (s.levy_terms < 1)
        throw ConfigError("levy_terms", "must be at least 1");
    s.workers = r.at("workers").get<int>();
    if (s.workers < 1)
        throw ConfigError("workers", "must be at least 1");
    s.step.frame_mode = frame_mode_from(r);
    s.step.milstein_correction = r.at("milstein_correction").get<bool>();
    return s;
}

// --- output -----------------------------------------------------------------------

std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::vector<std::string> provenance_lines(const json& resolved)
{
    std::vector<std::string> lines{"config: " + canonical(resolved).dump()};
    // Commands without randomness report seed 0.
    const long long seed = resolved.contains("seed") ? resolved.at("seed").get<long long>() : 0;
    lines.push_back("seed: " + std::to_string(seed));
    return lines;
}

void write_csv(const std::string& path, const std::vector<std::string>& comments,
               const std::string& header, const std::vector<std::vector<double>>& rows)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    for (const auto& c : comments)
        out << "# " << c << '\n';
    out << header << '\n';
    for (const auto& row : rows)
    {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << format_number(row[i]);
        out << '\n';
    }
    out.flush();
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

// --- commands ---------------------------------------------------------------------

namespace {

void echo_config(const std::string& command, const json& resolved)
{
    std::cerr << command << " config: " << resolved.dump() << '\n';
}

void echo_summary(const RunSummary& s)
{
    std::cerr << "paths: " << s.n_paths << ", survived fraction: "
              << format_number(s.survived_fraction())
              << ", mean terminal depth: " << format_number(s.mean_terminal_depth())
              << " cm, wall time: " << format_number(s.wall_seconds) << " s\n";
    if (s.cemetery_violations)
        throw AssertionFailure("dead paths contributed to the dose");
}

std::string sibling_path(const std::string& out, const std::string& suffix)
{
    const auto dot = out.rfind('.');
    const auto slash = out.rfind('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return out + suffix + ".csv";
    return out.substr(0, dot) + suffix + out.substr(dot);
}

// Fail before a long run rather than after it.
void ensure_writable(const std::string& path)
{
    if (path.empty())
        return;
    std::ofstream probe(path, std::ios::app);
    if (!probe)
        throw IoError("cannot open '" + path + "' for writing");
}

std::vector<std::vector<double>> field_rows(const GridSpec& g, const std::vector<double>& v)
{
    std::vector<std::vector<double>> rows;
    rows.reserve(g.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix)
            rows.push_back({g.x_center(ix), g.y_center(iy), v[g.index(ix, iy)]});
    return rows;
}

int cmd_simulate_dose(const json& r, const std::string& out, std::string depth_out)
{
    echo_config("simulate-dose", r);
    RunConfig cfg = to_run_config(r);
    if (depth_out.empty())
        depth_out = sibling_path(out, "_depth");
    ensure_writable(out);
    ensure_writable(depth_out);
    const EnsembleResult res = run_ensemble(cfg);
    echo_summary(res.summary);

    const auto comments = provenance_lines(r);
    write_csv(out, comments, "x,y,dose", field_rows(cfg.grid, res.grid.dose_field()));

    const std::vector<double> depth = res.grid.depth_profile();
    std::vector<std::vector<double>> rows;
    for (int ix = 0; ix < cfg.grid.nx; ++ix)
        rows.push_back({cfg.grid.x_center(ix), depth[ix]});
    write_csv(depth_out, comments, "x,dose_integrated_over_y", rows);
    return exit_ok;
}

int cmd_sensitivity(const json& r, const std::string& out, const std::string& se_out)
{
    echo_config("sensitivity", r);
    RunConfig cfg = to_run_config(r);
    const Param theta = keyed("theta", [&] {
        return param_from_string(r.at("theta").get<std::string>());
    });
    if (theta == Param::kappa && !(cfg.params.kappa > 0))
        throw ConfigError("theta", "kappa sensitivity needs kappa > 0");
    const std::string estimator = r.at("estimator").get<std::string>();
    cfg.sens = ParamSet{};
    cfg.sens.insert(theta);
    cfg.validate();
    ensure_writable(out);
    ensure_writable(se_out);

    SensField field;
    if (estimator == "pathwise")
    {
        const EnsembleResult res = run_ensemble(cfg);
        echo_summary(res.summary);
        field = pathwise_field(res.grid, theta);
    }
    else if (estimator == "fd")
    {
        const double rel = r.at("fd_delta").get<double>();
        if (!(rel > 0))
            throw ConfigError("fd_delta", "must be positive");
        const double delta = rel * std::abs(get_param(cfg.params, theta));
        field = fd_dose_sens(theta, delta, cfg, r.at("fd_common_noise").get<bool>());
    }
    else
    {
        throw ConfigError("estimator", "expected 'pathwise' or 'fd'");
    }

    const auto comments = provenance_lines(r);
    write_csv(out, comments, "x,y,dsens", field_rows(cfg.grid, field.value));
    if (!se_out.empty())
        write_csv(se_out, comments, "x,y,se", field_rows(cfg.grid, field.se));
    return exit_ok;
}

struct Window
{
    const char* name;
    double value;
    double lo;
    double hi;
};

int cmd_convergence(const json& r, const std::string& out, bool assert_orders)
{
    echo_config("convergence", r);
    const ConvergenceSetup setup = to_convergence_setup(r);
    const Scheme scheme = keyed("scheme", [&] {
        return scheme_from_string(r.at("scheme").get<std::string>());
    });
    if (scheme != Scheme::geometric_euler && scheme != Scheme::milstein_rkmk)
        throw ConfigError("scheme", "convergence supports geometric_euler and milstein_rkmk");
    const auto h_values = r.at("h_values").get<std::vector<double>>();
    if (h_values.size() < 3)
        throw ConfigError("h_values", "need at least three step sizes");
    const auto n_paths = non_negative_int(r, "n_paths");
    ensure_writable(out);

    const StrongErrorReport rep
        = strong_error_study(setup, scheme, h_values, r.at("h_ref").get<double>(), n_paths);

    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < rep.h_values.size(); ++k)
        rows.push_back({rep.h_values[k], rep.err_e[k], rep.err_omega[k], rep.err_x[k],
                        rep.err_j[0][k], rep.err_j[1][k], rep.err_j[2][k]});
    if (r.at("include_self_test").get<bool>())
    {
        std::vector<double> row{rep.h_ref};
        row.insert(row.end(), rep.self_test.begin(), rep.self_test.end());
        rows.push_back(row);
    }

    auto comments = provenance_lines(r);
    std::ostringstream slopes;
    slopes << "slopes: E=" << format_number(rep.slopes.e)
           << " Omega=" << format_number(rep.slopes.omega)
           << " X=" << format_number(rep.slopes.x)
           << " J_alpha=" << format_number(rep.slopes.j[0])
           << " J_p=" << format_number(rep.slopes.j[1])
           << " J_kappa=" << format_number(rep.slopes.j[2]);
    write_csv(out, comments, "h,err_E,err_Omega,err_X,err_J_alpha,err_J_p,err_J_kappa", rows);
    {
        std::ofstream app(out, std::ios::app);
        app << "# " << slopes.str() << '\n';
        if (!app)
            throw IoError("write to '" + out + "' failed");
    }
    std::cerr << slopes.str() << '\n';

    if (!assert_orders)
        return exit_ok;

    std::vector<Window> windows;
    if (scheme == Scheme::geometric_euler)
    {
        windows = {{"E", rep.slopes.e, 0.4, 0.6},
                   {"Omega", rep.slopes.omega, 0.4, 0.6},
                   {"X", rep.slopes.x, 0.85, 1.15}};
    }
    else
    {
        windows = {{"E", rep.slopes.e, 0.85, 1.15},
                   {"Omega", rep.slopes.omega, 0.85, 1.15},
                   {"X", rep.slopes.x, 0.85, 1.15},
                   {"J_alpha", rep.slopes.j[0], 0.85, 1.15},
                   {"J_p", rep.slopes.j[1], 0.85, 1.15}};
        if (setup.params.kappa > 0)
            windows.push_back({"J_kappa", rep.slopes.j[2], 0.85, 1.15});
    }
    std::string failed;
    for (const Window& w : windows)
        if (!(w.value >= w.lo && w.value <= w.hi))
            failed += std::string(failed.empty() ? "" : ", ") + w.name + "="
                      + format_number(w.value) + " not in [" + format_number(w.lo) + ", "
                      + format_number(w.hi) + "]";
    if (!failed.empty())
        throw AssertionFailure("order check failed: " + failed);
    std::cerr << "order check passed\n";
    return exit_ok;
}

int cmd_angular_demo(const json& r, const std::string& prefix)
{
    echo_config("angular-demo", r);
    AngularDemoConfig base;
    base.eps0 = r.at("eps0").get<double>();
    base.h = r.at("h").get<double>();
    base.t_max = r.at("t_max").get<double>();
    base.n_paths = non_negative_int(r, "n_paths");
    base.seed = non_negative_int(r, "seed");
    base.bins = r.at("bins").get<int>();
    base.workers = r.at("workers").get<int>();
    if (!(base.eps0 >= 0))
        throw ConfigError("eps0", "must be non-negative");
    if (base.workers < 1)
        throw ConfigError("workers", "must be at least 1");
    const double steps = base.t_max / base.h;
    if (!(base.h > 0) || std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
        throw ConfigError("t_max", "must be a whole number of steps h");

    const auto comments = provenance_lines(r);
    for (const auto& name : r.at("schemes"))
    {
        AngularDemoConfig cfg = base;
        cfg.scheme = keyed("schemes", [&] { return scheme_from_string(name.get<std::string>()); });
        const AngularDemoResult res = angular_demo(cfg);
        const std::string tag = prefix + "_" + name.get<std::string>();

        std::vector<std::vector<double>> rows;
        for (std::size_t n = 0; n < res.mean_norm.size(); ++n)
            rows.push_back({static_cast<double>(n), static_cast<double>(n) * cfg.h,
                            res.norm_path0[n], res.mean_norm[n]});
        write_csv(tag + "_norm.csv", comments, "step,t,norm_path0,mean_norm", rows);

        const double d = ks_uniform_statistic(res.terminal_angle);
        const double crit = ks_critical(res.terminal_angle.size(), 0.01);
        auto hist_comments = comments;
        hist_comments.push_back("ks: D=" + format_number(d)
                                + " critical_0.01=" + format_number(crit)
                                + (d <= crit ? " uniform" : " not_uniform"));
        rows.clear();
        const double width = 2.0 * std::numbers::pi / cfg.bins;
        for (int k = 0; k < cfg.bins; ++k)
            rows.push_back({-std::numbers::pi + k * width, -std::numbers::pi + (k + 1) * width,
                            static_cast<double>(res.histogram[k])});
        write_csv(tag + "_hist.csv", hist_comments, "bin_left,bin_right,count", rows);
        std::cerr << name.get<std::string>() << ": KS D=" << format_number(d)
                  << " (critical " << format_number(crit) << ")\n";
    }
    return exit_ok;
}

int cmd_calibrate_kappa(const json& r, const std::string& out)
{
    echo_config("calibrate-kappa", r);
    ModelParams m;
    m.alpha = r.at("alpha").get<double>();
    m.p = r.at("p").get<double>();
    const double e0 = r.at("e0").get<double>();
    const double sigma = r.at("sigma_r").get<double>();
    if (!(sigma >= 0))
        throw ConfigError("sigma_r", "must be non-negative");
    keyed("alpha", [&] {
        m.validate();
        return 0;
    });
    if (!(e0 > 0))
        throw ConfigError("e0", "must be positive");
    const double var = sigma * sigma;
    const double kappa = calibrate_kappa(var, m, e0);
    const std::vector<std::vector<double>> rows{{sigma, var, kappa}};
    if (out.empty() || out == "-")
    {
        for (const auto& c : provenance_lines(r))
            std::cout << "# " << c << '\n';
        std::cout << "sigma_r,var_r,kappa\n"
                  << format_number(sigma) << ',' << format_number(var) << ','
                  << format_number(kappa) << '\n';
        return exit_ok;
    }
    write_csv(out, provenance_lines(r), "sigma_r,var_r,kappa", rows);
    return exit_ok;
}

// Registers one option per config key; values are collected as raw strings.
struct KeyOptions
{
    json defaults;
    std::map<std::string, std::string> raw;
    std::map<std::string, bool> flags;
    std::map<std::string, CLI::Option*> opts;

    explicit KeyOptions(json d) : defaults(std::move(d)) {}

    void attach(CLI::App* app)
    {
        for (const auto& [key, def] : defaults.items())
        {
            std::string names = "--" + key;
            std::string dashed = key;
            std::replace(dashed.begin(), dashed.end(), '_', '-');
            if (dashed != key)
                names += ",--" + dashed;
            if (def.is_boolean())
            {
                flags[key] = false;
                opts[key] = app->add_flag(names, flags[key], "config key '" + key + "'");
            }
            else
            {
                opts[key] = app->add_option(names, raw[key], "config key '" + key + "'");
            }
        }
    }

    json overrides() const
    {
        json o = json::object();
        for (const auto& [key, opt] : opts)
        {
            if (opt->count() == 0)
                continue;
            const json& def = defaults.at(key);
            o[key] = def.is_boolean() ? json(flags.at(key))
                                      : parse_flag_value(key, def, raw.at(key));
        }
        return o;
    }
};

}  // namespace

int run(int argc, char** argv)
{
    CLI::App app{"Structure-preserving Monte Carlo for stochastic proton transport"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "Print this help message and exit");  // frees -h for --h

    std::string config_path;
    std::string out;
    std::string depth_out;
    std::string se_out;
    std::string prefix = "angular";
    bool assert_orders = false;
    bool sabotage = false;

    auto* dose = app.add_subcommand("simulate-dose", "Dose grid and depth profile");
    auto* sens = app.add_subcommand("sensitivity", "Dose sensitivity field");
    auto* conv = app.add_subcommand("convergence", "Strong-convergence study");
    auto* ang = app.add_subcommand("angular-demo", "Angular diffusion on the circle");
    auto* cal = app.add_subcommand("calibrate-kappa", "Straggling amplitude from range spread");

    KeyOptions dose_keys{dose_defaults()}, sens_keys{sensitivity_defaults()},
        conv_keys{convergence_defaults()}, ang_keys{angular_defaults()},
        cal_keys{calibrate_defaults()};
    dose_keys.attach(dose);
    sens_keys.attach(sens);
    conv_keys.attach(conv);
    ang_keys.attach(ang);
    cal_keys.attach(cal);

    for (auto* sub : {dose, sens, conv, ang, cal})
        sub->add_option("--config", config_path, "JSON config file");
    dose->add_option("--out", out, "dose CSV")->required();
    dose->add_option("--depth-out", depth_out, "depth-profile CSV");
    sens->add_option("--out", out, "sensitivity CSV")->required();
    sens->add_option("--se-out", se_out, "standard-error CSV");
    conv->add_option("--out", out, "convergence CSV")->required();
    conv->add_flag("--assert-orders", assert_orders, "fail unless slopes are in range");
    conv->add_flag("--disable-milstein-correction", sabotage)->group("");
    ang->add_option("--out-prefix", prefix, "prefix for the per-scheme CSVs");
    cal->add_option("--out", out, "CSV output (stdout if omitted)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e);
        return exit_config;
    }

    try
    {
        const json file = config_path.empty() ? json::object() : load_config_file(config_path);
        auto resolve = [&](const KeyOptions& k) {
            return resolve_config(k.defaults, file, k.overrides());
        };
        if (dose->parsed())
            return cmd_simulate_dose(resolve(dose_keys), out, depth_out);
        if (sens->parsed())
            return cmd_sensitivity(resolve(sens_keys), out, se_out);
        if (conv->parsed())
        {
            json r = resolve(conv_keys);
            if (sabotage)
                r["milstein_correction"] = false;
            return cmd_convergence(r, out, assert_orders);
        }
        if (ang->parsed())
            return cmd_angular_demo(resolve(ang_keys), prefix);
        if (cal->parsed())
            return cmd_calibrate_kappa(resolve(cal_keys), out);
    }
    catch (const ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }
    catch (const IoError& e)
    {
        std::cerr << "I/O error: " << e.what() << '\n';
        return exit_io;
    }
    catch (const AssertionFailure& e)
    {
        std::cerr << "assertion failed: " << e.what() << '\n';
        return exit_assertion;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_failure;
    }
    return exit_failure;
}

}  // namespace psde::cli
