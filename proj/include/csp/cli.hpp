#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "asymptotics.hpp"
#include "error.hpp"
#include "io.hpp"
#include "pde.hpp"
#include "profile.hpp"
#include "scatter.hpp"
#include "soliton.hpp"

#ifndef CSP_VERSION
#define CSP_VERSION "0.1.0"
#endif

namespace csp::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

inline constexpr const char* version = "csp-lab " CSP_VERSION;

inline std::string fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Strict view of a JSON object: every key must be read, missing keys name their path.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw Error(ErrorKind::ConfigError, path_ + ": expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    template <class T>
    T get(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) throw Error(ErrorKind::ConfigError, "missing field " + name(key));
        try {
            return j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw Error(ErrorKind::ConfigError, "wrong type for field " + name(key));
        }
    }

    template <class T>
    T get(const std::string& key, T fallback) {
        seen_.insert(key);
        if (!j_.contains(key)) return fallback;
        return get<T>(key);
    }

    Section sub(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) throw Error(ErrorKind::ConfigError, "missing field " + name(key));
        return Section(j_.at(key), name(key));
    }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) throw Error(ErrorKind::ConfigError, "missing field " + name(key));
        return j_.at(key);
    }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) throw Error(ErrorKind::ConfigError, "unknown field " + name(k));
    }

    std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

struct Context {
    std::string config_text;
    fs::path config_dir;
    fs::path out;
    PhaseConvention convention = PhaseConvention::real_phase;
    std::ostream* log = &std::cout;
};

inline fs::path resolve_path(const Context& ctx, const std::string& p) {
    fs::path q(p);
    return q.is_absolute() ? q : ctx.config_dir / q;
}

inline Grid read_grid(Section s) {
    Grid g{s.get<double>("x0"), s.get<double>("dx"), s.get<std::size_t>("n")};
    s.finish();
    return g;
}

inline ProfileSpec read_profile_spec(Section s, const Context& ctx, std::optional<Grid>* grid_from_file = nullptr) {
    const auto type = s.get<std::string>("type");
    ProfileSpec spec;
    if (type == "gaussian") {
        spec = GaussianSpec{s.get<double>("A"), s.get<double>("w"), s.get<double>("xc", 0.0), s.get<double>("phi", 0.0),
                            s.get<bool>("derivative", false)};
    } else if (type == "sech") {
        spec = SechSpec{s.get<double>("A"), s.get<double>("phi", 0.0), s.get<double>("xc", 0.0)};
    } else if (type == "raw") {
        const auto re = s.get<std::vector<double>>("re"), im = s.get<std::vector<double>>("im");
        if (re.size() != im.size()) throw Error(ErrorKind::ConfigError, s.name("im") + ": length differs from re");
        RawSamples r;
        for (std::size_t i = 0; i < re.size(); ++i) r.values.emplace_back(re[i], im[i]);
        spec = r;
    } else if (type == "file") {
        const auto p = io::read_profile(resolve_path(ctx, s.get<std::string>("path")));
        if (grid_from_file) *grid_from_file = p.grid();
        spec = RawSamples{p.u};
    } else {
        throw Error(ErrorKind::ConfigError, s.name("type") + ": unknown profile type '" + type + "'");
    }
    s.finish();
    return spec;
}

inline void write_manifest(const Context& ctx, const std::string& command, json extra = json::object()) {
    json m{{"tool", "csp-lab"},
           {"version", version},
           {"command", command},
           {"config_hash", fnv1a(ctx.config_text)},
           {"convention", std::string(to_string(ctx.convention))}};
    for (auto& [k, v] : extra.items()) m[k] = v;
    io::write_file(ctx.out / "manifest.json", m.dump(2) + "\n");
}

/// Slope of log|r| against log k over 1e-3 <= |k| <= 0.1, both half lines pooled.
inline std::optional<double> small_k_slope(const ScatteringTable& t) {
    std::vector<double> lk, lr;
    for (const auto& e : t.entries) {
        const double k = std::abs(e.k);
        if (k >= 1e-3 * (1 - 1e-12) && k <= 0.1 && std::abs(e.r) > 0.0) {
            lk.push_back(std::log(k));
            lr.push_back(std::log(std::abs(e.r)));
        }
    }
    if (lk.size() < 2) return std::nullopt;
    return fit_slope(lk, lr);
}

inline json cmd_scatter(const Context& ctx, const json& cfg) {
    Section root(cfg, "");
    std::optional<Grid> file_grid;
    auto spec = read_profile_spec(root.sub("profile"), ctx, &file_grid);
    Grid grid = file_grid && !root.has("grid") ? *file_grid : read_grid(root.sub("grid"));
    KGridSpec ks;
    if (root.has("k_grid")) {
        auto s = root.sub("k_grid");
        ks.k_max = s.get<double>("k_max", ks.k_max);
        ks.n_linear = s.get<std::size_t>("n_linear", ks.n_linear);
        ks.n_log = s.get<std::size_t>("n_log", ks.n_log);
        ks.k_split = s.get<double>("k_split", ks.k_split);
        ks.k_log_min = s.get<double>("k_log_min", ks.k_log_min);
        s.finish();
    }
    JostOptions opts;
    opts.refine = root.get<std::size_t>("refine", opts.refine);
    opts.threads = root.get<unsigned>("threads", opts.threads);
    root.finish();

    const auto p = build_profile(spec, grid);
    const auto g = geometry(p);
    const auto table = reflection_table(p, g, make_k_grid(ks), opts, ks.describe());
    io::write_table(ctx.out / "table.csv", table);
    const auto slope = small_k_slope(table);
    json summary{{"unitarity_defect", table.unitarity_defect},
                 {"small_k_slope", slope ? json(*slope) : json(nullptr)},
                 {"c", table.c},
                 {"d_imag", table.d.imag()},
                 {"entries", table.entries.size()}};
    write_manifest(ctx, "scatter", {{"summary", summary}});
    *ctx.log << "unitarity defect " << table.unitarity_defect << "\n";
    *ctx.log << "small-k slope of |r| " << (slope ? std::to_string(*slope) : std::string("n/a")) << "\n";
    return summary;
}

inline json cmd_soliton(const Context& ctx, const json& cfg) {
    Section root(cfg, "");
    DiscreteSpectrum spec;
    if (root.has("spectrum_file")) {
        spec = io::spectrum_from_json(
            io::parse_json(io::read_file(resolve_path(ctx, root.get<std::string>("spectrum_file"))), "spectrum file"));
    } else {
        spec = io::spectrum_from_json(root.raw("spectrum"));
    }
    const double t = root.get<double>("t", 0.0);
    const Grid grid = read_grid(root.sub("grid"));
    std::vector<double> yr = root.get<std::vector<double>>("y_range", {-20.0, 20.0});
    const auto ny = root.get<std::size_t>("y_samples", 2001);
    root.finish();
    if (yr.size() != 2 || !(yr[1] > yr[0]) || ny < 2) throw Error(ErrorKind::ConfigError, "y_range/y_samples invalid");
    spec.validate();

    json meta{{"N", spec.points.size()}, {"t", t}, {"classification", json::array()}};
    for (const auto& p : spec.points) meta["classification"].push_back(std::string(to_string(classify(p.k))));
    const auto e = nsoliton_eval(spec, 0.5 * (yr[0] + yr[1]), t);
    meta["condition_estimate"] = 1.0 / e.rcond;
    meta["system_size"] = 2 * spec.points.size();

    bool gridded = false;
    try {
        const auto f = soliton_field(spec, t, grid);
        io::write_profile(ctx.out / "field.json", f);
        gridded = true;
    } catch (const Error& err) {
        if (err.kind() != ErrorKind::NotSingleValued) throw;
        meta["gridded_refused"] = err.what();
    }
    if (!gridded) {
        std::string csv = "y,x,re_u,im_u\n";
        for (std::size_t i = 0; i < ny; ++i) {
            const double y = yr[0] + (yr[1] - yr[0]) * static_cast<double>(i) / (ny - 1);
            const auto s = soliton_point(spec, y, t);
            csv += io::num(y) + "," + io::num(s.x) + "," + io::num(s.u.real()) + "," + io::num(s.u.imag()) + "\n";
        }
        io::write_file(ctx.out / "parametric.csv", csv);
    }
    meta["gridded"] = gridded;
    io::write_file(ctx.out / "soliton.json", meta.dump(2) + "\n");
    write_manifest(ctx, "soliton");
    *ctx.log << "classification " << meta["classification"].dump() << (gridded ? ", gridded" : ", parametric only")
             << "\n";
    return meta;
}

inline EvolutionConfig read_evolution(Section s) {
    EvolutionConfig c;
    c.L = s.get<double>("L");
    c.n = s.get<std::size_t>("n");
    c.dt = s.get<double>("dt");
    c.T = s.get<double>("T");
    c.dealias_fraction = s.get<double>("dealias_fraction", c.dealias_fraction);
    c.snapshot_stride = s.get<std::size_t>("snapshot_stride", c.snapshot_stride);
    c.integrating_factor = s.get<bool>("integrating_factor", c.integrating_factor);
    s.finish();
    return c;
}

inline json cmd_evolve(const Context& ctx, const json& cfg) {
    Section root(cfg, "");
    const auto evo = read_evolution(root.sub("evolution"));
    ComplexProfile u0;
    if (root.has("soliton")) {
        const auto spec = io::spectrum_from_json(root.raw("soliton"));
        evo.validate();
        u0 = soliton_field(spec, 0.0, evo.grid());
    } else {
        auto spec = read_profile_spec(root.sub("profile"), ctx);
        evo.validate();
        u0 = build_profile(spec, evo.grid());
    }
    const bool project = root.get<bool>("remove_mean", false);
    root.finish();
    if (project) u0 = remove_mean(u0);
    const auto traj = evolve(u0, evo);
    io::write_trajectory(ctx.out / "trajectory", traj);
    const auto rep = conservation_report(traj);
    json summary{{"snapshots", traj.times.size()},
                 {"max_c_drift", rep.max_c_drift},
                 {"max_d_drift", rep.max_d_drift},
                 {"max_mean", rep.max_mean},
                 {"cfl", traj.cfl}};
    write_manifest(ctx, "evolve", {{"summary", summary}});
    *ctx.log << "c drift " << rep.max_c_drift << ", d drift " << rep.max_d_drift << "\n";
    return summary;
}

inline json cmd_asymptote(const Context& ctx, const json& cfg) {
    Section root(cfg, "");
    const auto table_path = resolve_path(ctx, root.get<std::string>("table"));
    std::vector<std::pair<double, double>> pts;
    if (root.has("points")) {
        for (const auto& p : root.raw("points")) {
            Section s(p, "points[]");
            pts.emplace_back(s.get<double>("x"), s.get<double>("t"));
            s.finish();
        }
    }
    if (root.has("rays")) {
        auto s = root.sub("rays");
        const auto ts = s.get<std::vector<double>>("t");
        const double a = s.get<double>("xi_min"), b = s.get<double>("xi_max");
        const auto m = s.get<std::size_t>("samples", 41);
        s.finish();
        for (double t : ts)
            for (std::size_t i = 0; i < m; ++i) pts.emplace_back(t * (a + (b - a) * i / std::max<std::size_t>(m - 1, 1)), t);
    }
    root.finish();
    if (pts.empty()) throw Error(ErrorKind::ConfigError, "no evaluation points: give points or rays");

    const auto table = io::read_table(table_path);
    const auto rf = ReflectionFunctional::from_table(table);
    std::string csv = "x,t,kappa0,A1,A2,phi1,phi2,re_u,im_u\n";
    for (auto [x, t] : pts) {
        const auto lo = leading_order_u(rf, table.d, x, t, ctx.convention);
        csv += io::num(x) + "," + io::num(t) + "," + io::num(lo.kappa0) + "," + io::num(lo.A1) + "," + io::num(lo.A2) +
               "," + io::num(lo.phi1.real()) + "," + io::num(lo.phi2.real()) + "," + io::num(lo.u.real()) + "," +
               io::num(lo.u.imag()) + "\n";
    }
    io::write_file(ctx.out / "prediction.csv", csv);
    json meta{{"convention", std::string(to_string(ctx.convention))},
              {"table", table_path.string()},
              {"table_hash", fnv1a(io::read_file(table_path))},
              {"points", pts.size()}};
    io::write_file(ctx.out / "prediction.json", meta.dump(2) + "\n");
    write_manifest(ctx, "asymptote");
    *ctx.log << "wrote " << pts.size() << " predictions\n";
    return meta;
}

inline json cmd_compare(const Context& ctx, const json& cfg) {
    Section root(cfg, "");
    const auto traj_dir = resolve_path(ctx, root.get<std::string>("trajectory"));
    const auto table_path = resolve_path(ctx, root.get<std::string>("table"));
    const double eps = root.get<double>("eps", 0.2);
    const double xi_max = root.get<double>("xi_max", 1.0);
    const double t_min = root.get<double>("t_min", 0.0);
    root.finish();
    if (!fs::exists(traj_dir / "trajectory.json"))
        throw Error(ErrorKind::ConfigError, "trajectory directory missing: " + traj_dir.string());
    if (!fs::exists(table_path)) throw Error(ErrorKind::ConfigError, "table missing: " + table_path.string());

    const auto traj = io::read_trajectory(traj_dir);
    const auto table = io::read_table(table_path);
    const auto rf = ReflectionFunctional::from_table(table);
    auto envelope = [&](double x, double t) {
        try {
            const auto lo = leading_order_u(rf, table.d, x, t);
            return lo.A1 + lo.A2;
        } catch (const Error&) {
            return 0.0;
        }
    };

    json report{{"eps", eps}, {"xi_max", xi_max}, {"right", json::array()}, {"left", json::object()}};
    const auto right = sector_scan(traj, Sector::right, eps, {xi_max, t_min, envelope});
    std::map<double, json> per_time;
    for (const auto& s : right.suprema)
        per_time[s.t] = {{"t", s.t},
                         {"max_scaled", std::sqrt(s.t) * s.sup},
                         {"peaks", 0},
                         {"min_ratio", nullptr},
                         {"max_ratio", nullptr},
                         {"worst_deviation", nullptr},
                         {"conventions", json::array()}};
    for (const auto& pk : right.peaks) {
        auto& e = per_time[pk.t];
        e["peaks"] = e["peaks"].get<int>() + 1;
        if (pk.predicted <= 0.0) continue;
        const double dev = std::abs(pk.ratio - 1.0);
        e["min_ratio"] = e["min_ratio"].is_null() ? pk.ratio : std::min(e["min_ratio"].get<double>(), pk.ratio);
        e["max_ratio"] = e["max_ratio"].is_null() ? pk.ratio : std::max(e["max_ratio"].get<double>(), pk.ratio);
        e["worst_deviation"] = e["worst_deviation"].is_null() ? dev : std::max(e["worst_deviation"].get<double>(), dev);
    }
    for (auto& [t, e] : per_time) {
        // both conventions at the middle of the window
        const double x = 0.5 * (eps + xi_max) * t;
        try {
            const auto a = leading_order_u(rf, table.d, x, t, PhaseConvention::as_printed);
            const auto b = leading_order_u(rf, table.d, x, t, PhaseConvention::real_phase);
            for (const auto* lo : {&a, &b})
                e["conventions"].push_back(
                    {{"convention", lo == &a ? "as_printed" : "real_phase"},
                     {"x", x},
                     {"abs_u", std::abs(lo->u)},
                     {"re_u", lo->u.real()},
                     {"im_u", lo->u.imag()},
                     {"phi1", {lo->phi1.real(), lo->phi1.imag()}},
                     {"phi2", {lo->phi2.real(), lo->phi2.imag()}},
                     {"phi2_alt", {lo->phi2_alt.real(), lo->phi2_alt.imag()}},
                     {"amplitude_correction", {lo->amplitude_correction1, lo->amplitude_correction2}}});
        } catch (const Error& err) {
            e["conventions_error"] = err.what();
        }
        report["right"].push_back(e);
    }
    try {
        const auto left = sector_scan(traj, Sector::left, eps, {xi_max, t_min, {}});
        json sups = json::array();
        for (const auto& s : left.suprema) sups.push_back({{"t", s.t}, {"sup", s.sup}});
        report["left"] = {{"suprema", sups},
                          {"decay_exponent", left.decay_exponent ? json(*left.decay_exponent) : json(nullptr)}};
    } catch (const Error& err) {
        if (err.kind() != ErrorKind::WindowEmpty) throw;
        report["left"] = {{"suprema", json::array()}, {"decay_exponent", nullptr}};
    }
    io::write_file(ctx.out / "report.json", report.dump(2) + "\n");
    write_manifest(ctx, "compare");
    *ctx.log << "compared " << per_time.size() << " snapshots\n";
    return report;
}

/// Runs one subcommand; returns the process exit code and writes error JSON on failure.
inline int run(const std::string& command, const fs::path& config_path, const fs::path& out,
               PhaseConvention convention, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
    Context ctx;
    ctx.out = out;
    ctx.convention = convention;
    ctx.log = &log;
    auto fail = [&](int code, const std::string& kind, const std::string& message) {
        json e{{"error", kind}, {"message", message}, {"exit_code", code}};
        err << e.dump() << "\n";
        try {
            io::write_file(out / "error.json", e.dump(2) + "\n");
        } catch (...) {
        }
        return code;
    };
    try {
        ctx.config_text = io::read_file(config_path);
        ctx.config_dir = config_path.parent_path();
        const auto cfg = io::parse_json(ctx.config_text, config_path.string());
        fs::create_directories(out);
        if (command == "scatter") cmd_scatter(ctx, cfg);
        else if (command == "soliton") cmd_soliton(ctx, cfg);
        else if (command == "evolve") cmd_evolve(ctx, cfg);
        else if (command == "asymptote") cmd_asymptote(ctx, cfg);
        else if (command == "compare") cmd_compare(ctx, cfg);
        else throw Error(ErrorKind::ConfigError, "unknown command " + command);
        return 0;
    } catch (const Error& e) {
        return fail(is_numerical(e.kind()) ? 1 : 2, std::string(to_string(e.kind())), e.what());
    } catch (const std::exception& e) {
        return fail(2, "Unexpected", e.what());
    }
}

} // namespace csp::cli
