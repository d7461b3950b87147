#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "pde.hpp"
#include "profile.hpp"
#include "scatter.hpp"
#include "soliton.hpp"

namespace csp::io {

using json = nlohmann::json;
namespace fs = std::filesystem;

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const fs::path& p, const std::string& text) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + p.string());
    out << text;
}

inline json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ConfigError, what + ": " + e.what());
    }
}

// profile: {x0, dx, n, re, im}

inline json profile_to_json(const ComplexProfile& p) {
    json re = json::array(), im = json::array();
    for (auto v : p.u) {
        re.push_back(v.real());
        im.push_back(v.imag());
    }
    return {{"x0", p.x0}, {"dx", p.dx}, {"n", p.n}, {"re", re}, {"im", im}};
}

inline ComplexProfile profile_from_json(const json& j) {
    try {
        const auto re = j.at("re").get<std::vector<double>>(), im = j.at("im").get<std::vector<double>>();
        const auto n = j.at("n").get<std::size_t>();
        if (re.size() != n || im.size() != n) throw Error(ErrorKind::InvalidData, "profile re/im length != n");
        std::vector<cd> u(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = {re[i], im[i]};
        return make_profile({j.at("x0").get<double>(), j.at("dx").get<double>(), n}, std::move(u));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ConfigError, std::string("profile record: ") + e.what());
    }
}

inline void write_profile(const fs::path& p, const ComplexProfile& prof) { write_file(p, profile_to_json(prof).dump()); }

inline ComplexProfile read_profile(const fs::path& p) { return profile_from_json(parse_json(read_file(p), p.string())); }

// scattering table: CSV + JSON sidecar

inline fs::path sidecar_of(const fs::path& csv) {
    auto s = csv;
    s.replace_extension(".json");
    return s;
}

inline void write_table(const fs::path& csv, const ScatteringTable& t) {
    std::string out = "k,re_a,im_a,re_b,im_b,re_r,im_r\n";
    for (const auto& e : t.entries)
        out += num(e.k) + "," + num(e.a.real()) + "," + num(e.a.imag()) + "," + num(e.b.real()) + "," +
               num(e.b.imag()) + "," + num(e.r.real()) + "," + num(e.r.imag()) + "\n";
    write_file(csv, out);
    json side{{"c", t.c},
              {"d_imag", t.d.imag()},
              {"unitarity_defect", t.unitarity_defect},
              {"k_min", t.k_min},
              {"k_max", t.k_max},
              {"spacing_rule", t.spacing_rule}};
    write_file(sidecar_of(csv), side.dump(2) + "\n");
}

inline ScatteringTable read_table(const fs::path& csv) {
    std::istringstream in(read_file(csv));
    std::string line;
    std::getline(in, line);
    if (line.rfind("k,re_a,im_a,re_b,im_b,re_r,im_r", 0) != 0)
        throw Error(ErrorKind::ConfigError, csv.string() + ": unexpected table header");
    ScatteringTable t;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> v;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) v.push_back(std::stod(cell));
        if (v.size() != 7) throw Error(ErrorKind::ConfigError, csv.string() + ": bad table row");
        t.entries.push_back({v[0], {v[1], v[2]}, {v[3], v[4]}, {v[5], v[6]}});
    }
    const auto side = parse_json(read_file(sidecar_of(csv)), sidecar_of(csv).string());
    try {
        t.c = side.at("c").get<double>();
        t.d = cd(0.0, side.at("d_imag").get<double>());
        t.unitarity_defect = side.at("unitarity_defect").get<double>();
        t.spacing_rule = side.value("spacing_rule", std::string{});
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ConfigError, std::string("table sidecar: ") + e.what());
    }
    if (!t.entries.empty()) {
        t.k_min = t.entries.front().k;
        t.k_max = t.entries.back().k;
    }
    return t;
}

// spectrum: {points: [{re_k, im_k, re_C, im_C}], d_imag}

inline DiscreteSpectrum spectrum_from_json(const json& j) {
    try {
        DiscreteSpectrum s;
        for (const auto& p : j.at("points"))
            s.points.push_back({{p.at("re_k").get<double>(), p.at("im_k").get<double>()},
                                {p.at("re_C").get<double>(), p.at("im_C").get<double>()}});
        s.d = cd(0.0, j.value("d_imag", 0.0));
        return s;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ConfigError, std::string("spectrum: ") + e.what());
    }
}

inline json spectrum_to_json(const DiscreteSpectrum& s) {
    json pts = json::array();
    for (const auto& p : s.points)
        pts.push_back({{"re_k", p.k.real()}, {"im_k", p.k.imag()}, {"re_C", p.C.real()}, {"im_C", p.C.imag()}});
    return {{"points", pts}, {"d_imag", s.d.imag()}};
}

// trajectory directory: snapshot_NNNNN.json, drift_log.csv, trajectory.json

inline void write_trajectory(const fs::path& dir, const Trajectory& traj) {
    fs::create_directories(dir);
    json index{{"times", traj.times}, {"files", json::array()}, {"cfl", traj.cfl}};
    std::string drift = "t,c,d_imag,mean_abs\n";
    for (std::size_t s = 0; s < traj.states.size(); ++s) {
        char name[32];
        std::snprintf(name, sizeof name, "snapshot_%05zu.json", s);
        write_profile(dir / name, traj.states[s]);
        index["files"].push_back(name);
        const auto& d = traj.drift_log[s];
        drift += num(d.t) + "," + num(d.c) + "," + num(d.d_imag) + "," + num(d.mean_abs) + "\n";
    }
    write_file(dir / "drift_log.csv", drift);
    write_file(dir / "trajectory.json", index.dump(2) + "\n");
}

inline Trajectory read_trajectory(const fs::path& dir) {
    const auto index = parse_json(read_file(dir / "trajectory.json"), (dir / "trajectory.json").string());
    Trajectory traj;
    try {
        traj.times = index.at("times").get<std::vector<double>>();
        traj.cfl = index.value("cfl", 0.0);
        for (const auto& f : index.at("files")) traj.states.push_back(read_profile(dir / f.get<std::string>()));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ConfigError, std::string("trajectory index: ") + e.what());
    }
    if (traj.times.size() != traj.states.size()) throw Error(ErrorKind::ConfigError, "trajectory index mismatch");
    for (std::size_t s = 0; s < traj.states.size(); ++s)
        traj.drift_log.push_back(
            detail::drift_of(traj.states[s], traj.times[s], traj.drift_log.empty() ? nullptr : &traj.drift_log.front()));
    return traj;
}

} // namespace csp::io
