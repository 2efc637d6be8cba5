#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "transpec/analysis.hpp"
#include "transpec/margin.hpp"
#include "transpec/roots.hpp"
#include "transpec/sim.hpp"

namespace transpec::io {

using nlohmann::json;

/// Shortest round-trip decimal form of a double; identical doubles always
/// serialize to identical text, which is what the determinism guarantee
/// rides on.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline json window_json(const SearchWindow& w) {
    return json{{"re_min", w.re_min}, {"re_max", w.re_max},
                {"im_min", w.im_min}, {"im_max", w.im_max},
                {"max_depth", w.max_depth}, {"boundary_samples", w.boundary_samples}};
}

inline SearchWindow window_from_json(const json& j) {
    SearchWindow w;
    w.re_min = j.at("re_min");
    w.re_max = j.at("re_max");
    w.im_min = j.at("im_min");
    w.im_max = j.at("im_max");
    if (j.contains("max_depth")) w.max_depth = j.at("max_depth");
    if (j.contains("boundary_samples")) w.boundary_samples = j.at("boundary_samples");
    return w;
}

inline json params_json(const SystemParams& p) {
    return json{{"velocity", p.velocity}, {"delay", p.delay}, {"viscosity", p.viscosity},
                {"eps", p.velocity_perturbation}, {"k1", p.k1}, {"k2", p.k2}, {"kp", p.kp}};
}

/// sigma serialized as null plus a finite flag; -inf never reaches the file.
inline json sigma_json(const SpectralAbscissa& s) {
    json j;
    j["finite"] = s.finite;
    if (s.finite) {
        j["value"] = s.sigma;
        j["attained_at_re"] = s.attained_at.real();
        j["attained_at_im"] = s.attained_at.imag();
    } else {
        j["value"] = nullptr;
    }
    return j;
}

inline json spectrum_json(const Spectrum& spec, const std::string& variant) {
    json roots = json::array();
    for (const auto& r : spec.roots)
        roots.push_back(json{{"re", r.s.real()},
                             {"im", r.s.imag()},
                             {"residual", r.residual},
                             {"multiplicity", r.multiplicity}});
    json unresolved = json::array();
    for (const auto& u : spec.unresolved)
        unresolved.push_back(json{{"box", window_json(u.box)}, {"count", u.count}});
    return json{{"variant", variant},
                {"window", window_json(spec.window)},
                {"counted_total", spec.counted_total},
                {"roots", roots},
                {"unresolved", unresolved}};
}

inline std::string spectrum_csv(const Spectrum& spec) {
    std::string out = "re,im,residual,multiplicity\n";
    for (const auto& r : spec.roots)
        out += fmt(r.s.real()) + "," + fmt(r.s.imag()) + "," + fmt(r.residual) + "," +
               std::to_string(r.multiplicity) + "\n";
    return out;
}

inline json report_json(const StabilityReport& rep) {
    json j;
    j["variant"] = variant_name(rep.variant);
    j["params"] = params_json(rep.params);
    j["window"] = window_json(rep.window);
    j["sigma_hat"] = sigma_json(rep.sigma);
    j["margin_target"] = rep.margin_target;
    if (rep.probe) {
        j["probe"] = true;
        j["band_low"] = std::isfinite(rep.band_low) ? json(rep.band_low) : json(nullptr);
    }
    j["satisfied"] = rep.satisfied;
    j["roots_in_rhp"] = rep.roots_in_rhp;
    j["roots_found"] = rep.roots_found;
    j["window_scoped"] = true;
    if (!rep.error.empty()) j["error"] = rep.error;
    return j;
}

inline json sweep_json(const SweepResult& sw) {
    json pts = json::array();
    for (const auto& p : sw.points) {
        json j = report_json(p.report);
        j["eta"] = p.eta;
        j["eps"] = p.eps;
        pts.push_back(std::move(j));
    }
    return json{{"check", sw.check},
                {"probe", sw.probe},
                {"delta", sw.delta},
                {"window", window_json(sw.window)},
                {"sigma_monotonicity", sw.sigma_monotonicity},
                {"points", pts}};
}

/// Sweep table; sigma_hat is left empty at points where the window holds no
/// roots (the -infinity sentinel never appears as a float).
inline std::string sweep_csv(const SweepResult& sw) {
    std::string out = "eta,eps,sigma_hat,margin,satisfied\n";
    for (const auto& p : sw.points) {
        out += fmt(p.eta) + "," + fmt(p.eps) + ",";
        if (p.report.sigma.finite) out += fmt(p.report.sigma.sigma);
        out += "," + fmt(p.report.margin_target) + "," + (p.report.satisfied ? "1" : "0") + "\n";
    }
    return out;
}

inline json margin_json(const MarginResult& m) {
    return json{{"rho2", m.rho2},
                {"rho_bar", m.rho_bar},
                {"optimal_scaling", m.optimal_scaling},
                {"optimal_phases", m.optimal_phases},
                {"degenerate", m.degenerate},
                {"convergence_warn", m.convergence_warn},
                {"tolerance", m.tolerance}};
}

inline std::string trajectory_csv(const Trajectory& t) {
    std::string out = "t,Y,energy,max_abs_1,max_abs_2\n";
    out.reserve(t.times.size() * 48);
    for (size_t i = 0; i < t.times.size(); ++i)
        out += fmt(t.times[i]) + "," + fmt(t.output[i]) + "," + fmt(t.energy[i]) + "," +
               fmt(t.max_abs_1[i]) + "," + fmt(t.max_abs_2[i]) + "\n";
    return out;
}

inline json rate_json(const RateEstimate& r) {
    json j;
    j["ok"] = r.ok;
    j["rate"] = r.ok ? json(r.rate) : json(nullptr);
    j["r2"] = r.ok ? json(r.r2) : json(nullptr);
    j["peaks"] = r.peaks;
    j["error"] = r.error.empty() ? json(nullptr) : json(r.error);
    return j;
}

/// Every command emits one of these next to its outputs; feeding it back
/// through `replay` must reproduce the outputs byte for byte.
struct RunManifest {
    std::string command;
    json parameters;     // resolved flag set
    json tolerances;
    std::string version;
    int threads = 1;
    std::vector<std::string> outputs;
};

inline json manifest_json(const RunManifest& m) {
    return json{{"command", m.command},   {"parameters", m.parameters},
                {"tolerances", m.tolerances}, {"version", m.version},
                {"threads", m.threads},   {"outputs", m.outputs}};
}

inline RunManifest manifest_from_json(const json& j) {
    RunManifest m;
    m.command = j.at("command");
    m.parameters = j.at("parameters");
    m.tolerances = j.value("tolerances", json::object());
    m.version = j.value("version", "");
    m.threads = j.value("threads", 1);
    for (const auto& o : j.value("outputs", json::array())) m.outputs.push_back(o);
    return m;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path);
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

} // namespace transpec::io
