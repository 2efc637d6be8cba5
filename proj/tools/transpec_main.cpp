// transpec: closed-loop spectra, robustness margins and time-domain
// simulation of coupled transport systems with delayed boundary feedback.
//
// Subcommands:
//   spectrum  - locate characteristic roots in a window (CSV + JSON)
//   sweep     - stability checks and probes over eta / eps grids (CSV + JSON)
//   margin    - diagonal-scaling and phase robustness margins (JSON)
//   simulate  - finite-difference closed-loop runs + decay-rate fit
//   replay    - re-run a previously emitted manifest
//
// Every command writes a <out>_manifest.json; replaying it reproduces the
// data files byte for byte.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "transpec/analysis.hpp"
#include "transpec/charfun.hpp"
#include "transpec/io.hpp"
#include "transpec/margin.hpp"
#include "transpec/roots.hpp"
#include "transpec/sim.hpp"
#include "transpec/version.hpp"

namespace {

using namespace transpec;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

/// "a,b,c" or "start:stop:step" -> list of doubles
std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        double start = 0, stop = 0, step = 0;
        if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 || step <= 0)
            throw CLI::ValidationError("range", "expected start:stop:step with step > 0");
        for (double v = start; v <= stop + 1e-12 * std::abs(step); v += step) out.push_back(v);
        return out;
    }
    std::string item;
    std::stringstream ss(text);
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    if (out.empty()) throw CLI::ValidationError("list", "no values in '" + text + "'");
    return out;
}

SearchWindow parse_window(const std::string& text, const SearchWindow& fallback) {
    if (text.empty()) return fallback;
    const std::vector<double> v = parse_list(text);
    if (v.size() != 4)
        throw CLI::ValidationError("window", "expected re_min,re_max,im_min,im_max");
    SearchWindow w = fallback;
    w.re_min = v[0];
    w.re_max = v[1];
    w.im_min = v[2];
    w.im_max = v[3];
    return w;
}

std::string default_out(const std::string& command) {
    const char* dir = std::getenv("TRANSPEC_OUTPUT_DIR");
    if (dir && *dir) return std::string(dir) + "/" + command;
    return command;
}

void ensure_parent_dir(const std::string& prefix) {
    const std::filesystem::path p(prefix);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
}

void emit_manifest(const std::string& out, const std::string& command,
                   const std::vector<std::string>& argv_no_out, const json& tolerances,
                   int threads, const std::vector<std::string>& outputs) {
    io::RunManifest m;
    m.command = command;
    m.parameters = json{{"argv", argv_no_out}, {"out", out}};
    m.tolerances = tolerances;
    m.version = kVersion;
    m.threads = threads;
    m.outputs = outputs;
    io::write_file(out + "_manifest.json", io::manifest_json(m).dump(2) + "\n");
}

/// args without the --out pair, for manifest replay under a fresh prefix
void parse_args(CLI::App& app, const std::vector<std::string>& args) {
    std::vector<std::string> rev(args.rbegin(), args.rend()); // CLI11 pops from the back
    app.parse(rev);
}

std::vector<std::string> strip_out_flag(const std::vector<std::string>& args) {
    std::vector<std::string> kept;
    for (size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--out" || args[i] == "-o") {
            ++i;
            continue;
        }
        kept.push_back(args[i]);
    }
    return kept;
}

struct CommonOpts {
    std::string out;
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--out,-o", c.out, "output file prefix (default: $TRANSPEC_OUTPUT_DIR/<cmd>)");
    cmd->add_option("--threads", c.threads, "worker threads for parallel stages")
        ->check(CLI::Range(1, 256));
}

int run_cli(const std::vector<std::string>& args);

// ---------------------------------------------------------------- spectrum

int cmd_spectrum(const std::vector<std::string>& args) {
    CLI::App app{"locate characteristic roots"};
    std::string variant, window_text;
    double eta = 0.0, eps = 0.0, tau = 1.0, kp = 0.0, k1 = 0.0, k2 = 0.0, tol = 1e-11;
    int boundary_samples = 96, max_depth = 36;
    CommonOpts c;
    app.add_option("--variant", variant, "characteristic function")
        ->required()
        ->check(CLI::IsMember({"open-inviscid", "prop-inviscid", "dyn-inviscid", "open-viscous",
                               "deadbeat-viscous", "deadbeat-inviscid-perturbed", "simpler",
                               "zform"}));
    app.add_option("--eta", eta, "viscosity");
    app.add_option("--eps", eps, "velocity perturbation");
    app.add_option("--tau", tau, "transport delay (inviscid variants)");
    app.add_option("--kp", kp, "proportional gain");
    app.add_option("--k1", k1, "instantaneous gain");
    app.add_option("--k2", k2, "delayed gain");
    app.add_option("--window", window_text, "re_min,re_max,im_min,im_max");
    app.add_option("--tol", tol, "root tolerance");
    app.add_option("--boundary-samples", boundary_samples, "initial samples per window edge");
    app.add_option("--max-depth", max_depth, "boundary refinement depth");
    add_common(&app, c);
    try {
        parse_args(app, args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kExitUsage : kExitOk;
    }
    if (c.out.empty()) c.out = default_out("spectrum");

    CharFn fn;
    SearchWindow fallback{-2.0, 2.0, -30.0, 30.0};
    try {
        if (variant == "open-inviscid") {
            fn = CharFn::open_inviscid(tau);
        } else if (variant == "prop-inviscid") {
            fn = CharFn::prop_inviscid(tau, kp);
        } else if (variant == "dyn-inviscid") {
            fn = CharFn::dyn_inviscid(tau, k1, k2);
        } else if (variant == "open-viscous") {
            fn = CharFn::open_viscous(eta);
            fallback = {-8.0, 1.0, -60.0, 60.0};
        } else if (variant == "deadbeat-viscous") {
            fn = CharFn::deadbeat_viscous(eta, eps);
            fallback = (eps == 0.0) ? SearchWindow{-8.0, 1.0, -60.0, 60.0}
                                    : SearchWindow{-2.0, 1.0, -40.0, 40.0};
        } else if (variant == "deadbeat-inviscid-perturbed") {
            fn = CharFn::deadbeat_perturbed(0.0, eps);
            fallback = {-2.0, 1.0, -40.0, 40.0};
        } else if (variant == "simpler") {
            fn = CharFn::simpler(eta);
            fallback = {-1.5, 0.5, -40.0, 40.0};
        } else {
            fn = CharFn::zform(eta);
            fallback = {-0.05, 3.8, -3.8, 3.8};
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    SearchWindow w;
    try {
        w = parse_window(window_text, fallback);
        w.boundary_samples = boundary_samples;
        w.max_depth = max_depth;
        w.validate();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    RootFindOptions opt;
    opt.tol = tol;
    opt.threads = c.threads;
    try {
        const Spectrum spec = find_roots(fn, w, opt);
        ensure_parent_dir(c.out);
        json j = io::spectrum_json(spec, variant);
        j["params"] = io::params_json(fn.params);
        j["sigma_hat"] = io::sigma_json(spectral_abscissa(spec));
        io::write_file(c.out + ".csv", io::spectrum_csv(spec));
        io::write_file(c.out + ".json", j.dump(2) + "\n");
        emit_manifest(c.out, "spectrum", strip_out_flag(args), json{{"tol", tol}}, c.threads,
                      {c.out + ".csv", c.out + ".json"});
        std::cout << "spectrum: " << spec.counted_total << " roots in window -> " << c.out
                  << ".csv\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "spectrum failed: " << e.what() << "\n";
        return kExitCheckFailed;
    }
}

// ------------------------------------------------------------------- sweep

int cmd_sweep(const std::vector<std::string>& args) {
    CLI::App app{"stability checks and conjecture probes"};
    std::string check, etas_text, eps_text, window_text;
    double eta = 0.1, delta = 0.1, eps_bound = 0.15, tol = 1e-11;
    CommonOpts c;
    app.add_option("--check", check, "theorem1 | conjecture1 | theorem2 | conjecture3")
        ->required()
        ->check(CLI::IsMember({"theorem1", "conjecture1", "theorem2", "conjecture3"}));
    app.add_option("--etas", etas_text, "viscosity grid (list or start:stop:step)");
    app.add_option("--eta", eta, "fixed viscosity (theorem2)");
    app.add_option("--eps", eps_text, "perturbation grid (theorem2)");
    app.add_option("--delta", delta, "margin slack");
    app.add_option("--eps-bound", eps_bound, "abscissa lower bound (conjecture3)");
    app.add_option("--window", window_text, "re_min,re_max,im_min,im_max");
    app.add_option("--tol", tol, "root tolerance");
    add_common(&app, c);
    try {
        parse_args(app, args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kExitUsage : kExitOk;
    }
    if (c.out.empty()) c.out = default_out("sweep");

    RootFindOptions opt;
    opt.tol = tol;
    opt.threads = c.threads;
    try {
        SweepResult sw;
        if (check == "theorem1") {
            const SearchWindow w = parse_window(window_text, {-8.0, 1.0, -200.0, 200.0});
            sw = theorem1_check(parse_list(etas_text), delta, w, opt);
        } else if (check == "conjecture1") {
            const SearchWindow w = parse_window(window_text, {-8.0, 1.0, -200.0, 200.0});
            sw = conjecture1_probe(parse_list(etas_text), delta, w, opt);
        } else if (check == "theorem2") {
            const SearchWindow w = parse_window(window_text, {-2.0, 1.0, -40.0, 40.0});
            sw = theorem2_sweep(eta, parse_list(eps_text), delta, w, opt);
        } else {
            const SearchWindow w = parse_window(window_text, {-1.5, 0.5, -40.0, 40.0});
            sw = conjecture3_probe(parse_list(etas_text), eps_bound, w, opt);
        }
        ensure_parent_dir(c.out);
        io::write_file(c.out + ".csv", io::sweep_csv(sw));
        io::write_file(c.out + ".json", io::sweep_json(sw).dump(2) + "\n");
        emit_manifest(c.out, "sweep", strip_out_flag(args),
                      json{{"tol", tol}, {"delta", delta}}, c.threads,
                      {c.out + ".csv", c.out + ".json"});
        int failed = 0;
        for (const auto& p : sw.points)
            if (!p.report.satisfied) ++failed;
        std::cout << "sweep " << check << ": " << sw.points.size() - failed << "/"
                  << sw.points.size() << " points satisfied -> " << c.out << ".csv\n";
        if (sw.probe) return kExitOk; // probes report, they do not fail the run
        return failed == 0 ? kExitOk : kExitCheckFailed;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "sweep failed: " << e.what() << "\n";
        return kExitCheckFailed;
    }
}

// ------------------------------------------------------------------ margin

int cmd_margin(const std::vector<std::string>& args) {
    CLI::App app{"delay-robustness margins"};
    double k1 = 0.0, k2 = 0.0;
    std::string matrix;
    bool have_k1 = false, have_k2 = false;
    CommonOpts c;
    auto* ok1 = app.add_option("--k1", k1, "instantaneous gain");
    auto* ok2 = app.add_option("--k2", k2, "delayed gain");
    app.add_option("--matrix", matrix,
                   "identity2..identity8, scalar-pair, or a CSV file of rows");
    add_common(&app, c);
    try {
        parse_args(app, args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kExitUsage : kExitOk;
    }
    if (c.out.empty()) c.out = default_out("margin");
    have_k1 = ok1->count() > 0;
    have_k2 = ok2->count() > 0;

    BoundaryMatrix K;
    json extra;
    try {
        if (!matrix.empty()) {
            if (matrix.rfind("identity", 0) == 0) {
                K = BoundaryMatrix::identity(std::stoi(matrix.substr(8)));
            } else if (matrix == "scalar-pair") {
                K = BoundaryMatrix::scalar_pair();
            } else {
                // CSV file: one row per line
                std::stringstream ss(io::read_file(matrix));
                std::string line;
                std::vector<std::vector<double>> rows;
                while (std::getline(ss, line))
                    if (!line.empty()) rows.push_back(parse_list(line));
                K.n = static_cast<int>(rows.size());
                for (const auto& r : rows) {
                    if (static_cast<int>(r.size()) != K.n)
                        throw std::invalid_argument("matrix must be square");
                    K.a.insert(K.a.end(), r.begin(), r.end());
                }
            }
        } else if (have_k1 || have_k2) {
            K = BoundaryMatrix::feedback_loop(k1, k2);
            extra["closed_form"] = rho2_closed_form(k1, k2);
        } else {
            std::cerr << "error: provide --k1/--k2 or --matrix\n";
            return kExitUsage;
        }
        K.validate();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        const MarginResult m = margin_of(K);
        ensure_parent_dir(c.out);
        json j = io::margin_json(m);
        j["n"] = K.n;
        for (auto& [key, val] : extra.items()) j[key] = val;
        io::write_file(c.out + ".json", j.dump(2) + "\n");
        emit_manifest(c.out, "margin", strip_out_flag(args), json::object(), c.threads,
                      {c.out + ".json"});
        std::cout << "margin: rho2 = " << m.rho2 << ", rho_bar = " << m.rho_bar << " -> "
                  << c.out << ".json\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "margin failed: " << e.what() << "\n";
        return kExitCheckFailed;
    }
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const std::vector<std::string>& args) {
    CLI::App app{"finite-difference closed-loop simulation"};
    std::string system, controller = "none", ic = "gaussian";
    double eta = 0.0, eps = 0.0, kp = 0.0, k1 = 0.0, k2 = 0.0;
    double t_end = 20.0, cfl = 1.0, t_skip = 5.0;
    int n = 128;
    unsigned seed = 1;
    CommonOpts c;
    app.add_option("--system", system, "inviscid-pair | viscous-pair | simpler-pair")
        ->required()
        ->check(CLI::IsMember({"inviscid-pair", "viscous-pair", "simpler-pair"}));
    app.add_option("--controller", controller, "none | proportional | dynamic | deadbeat")
        ->check(CLI::IsMember({"none", "proportional", "dynamic", "deadbeat"}));
    app.add_option("--eta", eta, "viscosity");
    app.add_option("--eps", eps, "velocity perturbation");
    app.add_option("--kp", kp, "proportional gain");
    app.add_option("--k1", k1, "instantaneous gain");
    app.add_option("--k2", k2, "delayed gain");
    app.add_option("--n", n, "grid cells")->check(CLI::Range(32, 1 << 20));
    app.add_option("--cfl", cfl, "advective cfl in (0, 1]");
    app.add_option("--t-end", t_end, "simulated time span");
    app.add_option("--t-skip", t_skip, "transient skipped by the rate fit");
    app.add_option("--ic", ic, "gaussian | random | constant")
        ->check(CLI::IsMember({"gaussian", "random", "constant"}));
    app.add_option("--seed", seed, "random initial-condition seed");
    add_common(&app, c);
    try {
        parse_args(app, args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kExitUsage : kExitOk;
    }
    if (c.out.empty()) c.out = default_out("simulate");

    ClosedLoopConfig cfg;
    try {
        cfg.system = (system == "inviscid-pair")  ? SystemKind::InviscidPair
                     : (system == "viscous-pair") ? SystemKind::ViscousPair
                                                  : SystemKind::SimplerPair;
        cfg.controller = (controller == "none")           ? ControllerKind::None
                         : (controller == "proportional") ? ControllerKind::Proportional
                         : (controller == "dynamic")      ? ControllerKind::DynamicDelayed
                                                          : ControllerKind::DeadBeat;
        cfg.ic = (ic == "gaussian") ? InitialCondition::GaussianBump
                 : (ic == "random") ? InitialCondition::RandomSmooth
                                    : InitialCondition::ConstantOne;
        cfg.params.set_viscosity(eta).set_perturbation(eps).set_gains(k1, k2).set_proportional(
            kp);
        cfg.seed = seed;
        cfg.t_end = t_end;
        cfg.n_cells = n;
        cfg.cfl_request = cfl;
        cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        const Trajectory traj = run(cfg);
        const RateEstimate rate = estimate_decay_rate(traj, t_skip);
        ensure_parent_dir(c.out);
        io::write_file(c.out + "_trajectory.csv", io::trajectory_csv(traj));
        json j = io::rate_json(rate);
        j["dt"] = traj.dt;
        j["aborted"] = traj.aborted;
        if (traj.aborted) j["abort_reason"] = traj.abort_reason;
        io::write_file(c.out + "_rate.json", j.dump(2) + "\n");
        emit_manifest(c.out, "simulate", strip_out_flag(args), json{{"t_skip", t_skip}},
                      c.threads, {c.out + "_trajectory.csv", c.out + "_rate.json"});
        std::cout << "simulate: " << traj.times.size() << " samples";
        if (rate.ok) std::cout << ", rate " << rate.rate;
        std::cout << " -> " << c.out << "_trajectory.csv\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "simulate failed: " << e.what() << "\n";
        return kExitCheckFailed;
    }
}

// ------------------------------------------------------------------ replay

int cmd_replay(const std::vector<std::string>& args) {
    CLI::App app{"re-run a manifest"};
    std::string manifest_path, out;
    app.add_option("manifest", manifest_path, "path to a *_manifest.json")->required();
    app.add_option("--out,-o", out, "fresh output prefix (default: the recorded one)");
    try {
        parse_args(app, args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kExitUsage : kExitOk;
    }
    try {
        const io::RunManifest m =
            io::manifest_from_json(json::parse(io::read_file(manifest_path)));
        std::vector<std::string> argv{m.command};
        for (const auto& a : m.parameters.at("argv")) argv.push_back(a);
        argv.push_back("--out");
        argv.push_back(out.empty() ? m.parameters.at("out").get<std::string>() : out);
        return run_cli(argv);
    } catch (const std::exception& e) {
        std::cerr << "replay failed: " << e.what() << "\n";
        return kExitUsage;
    }
}

int run_cli(const std::vector<std::string>& args) {
    if (args.empty()) {
        std::cerr << "usage: transpec <spectrum|sweep|margin|simulate|replay> [options]\n"
                  << "       transpec --version\n";
        return kExitUsage;
    }
    const std::string cmd = args[0];
    const std::vector<std::string> rest(args.begin() + 1, args.end());
    if (cmd == "--version" || cmd == "version") {
        std::cout << "transpec " << kVersion << "\n";
        return kExitOk;
    }
    if (cmd == "spectrum") return cmd_spectrum(rest);
    if (cmd == "sweep") return cmd_sweep(rest);
    if (cmd == "margin") return cmd_margin(rest);
    if (cmd == "simulate") return cmd_simulate(rest);
    if (cmd == "replay") return cmd_replay(rest);
    std::cerr << "unknown command '" << cmd << "'\n";
    return kExitUsage;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return run_cli(args);
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << "\n";
        return kExitCheckFailed;
    }
}
