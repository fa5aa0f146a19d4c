// cli.cpp — Command-line front end

#include "parament/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <set>

#include "CLI11.hpp"

#include "parament/fit.hpp"
#include "parament/io.hpp"
#include "parament/oracle.hpp"
#include "parament/parallel.hpp"
#include "parament/sweep.hpp"

namespace parament {

namespace {

// Values come from flags first, then the JSON config file, then defaults. Every
// resolved value is echoed into `resolved`, which is embedded in each output file
// and can be fed back through --config.
class Settings {
public:
    Settings(std::string command, const std::string& config_path) : command_(std::move(command))
    {
        if (!config_path.empty()) {
            file_ = read_json_file(config_path);
            if (!file_.is_object()) throw std::invalid_argument("config file must hold a JSON object");
            if (file_.contains("command") && file_["command"] != command_) {
                throw std::invalid_argument("config file is for command '" +
                                            file_["command"].get<std::string>() + "'");
            }
        }
        resolved["command"] = command_;
    }

    template <class T>
    T get(const std::string& key, const std::optional<T>& flag, const T& fallback, bool echo = true)
    {
        used_.insert(key);
        T v = fallback;
        if (flag) {
            v = *flag;
        } else if (file_.contains(key)) {
            try {
                v = file_[key].get<T>();
            } catch (const Json::exception&) {
                throw std::invalid_argument("config key '" + key + "' has the wrong type");
            }
        }
        if (echo) resolved[key] = v;
        return v;
    }

    // Rejects config keys no option consumed (usually typos).
    void check_unused() const
    {
        for (const auto& [key, value] : file_.items()) {
            if (key != "command" && !used_.count(key)) {
                throw std::invalid_argument("unknown config key '" + key + "'");
            }
        }
    }

    Json resolved;

private:
    std::string command_;
    Json file_ = Json::object();
    std::set<std::string> used_;
};

struct CommonFlags {
    std::optional<double> quality, n_thermal, epsilon, noise_width, delta;
    std::optional<double> rtol, atol, sample_interval, horizon, eps_on;
    std::optional<unsigned> threads;
    std::string config;
    std::string plot_script;
};

void add_common(CLI::App* app, CommonFlags& f, bool physics = true)
{
    if (physics) {
        app->add_option("--Q", f.quality, "quality factor omega / gamma (default 5000)");
        app->add_option("--nT", f.n_thermal, "thermal boson number (default 10)");
        app->add_option("--eps", f.epsilon, "pump amplitude epsilon (default 1.6e-2)");
        app->add_option("--D", f.noise_width, "pump phase diffusion D / omega (default 0)");
        app->add_option("--Delta", f.delta, "detuning (Omega - 2 omega) / omega (default 0)");
        app->add_option("--rtol", f.rtol, "integrator relative tolerance (default 1e-9)");
        app->add_option("--atol", f.atol, "integrator absolute tolerance (default 1e-12)");
        app->add_option("--sample-interval", f.sample_interval, "time between stored samples");
        app->add_option("--horizon", f.horizon, "longest simulated time (default 100 / gamma)");
        app->add_option("--eps-on", f.eps_on, "E_N floor counted as entangled (default 1e-10)");
    }
    app->add_option("--threads", f.threads, "worker threads (default: all cores)");
    app->add_option("--config", f.config, "JSON file with default values; flags take precedence");
}

SystemParams resolve_params(Settings& s, const CommonFlags& f)
{
    const SystemParams d = SystemParams::from_quality(5000.0, 1.6e-2, 10.0);
    SystemParams p;
    p.set_quality(s.get("Q", f.quality, d.quality));
    p.n_thermal = s.get("nT", f.n_thermal, d.n_thermal);
    p.epsilon = s.get("eps", f.epsilon, d.epsilon);
    p.noise_width = s.get("D", f.noise_width, d.noise_width);
    p.delta = s.get("Delta", f.delta, d.delta);
    p.validate();
    return p;
}

RunOptions resolve_run(Settings& s, const CommonFlags& f)
{
    RunOptions r;
    r.controls.rel_tol = s.get("rtol", f.rtol, r.controls.rel_tol);
    r.controls.abs_tol = s.get("atol", f.atol, r.controls.abs_tol);
    r.controls.sample_interval = s.get("sample_interval", f.sample_interval, 0.0);
    r.analysis.horizon = s.get("horizon", f.horizon, 0.0);
    r.analysis.eps_on = s.get("eps_on", f.eps_on, r.analysis.eps_on);
    // thread count never changes results, so it is not echoed
    r.threads = s.get<unsigned>("threads", f.threads, 0u, false);
    if (!(r.controls.rel_tol > 0.0) || !(r.controls.abs_tol > 0.0)) {
        throw std::invalid_argument("--rtol and --atol must be positive");
    }
    if (!(r.analysis.eps_on > 0.0)) throw std::invalid_argument("--eps-on must be positive");
    return r;
}

void emit_plot_script(const std::string& path, const std::string& body, std::ostream& out)
{
    if (path.empty()) return;
    write_file(path, [&](std::ostream& o) {
        o << "#!/usr/bin/env python3\n"
             "# Generated by parament " << version() << ". Needs numpy and matplotlib.\n"
             "import sys\n"
             "import numpy as np\n"
             "import matplotlib\n"
             "matplotlib.use('Agg')\n"
             "import matplotlib.pyplot as plt\n\n\n"
             "def load(path):\n"
             "    with open(path) as fh:\n"
             "        rows = [line for line in fh if not line.startswith('#')]\n"
             "    return np.genfromtxt(rows, delimiter=',', names=True, dtype=None, encoding='utf-8')\n\n\n"
          << body;
    });
    out << "wrote " << path << '\n';
}

std::string py_quote(const std::string& s)
{
    std::string q = "'";
    for (char c : s) {
        if (c == '\\' || c == '\'') q += '\\';
        q += c;
    }
    return q + "'";
}

// ---------------------------------------------------------------- simulate

struct SimulateFlags {
    CommonFlags common;
    std::optional<double> t_end;
    std::string out{"simulate"};
};

int command_simulate(const SimulateFlags& f, std::ostream& out)
{
    Settings s("simulate", f.common.config);
    const SystemParams p = resolve_params(s, f.common);
    RunOptions run = resolve_run(s, f.common);
    const double t_end = s.get("t_end", f.t_end, 0.0);
    s.check_unused();
    if (t_end < 0.0) throw std::invalid_argument("--t-end must be >= 0");

    // Fixed horizon when --t-end is given, otherwise stop once the outcome is decided.
    std::optional<EntanglementRun> result;
    if (t_end > 0.0) {
        Trajectory traj = integrate(p, t_end, run.controls);
        AnalysisOptions a = run.analysis;
        a.horizon = t_end;
        const EntanglementReport rep = analyze_trajectory(traj, a);
        result.emplace(EntanglementRun{std::move(traj), rep});
    } else {
        result.emplace(run_entanglement(p, run.controls, run.analysis));
    }

    const std::string csv = f.out + ".csv", json = f.out + ".json";
    write_file(csv, [&](std::ostream& o) { write_series_csv(o, result->trajectory, run.analysis, s.resolved); });
    write_file(json, [&](std::ostream& o) {
        Json doc = to_json(result->report);
        doc["params"] = to_json(p);
        doc["steps"] = {{"accepted", result->trajectory.accepted_steps},
                        {"rejected", result->trajectory.rejected_steps}};
        doc["status"] = to_string(result->trajectory.status);
        write_json(o, doc, s.resolved);
    });
    out << "wrote " << csv << " and " << json << '\n';

    const EntanglementReport& r = result->report;
    out << "onset " << (r.t_onset ? format_number(*r.t_onset) : "none") << ", tau "
        << format_number(r.tau) << ", E_N max " << format_number(r.e_n_max);
    if (r.e_n_steady) out << ", E_N steady " << format_number(*r.e_n_steady);
    if (!r.flags.to_string().empty()) out << " [" << r.flags.to_string() << "]";
    out << '\n';

    emit_plot_script(f.common.plot_script,
                     "path = sys.argv[1] if len(sys.argv) > 1 else " + py_quote(csv) + "\n"
                     "d = load(path)\n"
                     "fig, ax = plt.subplots(figsize=(6, 4))\n"
                     "ax.plot(d['t_omega'], d['E_N'])\n"
                     "ax.set_xlabel(r'$\\omega t$')\n"
                     "ax.set_ylabel(r'$E_N$')\n"
                     "fig.tight_layout()\n"
                     "fig.savefig(path.rsplit('.', 1)[0] + '.png', dpi=150)\n",
                     out);
    return exit_ok;
}

// ---------------------------------------------------------------- sweep

struct SweepFlags {
    CommonFlags common;
    std::vector<std::string> grid;
    std::vector<std::string> outputs;
    std::string out{"sweep.csv"};
};

int command_sweep(const SweepFlags& f, std::ostream& out)
{
    Settings s("sweep", f.common.config);
    SweepSpec spec;
    spec.fixed = resolve_params(s, f.common);
    const RunOptions run = resolve_run(s, f.common);
    const auto grid = s.get<std::vector<std::string>>(
        "grid", f.grid.empty() ? std::nullopt : std::optional(f.grid), {});
    spec.outputs = s.get<std::vector<std::string>>(
        "outputs", f.outputs.empty() ? std::nullopt : std::optional(f.outputs), {});
    s.check_unused();
    if (grid.empty()) throw std::invalid_argument("sweep needs --grid");
    for (const std::string& g : grid) spec.axes.push_back(Axis::parse(g));
    spec.validate();

    const std::vector<SweepRow> rows = run_grid(spec, run);
    write_file(f.out, [&](std::ostream& o) { write_sweep_csv(o, spec, rows, s.resolved); });

    std::size_t failed = 0;
    for (const SweepRow& r : rows) failed += r.failed();
    out << "wrote " << f.out << " (" << rows.size() << " cells";
    if (failed) out << ", " << failed << " failed";
    out << ")\n";

    std::string body = "path = sys.argv[1] if len(sys.argv) > 1 else " + py_quote(f.out) + "\n"
                       "d = load(path)\n";
    const std::string x = spec.axes[0].name;
    if (spec.axes.size() == 2) {
        const std::string y = spec.axes[1].name;
        body += "x = np.unique(d[" + py_quote(x) + "])\n"
                "y = np.unique(d[" + py_quote(y) + "])\n"
                "tau = np.array(d['tau'], dtype=float).reshape(len(x), len(y))\n"
                "fig, ax = plt.subplots(figsize=(6, 4.5))\n"
                "m = ax.pcolormesh(x, y, tau.T, shading='nearest')\n"
                "fig.colorbar(m, ax=ax, label=r'$\\omega\\tau$')\n";
        if (spec.axes[0].spacing == Spacing::log) body += "ax.set_xscale('log')\n";
        if (spec.axes[1].spacing == Spacing::log) body += "ax.set_yscale('log')\n";
        body += "ax.set_xlabel(" + py_quote(x) + ")\nax.set_ylabel(" + py_quote(y) + ")\n";
    } else {
        body += "fig, ax = plt.subplots(figsize=(6, 4))\n"
                "for col in ('tau', 'e_n_max'):\n"
                "    if col in d.dtype.names:\n"
                "        ax.plot(d[" + py_quote(x) + "], np.array(d[col], dtype=float), 'o-', label=col)\n"
                "ax.legend()\n"
                "ax.set_xlabel(" + py_quote(x) + ")\n";
        if (spec.axes[0].spacing == Spacing::log) body += "ax.set_xscale('log')\n";
    }
    body += "fig.tight_layout()\nfig.savefig(path.rsplit('.', 1)[0] + '.png', dpi=150)\n";
    emit_plot_script(f.common.plot_script, body, out);
    return exit_ok;
}

// ---------------------------------------------------------------- boundary

struct BoundaryFlags {
    CommonFlags common;
    std::optional<std::string> axis;
    std::optional<double> lo, hi, tol;
    std::optional<std::string> scan;
    std::string out{"boundary.json"};
    std::string csv;
};

std::pair<double, double> default_bracket(const std::string& axis, const SystemParams& p)
{
    if (axis == "nT") return {1e-3, std::max(1.0, p.quality * p.epsilon / 2.0)};
    if (axis == "eps") {
        const double eps0 = 4.0 * p.n_thermal / p.quality;
        return {0.5 * eps0, std::max(0.2, 8.0 * eps0)};
    }
    throw std::invalid_argument("axis '" + axis + "' has no default bracket; pass --lo and --hi");
}

int command_boundary(const BoundaryFlags& f, std::ostream& out)
{
    Settings s("boundary", f.common.config);
    const SystemParams base = resolve_params(s, f.common);
    const RunOptions run = resolve_run(s, f.common);
    const std::string axis = s.get<std::string>("axis", f.axis, "nT");
    const double tol = s.get("tol", f.tol, 1e-3);
    const std::string scan_text = s.get<std::string>("scan", f.scan, "");
    std::optional<double> lo_set = f.lo, hi_set = f.hi;
    if (!lo_set) lo_set = s.get<double>("lo", std::nullopt, std::nan(""), false);
    if (!hi_set) hi_set = s.get<double>("hi", std::nullopt, std::nan(""), false);
    s.check_unused();
    if (!is_parameter_name(axis)) throw std::invalid_argument("--axis must be one of Q, nT, eps, D, Delta");

    std::vector<SystemParams> points{base};
    std::string scan_name;
    if (!scan_text.empty()) {
        const Axis scan = Axis::parse(scan_text);
        if (scan.name == axis) throw std::invalid_argument("--scan axis must differ from --axis");
        if (!is_parameter_name(scan.name)) throw std::invalid_argument("unknown --scan parameter");
        scan_name = scan.name;
        points.clear();
        for (double v : scan.values()) {
            SystemParams p = base;
            set_parameter(p, scan.name, v);
            p.validate();
            points.push_back(p);
        }
    }

    std::vector<std::pair<double, double>> brackets;
    for (const SystemParams& p : points) {
        auto b = std::isnan(*lo_set) || std::isnan(*hi_set) ? default_bracket(axis, p)
                                                             : std::pair<double, double>{};
        if (!std::isnan(*lo_set)) b.first = *lo_set;
        if (!std::isnan(*hi_set)) b.second = *hi_set;
        brackets.push_back(b);
    }
    s.resolved["lo"] = std::isnan(*lo_set) ? Json(nullptr) : Json(*lo_set);
    s.resolved["hi"] = std::isnan(*hi_set) ? Json(nullptr) : Json(*hi_set);

    std::vector<BoundaryResult> results(points.size());
    RunOptions inner = run;
    inner.threads = 1;
    parallel_for(points.size(), run.threads, [&](std::size_t i) {
        results[i] = find_boundary(points[i], axis, brackets[i].first, brackets[i].second, tol, inner);
    });

    Json list = Json::array();
    std::vector<BoundarySample> samples;
    for (std::size_t i = 0; i < points.size(); ++i) {
        Json j = to_json(results[i]);
        j["params"] = to_json(points[i]);
        if (axis == "nT" && points[i].epsilon > 0.0 && std::isfinite(points[i].quality)) {
            try {
                j["formula"] = eval_boundary(points[i].noise_width, points[i].epsilon, points[i].quality);
            } catch (const std::domain_error&) {
                j["formula"] = nullptr;
            }
            samples.push_back({points[i].noise_width, points[i].epsilon, points[i].quality,
                               results[i].value});
        }
        list.push_back(j);
        out << axis << " boundary";
        if (!scan_name.empty()) out << " at " << scan_name << " = " << format_number(get_parameter(points[i], scan_name));
        out << ": " << format_number(results[i].value) << (results[i].confirmed ? "" : " (unconfirmed)") << '\n';
    }
    write_file(f.out, [&](std::ostream& o) { write_json(o, Json{{"points", list}}, s.resolved); });
    out << "wrote " << f.out << '\n';

    if (!f.csv.empty()) {
        if (axis != "nT") throw std::invalid_argument("--csv writes n_T0 samples and needs --axis nT");
        write_file(f.csv, [&](std::ostream& o) { write_boundary_csv(o, samples, s.resolved); });
        out << "wrote " << f.csv << '\n';
        emit_plot_script(f.common.plot_script,
                         "path = sys.argv[1] if len(sys.argv) > 1 else " + py_quote(f.csv) + "\n"
                         "d = load(path)\n"
                         "fig, ax = plt.subplots(figsize=(6, 4))\n"
                         "ax.semilogx(d['D'], d['nT0'], 'o-')\n"
                         "ax.set_xlabel(r'$D/\\omega$')\n"
                         "ax.set_ylabel(r'$n_{T0}$')\n"
                         "fig.tight_layout()\n"
                         "fig.savefig(path.rsplit('.', 1)[0] + '.png', dpi=150)\n",
                         out);
    } else if (!f.common.plot_script.empty()) {
        throw std::invalid_argument("--emit-plot-script for boundary needs --csv");
    }
    return exit_ok;
}

// ---------------------------------------------------------------- fit

struct FitFlags {
    CommonFlags common;
    std::optional<std::string> input;
    std::optional<std::string> weights;
    std::string out{"fit.json"};
};

int command_fit(const FitFlags& f, std::ostream& out)
{
    Settings s("fit", f.common.config);
    const std::string input = s.get<std::string>("input", f.input, "");
    const FitWeights w = parse_fit_weights(s.get<std::string>("weights", f.weights, "uniform"));
    s.check_unused();
    if (input.empty()) throw std::invalid_argument("fit needs --input");

    const FitReport rep = fit_boundary(read_boundary_file(input), w);
    write_file(f.out, [&](std::ostream& o) { write_json(o, to_json(rep), s.resolved); });
    out << "fit status " << rep.status;
    if (rep.constants) {
        out << ": a1 " << format_number(rep.constants->a1) << ", b1 " << format_number(rep.constants->b1)
            << ", a2 " << format_number(rep.constants->a2) << ", b2 " << format_number(rep.constants->b2);
    }
    out << "; max relative residual " << format_number(rep.max_relative) << '\n';
    out << "wrote " << f.out << '\n';
    return exit_ok;
}

// ---------------------------------------------------------------- oracle

struct OracleFlags {
    CommonFlags common;
    std::optional<std::size_t> paths;
    std::optional<double> dt, t_end;
    std::optional<std::uint64_t> seed;
    std::optional<int> checkpoints;
    std::string out{"oracle.json"};
};

int command_oracle(const OracleFlags& f, std::ostream& out)
{
    Settings s("oracle", f.common.config);
    SystemParams p = resolve_params(s, f.common);
    const RunOptions run = resolve_run(s, f.common);
    OracleOptions opt;
    opt.n_paths = s.get<std::size_t>("paths", f.paths, 10000);
    opt.dt = s.get("dt", f.dt, 0.0);
    opt.t_end = s.get("t_end", f.t_end, 2e4);
    opt.master_seed = s.get<std::uint64_t>("seed", f.seed, opt.master_seed);
    const int checkpoints = s.get("checkpoints", f.checkpoints, 10);
    s.check_unused();
    opt.threads = run.threads;
    if (checkpoints < 1) throw std::invalid_argument("--checkpoints must be >= 1");
    if (opt.n_paths < 1000) throw std::invalid_argument("--paths must be >= 1000");
    for (int i = 1; i <= checkpoints; ++i) opt.checkpoints.push_back(opt.t_end * i / checkpoints);

    const OracleReport rep = mc_compare(p, opt);
    Json doc = to_json(rep);
    doc["params"] = to_json(p);
    write_file(f.out, [&](std::ostream& o) { write_json(o, doc, s.resolved); });
    out << (rep.pass ? "PASS" : "FAIL") << ": " << rep.passed << "/" << rep.nontrivial
        << " component-checkpoint pairs within " << format_number(opt.z_threshold)
        << " standard errors, worst z " << format_number(rep.worst_z) << '\n';
    out << "wrote " << f.out << '\n';
    return rep.pass ? exit_ok : exit_numerical;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Entanglement of two parametrically coupled oscillators under a phase-noisy pump"};
    app.name("parament");
    app.set_version_flag("--version", version());
    app.require_subcommand(1);

    SimulateFlags sim;
    SweepFlags sweep;
    BoundaryFlags bnd;
    FitFlags fit;
    OracleFlags orc;

    auto* c_sim = app.add_subcommand("simulate", "E_N(t) time series and entanglement report");
    add_common(c_sim, sim.common);
    c_sim->add_option("--t-end", sim.t_end, "fixed integration time (default: stop once decided)");
    c_sim->add_option("--out", sim.out, "output prefix for .csv and .json")->capture_default_str();
    c_sim->add_option("--emit-plot-script", sim.common.plot_script, "write a matplotlib script");

    auto* c_sweep = app.add_subcommand("sweep", "lifetime and negativity over a parameter grid");
    add_common(c_sweep, sweep.common);
    c_sweep->add_option("--grid", sweep.grid, "one or two axes name:lin|log:min:max:count")->expected(1, 2);
    c_sweep->add_option("--outputs", sweep.outputs, "subset of tau t_onset t_death e_n_max e_n_steady");
    c_sweep->add_option("--out", sweep.out, "CSV file")->capture_default_str();
    c_sweep->add_option("--emit-plot-script", sweep.common.plot_script, "write a matplotlib script");

    auto* c_bnd = app.add_subcommand("boundary", "bisection for the tau > 0 boundary");
    add_common(c_bnd, bnd.common);
    c_bnd->add_option("--axis", bnd.axis, "parameter to bisect (default nT)");
    c_bnd->add_option("--lo", bnd.lo, "bracket lower end");
    c_bnd->add_option("--hi", bnd.hi, "bracket upper end");
    c_bnd->add_option("--tol", bnd.tol, "relative bracket width (default 1e-3)");
    c_bnd->add_option("--scan", bnd.scan, "repeat over name:lin|log:min:max:count");
    c_bnd->add_option("--out", bnd.out, "JSON file")->capture_default_str();
    c_bnd->add_option("--csv", bnd.csv, "also write D,eps,Q,nT0 rows for the fit command");
    c_bnd->add_option("--emit-plot-script", bnd.common.plot_script, "write a matplotlib script (needs --csv)");

    auto* c_fit = app.add_subcommand("fit", "refit the boundary formula constants");
    add_common(c_fit, fit.common, false);
    c_fit->add_option("--input", fit.input, "boundary CSV (D,eps,Q,nT0)");
    c_fit->add_option("--weights", fit.weights, "uniform or inverse_square");
    c_fit->add_option("--out", fit.out, "JSON file")->capture_default_str();

    auto* c_orc = app.add_subcommand("oracle", "Monte-Carlo check of the phase averaging");
    add_common(c_orc, orc.common);
    c_orc->add_option("--paths", orc.paths, "number of phase realizations (default 10000)");
    c_orc->add_option("--dt", orc.dt, "pathwise step (default from the rates)");
    c_orc->add_option("--t-end", orc.t_end, "final time (default 2e4)");
    c_orc->add_option("--seed", orc.seed, "master seed");
    c_orc->add_option("--checkpoints", orc.checkpoints, "evenly spaced comparison times (default 10)");
    c_orc->add_option("--out", orc.out, "JSON file")->capture_default_str();

    std::vector<std::string> argv_store{"parament"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (std::string& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_validation;
    }

    try {
        if (c_sim->parsed()) return command_simulate(sim, out);
        if (c_sweep->parsed()) return command_sweep(sweep, out);
        if (c_bnd->parsed()) return command_boundary(bnd, out);
        if (c_fit->parsed()) return command_fit(fit, out);
        if (c_orc->parsed()) return command_oracle(orc, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << '\n';
        return exit_validation;
    } catch (const std::domain_error& e) {
        err << "invalid input: " << e.what() << '\n';
        return exit_validation;
    } catch (const std::out_of_range& e) {
        err << "invalid input: " << e.what() << '\n';
        return exit_validation;
    }
    return exit_validation;
}

} // namespace parament
