// sweep.cpp — Grid runs and boundary bisection

#include "parament/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "parament/io.hpp"

namespace parament {

namespace {

const std::vector<std::string> kParameterNames{"Q", "nT", "eps", "D", "Delta"};

double parse_number(const std::string& s, const std::string& what)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument(what + ": not a number: '" + s + "'");
    }
    if (used != s.size()) throw std::invalid_argument(what + ": not a number: '" + s + "'");
    return v;
}

} // namespace

bool is_parameter_name(const std::string& name)
{
    return std::find(kParameterNames.begin(), kParameterNames.end(), name) != kParameterNames.end();
}

void set_parameter(SystemParams& p, const std::string& name, double value)
{
    if (name == "Q") p.set_quality(value);
    else if (name == "nT") p.n_thermal = value;
    else if (name == "eps") p.epsilon = value;
    else if (name == "D") p.noise_width = value;
    else if (name == "Delta") p.delta = value;
    else throw std::invalid_argument("unknown parameter '" + name + "' (expected Q, nT, eps, D or Delta)");
}

double get_parameter(const SystemParams& p, const std::string& name)
{
    if (name == "Q") return p.quality;
    if (name == "nT") return p.n_thermal;
    if (name == "eps") return p.epsilon;
    if (name == "D") return p.noise_width;
    if (name == "Delta") return p.delta;
    throw std::invalid_argument("unknown parameter '" + name + "' (expected Q, nT, eps, D or Delta)");
}

std::vector<double> Axis::values() const
{
    std::vector<double> v(static_cast<std::size_t>(std::max(count, 0)));
    if (v.empty()) return v;
    const int last = count - 1;
    for (int i = 0; i <= last; ++i) {
        const double f = last == 0 ? 0.0 : static_cast<double>(i) / last;
        // log10 interpolation keeps decades exact (1e-9, not 1.0000000000000007e-09)
        v[i] = spacing == Spacing::log
                   ? std::pow(10.0, std::log10(min) + f * (std::log10(max) - std::log10(min)))
                   : min + f * (max - min);
    }
    v.front() = min;
    v.back() = max;
    return v;
}

Axis Axis::parse(const std::string& text)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 5) {
        throw std::invalid_argument("axis '" + text + "': expected name:lin|log:min:max:count");
    }
    Axis a;
    a.name = parts[0];
    if (parts[1] == "lin" || parts[1] == "linear") a.spacing = Spacing::linear;
    else if (parts[1] == "log") a.spacing = Spacing::log;
    else throw std::invalid_argument("axis '" + text + "': spacing must be lin or log");
    a.min = parse_number(parts[2], "axis min");
    a.max = parse_number(parts[3], "axis max");
    const double count = parse_number(parts[4], "axis count");
    if (count != std::floor(count) || count > 1e7) {
        throw std::invalid_argument("axis '" + text + "': count must be an integer");
    }
    a.count = static_cast<int>(count);
    return a;
}

std::string Axis::to_string() const
{
    return name + (spacing == Spacing::log ? ":log:" : ":lin:") + format_number(min) + ":" +
           format_number(max) + ":" + std::to_string(count);
}

const std::vector<std::string>& sweep_output_names()
{
    static const std::vector<std::string> names{"tau", "t_onset", "t_death", "e_n_max", "e_n_steady"};
    return names;
}

void SweepSpec::validate() const
{
    if (axes.empty() || axes.size() > 2) throw std::invalid_argument("sweep needs one or two axes");
    std::set<std::string> seen;
    for (const Axis& a : axes) {
        if (!is_parameter_name(a.name)) {
            throw std::invalid_argument("axis '" + a.name + "' is not one of Q, nT, eps, D, Delta");
        }
        if (!seen.insert(a.name).second) throw std::invalid_argument("axis '" + a.name + "' repeated");
        if (a.count < 2) throw std::invalid_argument("axis '" + a.name + "': count must be >= 2");
        if (!std::isfinite(a.min) || !std::isfinite(a.max)) {
            throw std::invalid_argument("axis '" + a.name + "': bounds must be finite");
        }
        if (a.spacing == Spacing::log && !(a.min > 0.0 && a.max > 0.0)) {
            throw std::invalid_argument("axis '" + a.name + "': log spacing needs positive bounds");
        }
        // every grid value must give valid parameters
        for (double v : {a.min, a.max}) {
            SystemParams p = fixed;
            set_parameter(p, a.name, v);
            p.validate();
        }
    }
    fixed.validate();
    for (const std::string& o : outputs) {
        const auto& all = sweep_output_names();
        if (std::find(all.begin(), all.end(), o) == all.end()) {
            throw std::invalid_argument("unknown sweep output '" + o + "'");
        }
    }
}

std::size_t SweepSpec::cell_count() const
{
    std::size_t n = 1;
    for (const Axis& a : axes) n *= static_cast<std::size_t>(std::max(a.count, 0));
    return n;
}

std::vector<std::string> SweepSpec::resolved_outputs() const
{
    if (outputs.empty()) return sweep_output_names();
    // keep schema order regardless of how they were listed
    std::vector<std::string> out;
    for (const std::string& name : sweep_output_names()) {
        if (std::find(outputs.begin(), outputs.end(), name) != outputs.end()) out.push_back(name);
    }
    return out;
}

std::vector<SweepRow> run_grid(const SweepSpec& spec, const RunOptions& options)
{
    spec.validate();
    std::vector<std::vector<double>> axis_values;
    for (const Axis& a : spec.axes) axis_values.push_back(a.values());

    const std::size_t n = spec.cell_count();
    std::vector<SweepRow> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t rest = i;
        rows[i].values.resize(spec.axes.size());
        for (std::size_t a = spec.axes.size(); a-- > 0;) {
            const std::size_t m = axis_values[a].size();
            rows[i].values[a] = axis_values[a][rest % m];
            rest /= m;
        }
    }

    parallel_for(n, options.threads, [&](std::size_t i) {
        SweepRow& row = rows[i];
        const auto start = std::chrono::steady_clock::now();
        try {
            SystemParams p = spec.fixed;
            for (std::size_t a = 0; a < spec.axes.size(); ++a) {
                set_parameter(p, spec.axes[a].name, row.values[a]);
            }
            const EntanglementRun run = run_entanglement(p, options.controls, options.analysis);
            row.report = run.report;
            row.steps = run.trajectory.accepted_steps;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        row.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });
    return rows;
}

double classification_horizon(const SystemParams& p)
{
    return p.gamma > 0.0 ? 30.0 / p.gamma : 1e6 / p.omega;
}

BoundaryResult find_boundary(const SystemParams& fixed, const std::string& axis, double lo,
                             double hi, double rel_tol, const RunOptions& options)
{
    if (!is_parameter_name(axis)) {
        throw std::invalid_argument("boundary axis '" + axis + "' is not one of Q, nT, eps, D, Delta");
    }
    if (!(rel_tol > 0.0)) throw std::invalid_argument("boundary: tolerance must be positive");
    if (!(lo < hi)) throw std::invalid_argument("boundary: bracket needs lo < hi");

    BoundaryResult res;
    res.axis = axis;

    auto at = [&](double v) {
        SystemParams p = fixed;
        set_parameter(p, axis, v);
        p.validate();
        return p;
    };
    auto entangled = [&](double v) {
        AnalysisOptions opt = options.analysis;
        opt.stop_at_onset = true;
        const SystemParams p = at(v);
        if (!(opt.horizon > 0.0)) opt.horizon = classification_horizon(p);
        ++res.evaluations;
        return run_entanglement(p, options.controls, opt).report.entangled();
    };

    const bool lo_on = entangled(lo);
    const bool hi_on = entangled(hi);
    if (lo_on == hi_on) {
        throw std::invalid_argument("boundary: bracket [" + format_number(lo) + ", " +
                                    format_number(hi) + "] does not straddle the boundary (both ends " +
                                    (lo_on ? "entangled" : "separable") + ")");
    }
    res.entangled_below = lo_on;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= rel_tol * std::max(std::abs(mid), std::numeric_limits<double>::min())) break;
        if (entangled(mid) == lo_on) lo = mid;
        else hi = mid;
    }
    res.lo = lo;
    res.hi = hi;
    res.value = 0.5 * (lo + hi);

    // Full-horizon confirmation on both ends of the final bracket.
    const double on_end = lo_on ? lo : hi;
    const double off_end = lo_on ? hi : lo;
    AnalysisOptions full = options.analysis;
    full.stop_at_onset = false;
    const EntanglementReport on_rep = run_entanglement(at(on_end), options.controls, full).report;
    const EntanglementReport off_rep = run_entanglement(at(off_end), options.controls, full).report;
    res.evaluations += 2;
    res.confirmation = on_rep;
    res.confirmed = on_rep.entangled() && !off_rep.entangled();
    return res;
}

} // namespace parament
