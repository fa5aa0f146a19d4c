// io.cpp — CSV/JSON formatting and file access

#include "parament/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#ifndef PARAMENT_VERSION
#define PARAMENT_VERSION "0.0.0"
#endif

namespace parament {

namespace {

std::string optional_number(const std::optional<double>& x)
{
    return x ? format_number(*x) : std::string();
}

Json optional_json(const std::optional<double>& x)
{
    return x ? json_number(*x) : Json(nullptr);
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    return out;
}

} // namespace

const char* version()
{
    return PARAMENT_VERSION;
}

std::string format_number(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

Json json_number(double x)
{
    if (std::isfinite(x)) return x;
    return format_number(x);
}

Json to_json(const SystemParams& p)
{
    return {{"omega", p.omega},          {"Q", json_number(p.quality)}, {"gamma", p.gamma},
            {"eps", p.epsilon},          {"Delta", p.delta},            {"D", p.noise_width},
            {"nT", p.n_thermal}};
}

Json to_json(const IntegratorControls& c)
{
    return {{"rtol", c.rel_tol},
            {"atol", c.abs_tol},
            {"max_step", json_number(c.max_step)},
            {"sample_interval", c.sample_interval},
            {"overflow_cap", c.overflow_cap}};
}

Json to_json(const AnalysisOptions& a)
{
    return {{"eps_on", a.eps_on},
            {"hysteresis", a.hysteresis},
            {"horizon", a.horizon},
            {"plateau_window", a.plateau_window},
            {"plateau_rel_change", a.plateau_rel_change},
            {"resolution_cap", a.resolution_cap},
            {"time_resolution", a.time_resolution},
            {"stop_at_onset", a.stop_at_onset}};
}

Json to_json(const EntanglementReport& r)
{
    return {{"entangled", r.entangled()},
            {"unbounded", r.unbounded()},
            {"t_onset", optional_json(r.t_onset)},
            {"t_death", r.entangled() ? json_number(r.t_death) : Json(nullptr)},
            {"tau", json_number(r.tau)},
            {"e_n_max", r.e_n_max},
            {"t_peak", optional_json(r.t_peak)},
            {"e_n_steady", optional_json(r.e_n_steady)},
            {"t_final", r.t_final},
            {"e_n_final", r.e_n_final},
            {"flags", r.flags.to_string()}};
}

Json to_json(const BoundaryConstants& k)
{
    return {{"a1", k.a1}, {"b1", k.b1}, {"a2", k.a2}, {"b2", k.b2}};
}

Json to_json(const FitReport& r)
{
    Json slopes = Json::array();
    for (std::size_t i = 0; i < r.slopes.size(); ++i) {
        const SlopeFit& s = r.slopes[i];
        Json j{{"Q", s.quality}, {"eps", s.epsilon}, {"slope", s.slope}, {"samples", s.samples},
               {"residual_norm", s.residual_norm}};
        if (i < r.slope_residuals.size()) j["slope_model_residual"] = r.slope_residuals[i];
        slopes.push_back(j);
    }
    Json residuals = Json::array();
    for (const SampleResidual& s : r.residuals) {
        residuals.push_back({{"D", s.sample.noise_width},
                             {"eps", s.sample.epsilon},
                             {"Q", s.sample.quality},
                             {"nT0", s.sample.n_t0},
                             {"predicted", json_number(s.predicted)},
                             {"relative", json_number(s.relative)}});
    }
    return {{"status", r.status},
            {"constants", r.constants ? to_json(*r.constants) : Json(nullptr)},
            {"published_constants", to_json(BoundaryConstants::published())},
            {"rank", r.rank},
            {"weights", to_string(r.weights)},
            {"slopes", slopes},
            {"residuals", residuals},
            {"rms_relative", json_number(r.rms_relative)},
            {"max_relative", json_number(r.max_relative)}};
}

Json to_json(const BoundaryResult& r)
{
    return {{"axis", r.axis},
            {"value", r.value},
            {"bracket", {r.lo, r.hi}},
            {"entangled_below", r.entangled_below},
            {"evaluations", r.evaluations},
            {"confirmed", r.confirmed},
            {"confirmation", r.confirmation ? to_json(*r.confirmation) : Json(nullptr)}};
}

Json to_json(const OracleReport& r)
{
    Json worst{{"t", r.worst.t},        {"n", r.worst.n},   {"k", r.worst.k},
               {"part", std::string(1, r.worst.part)},     {"mc", r.worst.mc},
               {"se", r.worst.se},      {"ode", r.worst.ode}, {"z", json_number(r.worst.z)}};
    Json pairs = Json::array();
    for (const PairCheck& p : r.pairs) {
        pairs.push_back({{"t", p.t},
                         {"n", p.n},
                         {"k", p.k},
                         {"part", std::string(1, p.part)},
                         {"mc", p.mc},
                         {"se", p.se},
                         {"ode", p.ode},
                         {"z", json_number(p.z)},
                         {"passed", p.passed}});
    }
    return {{"pass", r.pass},
            {"n_paths", r.ensemble.n_paths},
            {"dt", r.ensemble.dt},
            {"master_seed", r.ensemble.master_seed},
            {"checkpoints", r.ensemble.times},
            {"pairs_total", r.pairs.size()},
            {"pairs_nontrivial", r.nontrivial},
            {"pairs_passed", r.passed},
            {"pass_fraction", r.pass_fraction},
            {"worst_z", json_number(r.worst_z)},
            {"worst", worst},
            {"offenders", r.offenders},
            {"pairs", pairs}};
}

void write_metadata(std::ostream& out, const Json& config)
{
    out << "# parament " << version() << '\n';
    out << "# config " << config.dump() << '\n';
}

void write_series_csv(std::ostream& out, const Trajectory& traj, const AnalysisOptions& analysis,
                      const Json& config)
{
    std::vector<std::string> lines;
    std::string note;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const MomentState& s = traj.states[i];
        if (s.max_abs() > analysis.resolution_cap) {
            note = "moments exceed " + format_number(analysis.resolution_cap) + " after t = " +
                   format_number(i > 0 ? traj.times[i - 1] : traj.times[i]);
            break;
        }
        NegativityResult r;
        try {
            r = state_negativity(s);
        } catch (const NumericalError& e) {
            note = std::string("unresolvable covariance at t = ") + format_number(traj.times[i]);
            break;
        }
        lines.push_back(format_number(traj.times[i]) + "," + format_number(r.e_n) + "," +
                        format_number(r.nu_minus) + "," +
                        format_number(physical_moments(s).nbar));
    }
    write_metadata(out, config);
    if (!note.empty()) out << "# truncated: " << note << '\n';
    out << "t_omega,E_N,nu_minus,nbar\n";
    for (const std::string& l : lines) out << l << '\n';
}

void write_sweep_csv(std::ostream& out, const SweepSpec& spec, const std::vector<SweepRow>& rows,
                     const Json& config)
{
    write_metadata(out, config);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].failed()) out << "# cell " << i << " failed: " << rows[i].error << '\n';
    }
    const std::vector<std::string> outputs = spec.resolved_outputs();
    for (const Axis& a : spec.axes) out << a.name << ',';
    for (const std::string& o : outputs) out << o << ',';
    out << "flags\n";
    for (const SweepRow& row : rows) {
        for (double v : row.values) out << format_number(v) << ',';
        const EntanglementReport& r = row.report;
        for (const std::string& o : outputs) {
            std::string cell;
            if (!row.failed()) {
                if (o == "tau") cell = format_number(r.tau);
                else if (o == "t_onset") cell = optional_number(r.t_onset);
                else if (o == "t_death") cell = r.entangled() ? format_number(r.t_death) : "";
                else if (o == "e_n_max") cell = format_number(r.e_n_max);
                else if (o == "e_n_steady") cell = optional_number(r.e_n_steady);
            }
            out << cell << ',';
        }
        out << (row.failed() ? std::string("failed") : r.flags.to_string()) << '\n';
    }
}

void write_boundary_csv(std::ostream& out, const std::vector<BoundarySample>& samples,
                        const Json& config)
{
    write_metadata(out, config);
    out << "D,eps,Q,nT0\n";
    for (const BoundarySample& s : samples) {
        out << format_number(s.noise_width) << ',' << format_number(s.epsilon) << ','
            << format_number(s.quality) << ',' << format_number(s.n_t0) << '\n';
    }
}

std::vector<BoundarySample> read_boundary_csv(std::istream& in)
{
    std::vector<BoundarySample> out;
    std::map<std::string, std::size_t> col;
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (col.empty()) {
            for (std::size_t i = 0; i < cells.size(); ++i) col[cells[i]] = i;
            for (const char* need : {"D", "eps", "Q", "nT0"}) {
                if (!col.count(need)) {
                    throw std::invalid_argument(std::string("boundary CSV: missing column '") + need + "'");
                }
            }
            continue;
        }
        auto get = [&](const char* name) {
            const std::size_t i = col.at(name);
            if (i >= cells.size() || cells[i].empty()) {
                throw std::invalid_argument("boundary CSV line " + std::to_string(line_no) +
                                            ": missing " + name);
            }
            double v = 0.0;
            const auto res = std::from_chars(cells[i].data(), cells[i].data() + cells[i].size(), v);
            if (res.ec != std::errc() || res.ptr != cells[i].data() + cells[i].size()) {
                throw std::invalid_argument("boundary CSV line " + std::to_string(line_no) +
                                            ": bad number '" + cells[i] + "'");
            }
            return v;
        };
        out.push_back({get("D"), get("eps"), get("Q"), get("nT0")});
    }
    if (col.empty()) throw std::invalid_argument("boundary CSV: no header row");
    return out;
}

void write_json(std::ostream& out, Json doc, const Json& config)
{
    doc["_meta"] = {{"config", config}, {"version", version()}};
    out << doc.dump(2) << '\n';
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body)
{
    std::ofstream f(path);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    body(f);
    f.flush();
    if (!f) throw IoError("write to '" + path + "' failed");
}

std::vector<BoundarySample> read_boundary_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw IoError("cannot open '" + path + "'");
    return read_boundary_csv(f);
}

Json read_json_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw IoError("cannot open '" + path + "'");
    try {
        return Json::parse(f);
    } catch (const Json::parse_error& e) {
        throw std::invalid_argument("'" + path + "' is not valid JSON: " + e.what());
    }
}

} // namespace parament
