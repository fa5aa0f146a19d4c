// io.hpp — CSV and JSON emission shared by the command-line front end

#pragma once

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "parament/analysis.hpp"
#include "parament/fit.hpp"
#include "parament/oracle.hpp"
#include "parament/sweep.hpp"

namespace parament {

using Json = nlohmann::json;

// File-system failures (exit code 2 in the CLI).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

const char* version();

// Shortest decimal that round-trips; "inf", "-inf", "nan" for non-finite values.
std::string format_number(double x);

Json to_json(const SystemParams& p);
Json to_json(const IntegratorControls& c);
Json to_json(const AnalysisOptions& a);
Json to_json(const EntanglementReport& r);
Json to_json(const BoundaryConstants& k);
Json to_json(const FitReport& r);
Json to_json(const BoundaryResult& r);
Json to_json(const OracleReport& r);

// Non-finite numbers as strings, since JSON has no infinity.
Json json_number(double x);

// "# parament <version>" and "# config <one-line JSON>".
void write_metadata(std::ostream& out, const Json& config);

// t_omega, E_N, nu_minus, nbar for every sample whose moments are still resolvable.
void write_series_csv(std::ostream& out, const Trajectory& traj, const AnalysisOptions& analysis,
                      const Json& config);

// Axis columns, the requested report columns, then flags. Unbounded tau is "inf";
// absent values are empty.
void write_sweep_csv(std::ostream& out, const SweepSpec& spec, const std::vector<SweepRow>& rows,
                     const Json& config);

// D, eps, Q, nT0
void write_boundary_csv(std::ostream& out, const std::vector<BoundarySample>& samples,
                        const Json& config);
// Reads a CSV with '#' comment lines and a header naming D, eps, Q and nT0 columns.
std::vector<BoundarySample> read_boundary_csv(std::istream& in);

// Pretty-printed JSON with sorted keys and a "_meta" block holding config and version.
void write_json(std::ostream& out, Json doc, const Json& config);

// Opening files; failures raise IoError.
void write_file(const std::string& path, const std::function<void(std::ostream&)>& body);
std::vector<BoundarySample> read_boundary_file(const std::string& path);
Json read_json_file(const std::string& path);

} // namespace parament
