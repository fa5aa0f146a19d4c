#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "parament/cli.hpp"
#include "parament/fit.hpp"
#include "parament/io.hpp"

using namespace parament;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("parament_cli_" + std::to_string(::getpid())))
    {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path)
{
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<std::string> data_lines(const std::string& text)
{
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);)
        if (l.rfind('#', 0) != 0) lines.push_back(l);
    return lines;
}

std::string config_line(const std::string& text)
{
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);)
        if (l.rfind("# config ", 0) == 0) return l.substr(9);
    return {};
}

} // namespace

TEST_CASE("simulate writes the series and the report")
{
    TempDir tmp;
    const Result r = run({"simulate", "--D", "1e-8", "--out", tmp / "fig1"});
    REQUIRE(r.code == 0);
    const std::string csv = slurp(tmp / "fig1.csv");
    CHECK(csv.rfind("# parament ", 0) == 0);
    const auto lines = data_lines(csv);
    REQUIRE(lines.size() > 10);
    CHECK(lines[0] == "t_omega,E_N,nu_minus,nbar");

    const Json rep = Json::parse(slurp(tmp / "fig1.json"));
    CHECK(rep["entangled"] == true);
    CHECK(rep["unbounded"] == false);
    CHECK(rep["tau"].get<double>() > 0.0);
    CHECK(rep["_meta"]["config"]["D"] == 1e-8);
    CHECK(rep["_meta"]["version"] == version());
}

TEST_CASE("simulate without pump gives an all-zero E_N column")
{
    TempDir tmp;
    REQUIRE(run({"simulate", "--eps", "0", "--t-end", "2000", "--out", tmp / "z"}).code == 0);
    const auto lines = data_lines(slurp(tmp / "z.csv"));
    REQUIRE(lines.size() > 2);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::istringstream row(lines[i]);
        std::string t, e;
        std::getline(row, t, ',');
        std::getline(row, e, ',');
        CHECK(e == "0");
    }
}

TEST_CASE("the embedded config reproduces the file bit for bit")
{
    TempDir tmp;
    REQUIRE(run({"simulate", "--D", "1e-9", "--nT", "12", "--out", tmp / "a"}).code == 0);
    const std::string first = slurp(tmp / "a.csv");
    {
        std::ofstream cfg(tmp / "cfg.json");
        cfg << config_line(first);
    }
    REQUIRE(run({"simulate", "--config", tmp / "cfg.json", "--out", tmp / "b"}).code == 0);
    CHECK(slurp(tmp / "b.csv") == first);
}

TEST_CASE("flags override the config file")
{
    TempDir tmp;
    {
        std::ofstream cfg(tmp / "cfg.json");
        cfg << R"({"nT": 5, "eps": 0.012, "t_end": 100})";
    }
    REQUIRE(run({"simulate", "--config", tmp / "cfg.json", "--nT", "7", "--out", tmp / "c"}).code == 0);
    const Json meta = Json::parse(config_line(slurp(tmp / "c.csv")));
    CHECK(meta["nT"] == 7.0);
    CHECK(meta["eps"] == 0.012);
    CHECK(meta["t_end"] == 100.0);

    {
        std::ofstream cfg(tmp / "typo.json");
        cfg << R"({"nt": 5})";
    }
    CHECK(run({"simulate", "--config", tmp / "typo.json", "--out", tmp / "d"}).code == exit_validation);
    {
        std::ofstream cfg(tmp / "other.json");
        cfg << R"({"command": "sweep"})";
    }
    CHECK(run({"simulate", "--config", tmp / "other.json", "--out", tmp / "d"}).code == exit_validation);
}

TEST_CASE("sweep grid size and plot script")
{
    TempDir tmp;
    const Result r = run({"sweep", "--grid", "D:log:1e-12:1e-6:25", "nT:lin:1:25:25", "--out",
                          tmp / "s.csv", "--emit-plot-script", tmp / "s.py"});
    REQUIRE(r.code == 0);
    const auto lines = data_lines(slurp(tmp / "s.csv"));
    CHECK(lines.size() == 626);   // header + 625 cells
    CHECK(lines[0] == "D,nT,tau,t_onset,t_death,e_n_max,e_n_steady,flags");
    CHECK(fs::exists(tmp / "s.py"));
    if (std::system("python3 -c 'import numpy, matplotlib' >/dev/null 2>&1") == 0) {
        const std::string cmd = "python3 " + (tmp / "s.py") + " " + (tmp / "s.csv") + " >/dev/null 2>&1";
        CHECK(std::system(cmd.c_str()) == 0);
        CHECK(fs::exists(tmp / "s.png"));
    }
}

TEST_CASE("boundary and fit")
{
    TempDir tmp;
    Result r = run({"boundary", "--axis", "nT", "--D", "0", "--eps", "1.6e-2", "--Q", "5000", "--out",
                    tmp / "b.json"});
    REQUIRE(r.code == 0);
    const Json b = Json::parse(slurp(tmp / "b.json"));
    CHECK(b["points"][0]["value"].get<double>() == doctest::Approx(20.0).epsilon(0.02));

    r = run({"boundary", "--scan", "D:log:1e-10:1e-6:3", "--out", tmp / "scan.json", "--csv",
             tmp / "scan.csv"});
    REQUIRE(r.code == 0);
    CHECK(read_boundary_file(tmp / "scan.csv").size() == 3);

    // fit on samples generated from the formula itself
    std::vector<BoundarySample> s;
    for (double q : {2000.0, 5000.0, 10000.0})
        for (double eps : {1.0e-2, 1.6e-2, 2.5e-2})
            for (double d : {1e-10, 1e-9, 1e-8, 1e-7})
                s.push_back({d, eps, q, eval_boundary(d, eps, q)});
    write_file(tmp / "syn.csv", [&](std::ostream& o) { write_boundary_csv(o, s, Json::object()); });
    r = run({"fit", "--input", tmp / "syn.csv", "--out", tmp / "fit.json"});
    REQUIRE(r.code == 0);
    const Json fit = Json::parse(slurp(tmp / "fit.json"));
    CHECK(fit["status"] == "ok");
    CHECK(fit["constants"]["a1"].get<double>() == doctest::Approx(2.08).epsilon(1e-6));
    CHECK(fit["constants"]["b2"].get<double>() == doctest::Approx(-4.82).epsilon(1e-6));
    CHECK(fit["residuals"].size() == s.size());

    r = run({"fit", "--input", tmp / "scan.csv", "--out", tmp / "fit1.json"});
    REQUIRE(r.code == 0);
    CHECK(Json::parse(slurp(tmp / "fit1.json"))["status"] == "underdetermined");
}

TEST_CASE("oracle command")
{
    TempDir tmp;
    const Result r = run({"oracle", "--D", "1e-4", "--paths", "1000", "--t-end", "2000", "--out",
                          tmp / "o.json"});
    CHECK(r.code == 0);
    const Json o = Json::parse(slurp(tmp / "o.json"));
    CHECK(o["pass"] == true);
    CHECK(o["n_paths"] == 1000);
}

TEST_CASE("exit codes")
{
    TempDir tmp;
    CHECK(run({}).code == exit_validation);
    CHECK(run({"bogus"}).code == exit_validation);
    CHECK(run({"--help"}).code == exit_ok);
    CHECK(run({"simulate", "--eps", "-1", "--out", tmp / "x"}).code == exit_validation);
    CHECK(run({"simulate", "--eps", "abc"}).code == exit_validation);
    CHECK(run({"sweep", "--grid", "D:cubic:1:2:3", "--out", tmp / "x.csv"}).code == exit_validation);
    CHECK(run({"sweep", "--out", tmp / "x.csv"}).code == exit_validation);
    CHECK(run({"boundary", "--lo", "1", "--hi", "10", "--out", tmp / "x.json"}).code == exit_validation);
    CHECK(run({"fit", "--input", tmp / "missing.csv"}).code == exit_io);
    CHECK(run({"simulate", "--out", tmp / "no/such/dir/x"}).code == exit_io);
    CHECK(run({"simulate", "--rtol", "1e-30", "--atol", "1e-300", "--out", tmp / "x"}).code == exit_numerical);
    CHECK(run({"oracle", "--paths", "10", "--out", tmp / "x.json"}).code == exit_validation);
}
