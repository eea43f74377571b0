// End-to-end tests of the command-line tool: each case spawns the real
// binary (path injected as CORRMINE_BIN) and inspects exit status and
// output.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

namespace {

struct CliResult {
    int status = -1;
    std::string out;
};

CliResult run_raw(const std::string& command) {
    CliResult res;
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) res.out.append(buf, got);
    const int rc = pclose(pipe);
    res.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return res;
}

CliResult run_cli(const std::string& args, bool merge_stderr = false) {
    return run_raw(std::string(CORRMINE_BIN) + " " + args
                   + (merge_stderr ? " 2>&1" : " 2>/dev/null"));
}

std::string fixture(const std::string& name) {
    return std::string(CORRMINE_FIXTURES) + "/" + name;
}

nlohmann::json parse(const CliResult& res) {
    REQUIRE(res.status == 0);
    return nlohmann::json::parse(res.out);
}

} // namespace

TEST_CASE("cli: threshold") {
    const auto j = parse(run_cli("threshold --p 100 --n 4 --delta 1 --e 1"));
    REQUIRE(j["p"] == 100);
    REQUIRE(j["n"] == 4);
    REQUIRE(j["delta"] == 1);
    REQUIRE(std::abs(j["e"].get<double>() - 1.0) < 1e-15);
    REQUIRE(std::abs(j["rho"].get<double>() - 0.9999) < 1e-12);
    REQUIRE(j.contains("radius"));
    REQUIRE(j.contains("rate_diagnostic"));
}

TEST_CASE("cli: constants") {
    const auto j = parse(run_cli("constants --n 4 --r 1"));
    REQUIRE(std::abs(j["a_n"].get<double>() - 0.25) < 1e-15);
    REQUIRE(std::abs(j["b_n"].get<double>() - 1.0) < 1e-15);
    REQUIRE(std::abs(j["pn"].get<double>() - 0.25) < 1e-12);
    REQUIRE(std::abs(j["pn_lower"].get<double>() - 0.25) < 1e-12);
    REQUIRE(std::abs(j["pn_upper"].get<double>() - 0.25) < 1e-12);
}

TEST_CASE("cli: params with the degenerate increment law needs no seed") {
    const auto j = parse(run_cli("params --n 4 --delta 1"));
    REQUIRE(j["zeta"] == nlohmann::json::array({0.0, 1.0}));
    REQUIRE(j["alpha"] == nlohmann::json::array({0.0, 1.0}));
    REQUIRE_FALSE(j.contains("rho"));

    // analytic two-neighbor case works unseeded as well
    REQUIRE(run_cli("params --n 10 --delta 2").status == 0);
    // the Monte-Carlo path refuses to run without a seed
    REQUIRE(run_cli("params --n 10 --delta 3").status == 2);
    REQUIRE(run_cli("params --n 10 --delta 3 --seed 7").status == 0);
}

TEST_CASE("cli: params finite-threshold block") {
    const auto j = parse(run_cli("params --n 4 --delta 1 --p 100 --rho 0.9999"));
    REQUIRE(std::abs(j["lambda"].get<double>() - 0.495) < 1e-10);
    REQUIRE(std::abs(j["fwer"].get<double>() - 0.3904) < 1e-4);
    REQUIRE(std::abs(j["e"].get<double>() - 1.0) < 1e-12);
    REQUIRE(j["alpha_finite"] == nlohmann::json::array({0.0, 1.0}));
}

TEST_CASE("cli: counts on the bundled example matrix") {
    const std::string base = "counts --matrix " + fixture("example_graph_psi.csv");
    const auto j2 = parse(run_cli(base + " --rho 0.8 --delta 2"));
    REQUIRE(j2["p"] == 5);
    REQUIRE(j2["n_v_exact"] == 1);
    REQUIRE(j2["n_v_atleast"] == 3);
    REQUIRE(j2["n_e"] == 7);
    REQUIRE(j2["edges"] == 5);

    const auto j1 = parse(run_cli(base + " --rho 0.8 --delta 1"));
    REQUIRE(j1["n_e"] == 10);
    REQUIRE(j1["n_v_atleast"] == 5);
}

TEST_CASE("cli: counts exports an edge list") {
    const std::string path = "cli_tmp_edges.csv";
    const auto j = parse(run_cli("counts --matrix " + fixture("example_graph_psi.csv")
                                 + " --rho 0.8 --delta 1 --export-edges " + path));
    REQUIRE(j["edges"] == 5);
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    REQUIRE(ss.str() == "0,1\n0,2\n0,4\n2,3\n2,4\n");
    std::remove(path.c_str());
}

TEST_CASE("cli: help and usage errors") {
    REQUIRE(run_cli("--help").status == 0);
    REQUIRE(run_cli("--help").out.find("threshold") != std::string::npos);
    for (const char* sub : {"constants", "threshold", "params", "counts", "simulate",
                            "tv-curve", "moments", "fwer", "sparsity"}) {
        const CliResult res = run_cli(std::string(sub) + " --help");
        REQUIRE(res.status == 0);
        REQUIRE_FALSE(res.out.empty());
    }
    REQUIRE(run_cli("").status == 2);                      // a subcommand is required
    REQUIRE(run_cli("threshold --bogus 1").status == 2);   // unknown flag
    REQUIRE(run_cli("threshold --n 4 --delta 1").status == 2); // missing --p
    REQUIRE(run_cli("counts --rho 0.5 --delta 1").status == 2); // no input matrix
}

TEST_CASE("cli: runtime failures exit with status 1 and a message") {
    const CliResult res = run_cli("counts --matrix no_such_file_xyz.csv --rho 0.5 --delta 1",
                                  /*merge_stderr=*/true);
    REQUIRE(res.status == 1);
    REQUIRE(res.out.find("error:") != std::string::npos);
}

TEST_CASE("cli: seeded runs are byte-identical and accept the env fallback") {
    const std::string args = "simulate --n 6 --p 12 --delta 1 --rho 0.7 --trials 10";
    REQUIRE(run_cli(args).status == 2); // seed is mandatory for simulation

    const CliResult a = run_cli(args + " --seed 42");
    const CliResult b = run_cli(args + " --seed 42");
    REQUIRE(a.status == 0);
    REQUIRE(a.out == b.out);

    const CliResult c = run_raw("CORRMINE_SEED=42 " + std::string(CORRMINE_BIN) + " " + args
                                + " 2>/dev/null");
    REQUIRE(c.status == 0);
    REQUIRE(c.out == a.out);

    const auto j = nlohmann::json::parse(a.out);
    REQUIRE(j["seed"] == 42);
    REQUIRE(j["trials"] == 10);
    long total = 0;
    for (const auto& c2 : j["histograms"]["correlation"]["n_e"]) total += c2.get<long>();
    REQUIRE(total == 10);
}

TEST_CASE("cli: csv format and file output") {
    const CliResult csv = run_cli("counts --matrix " + fixture("example_graph_psi.csv")
                                  + " --rho 0.8 --delta 2 --format csv");
    REQUIRE(csv.status == 0);
    REQUIRE(csv.out.rfind("p,rho,delta,n_e,n_v_exact,n_v_atleast,edges,universal\n", 0) == 0);
    REQUIRE(csv.out.find("5,") != std::string::npos);

    const std::string path = "cli_tmp_out.json";
    const CliResult filed = run_cli("threshold --p 100 --n 4 --delta 1 --out " + path);
    REQUIRE(filed.status == 0);
    REQUIRE(filed.out.empty());
    std::ifstream f(path);
    const auto j = nlohmann::json::parse(f);
    REQUIRE(std::abs(j["rho"].get<double>() - 0.9999) < 1e-12);
    std::remove(path.c_str());
}

TEST_CASE("cli: sparsity generator round trip") {
    const std::string path = "cli_tmp_sigma.csv";
    const auto j = parse(run_cli(
        "sparsity --p 10 --tau 3 --kappa 4 --xi 0.1 --save-matrix " + path));
    REQUIRE(j["p"] == 10);
    REQUIRE(j["connected"] == true);
    REQUIRE(j["tau_kappa_ok"] == true);
    REQUIRE(j["row_kappa"].get<int>() <= 5);
    REQUIRE(j["normalized_det"].get<double>() > 0.0);
    REQUIRE(j["normalized_det"].get<double>() <= 1.0);

    const auto k = parse(run_cli("sparsity --matrix " + path + " --tau 3 --kappa 4"
                                 + " --m 2 --mode exact"));
    REQUIRE(k["p"] == 10);
    REQUIRE(k["tau_kappa_ok"] == true);
    REQUIRE(k["mu_m"].get<double>() > 0.0);
    REQUIRE(k["mu_m"].get<double>() <= 1.0);
    std::remove(path.c_str());
}
