#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "slowq/cli.hpp"

using slowq::run_cli;

namespace {

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

CliResult run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    CliResult r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

}  // namespace

TEST_CASE("solve emits the reference numbers as JSON") {
    const auto r = run({"solve", "--servers", "15", "--lambda", "15", "--rho-fast", "0.7",
                        "--rho-slow", "0.98", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["schema_version"] == 1);
    CHECK(j["params"]["s"] == 15);
    CHECK(j["params"]["rho_slow"].get<double>() == doctest::Approx(0.98));
    CHECK(j["results"]["mean_system"].get<double>() ==
          doctest::Approx(42.054325185).epsilon(1e-9));
    CHECK(j["results"].contains("p_wait"));
    CHECK(j["results"].contains("mean_queue"));
    CHECK(j["results"].contains("rho"));
    CHECK(j["results"].contains("rho_minus_rho_fast"));
}

TEST_CASE("JSON output round-trips byte-identically") {
    const auto r = run({"solve", "-s", "15", "--lambda", "15", "--rho-fast", "0.7",
                        "--rho-slow", "0.98"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::ordered_json::parse(r.out);
    CHECK(j.dump(2) + "\n" == r.out);
}

TEST_CASE("identical invocations are byte-identical") {
    const std::vector<std::string> args{"simulate", "-s",      "6",    "--lambda", "6",
                                        "--rho-fast", "0.7",   "--rho-slow", "0.9",
                                        "--horizon", "2000",   "--seed", "11"};
    const auto a = run(args);
    const auto b = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("dimension reproduces a staffing row") {
    const auto r = run({"dimension", "--mu-fast", "1", "--mu-slow", "0.9", "--lambda",
                        "10", "--target", "0.1"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["results"]["s_fast"] == 16);
    CHECK(j["results"]["s_slowdown"] == 16);
}

TEST_CASE("qed emits the six-column CSV") {
    const auto r = run({"qed", "--beta", "0.5", "--gamma", "0.5", "--s", "25,50",
                        "--format", "csv"});
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "s,p_wait_fast,p_wait_slowdown,p_wait_slow,lower,upper");
    int rows = 0;
    std::string line;
    while (std::getline(lines, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2);
}

TEST_CASE("flag errors exit with code 2") {
    CHECK(run({"solve", "--servers", "5"}).code == 2);                      // missing lambda
    CHECK(run({"solve", "-s", "5", "--lambda", "4", "--mu-fast", "2", "--mu-slow", "1",
               "--rho-fast", "0.5", "--rho-slow", "0.8"})
              .code == 2);                                                  // both parameterizations
    CHECK(run({"nonsense"}).code == 2);                                     // unknown subcommand
    CHECK(run({"validate", "--tier", "nope"}).code == 2);                   // unknown tier
    const auto unstable = run({"solve", "-s", "4", "--lambda", "8", "--mu-fast", "3",
                               "--mu-slow", "1.5"});
    CHECK(unstable.code == 2);                                              // rho_slow > 1
    CHECK(unstable.err.find("rho_slow") != std::string::npos);
}

TEST_CASE("heatmap CSV is in long form with a header") {
    const auto r = run({"heatmap", "-s", "3", "--lambda", "3", "--rho-fast", "0.6",
                        "--rho-slow", "0.9", "--i-max", "5", "--format", "csv"});
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "i,j,probability");
    // levels 0..5 with phases capped at min(i, s): 1+2+3+4+4+4 rows
    int rows = 0;
    std::string line;
    while (std::getline(lines, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 18);
}

TEST_CASE("marginal handles the variants") {
    const auto fb = run({"marginal", "-s", "5", "--lambda", "5", "--rho-fast", "0.8",
                         "--rho-slow", "1.1", "--buffer", "12"});
    REQUIRE(fb.code == 0);
    const auto j = nlohmann::json::parse(fb.out);
    CHECK(j["results"]["i_max"] == 12);

    const auto ab = run({"marginal", "-s", "5", "--lambda", "5", "--rho-fast", "0.8",
                         "--rho-slow", "1.1", "--delta", "0.4"});
    CHECK(ab.code == 0);

    // without a variant flag the unstable load must be refused
    const auto bad = run({"marginal", "-s", "5", "--lambda", "5", "--rho-fast", "0.8",
                          "--rho-slow", "1.1"});
    CHECK(bad.code == 2);
}

TEST_CASE("couple reports zero violations") {
    const auto r = run({"couple", "-s", "7", "--lambda", "7", "--rho-fast", "0.7",
                        "--rho-slow", "0.95", "--customers", "20000", "--seeds", "3"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["results"]["customers_checked"] == 60000);
    CHECK(j["results"]["violations_ws_ge_w"] == 0);
    CHECK(j["results"]["violations_w_ge_wf"] == 0);
    CHECK(j["results"]["violations_xs_ge_x"] == 0);
    CHECK(j["results"]["violations_x_ge_xf"] == 0);
}

TEST_CASE("help is not an error") {
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("numerical failures exit with code 1 and a stage label") {
    // passes the ergodicity gate but is too close to instability for the
    // triangular inverse
    const auto r = run({"solve", "-s", "2", "--lambda", "2", "--rho-fast", "0.5",
                        "--rho-slow", "0.999999999999999"});
    CHECK(r.code == 1);
    CHECK(r.err.find("numerical error: invert_I_minus_R") != std::string::npos);
}

TEST_CASE("quick validation tier passes") {
    const auto r = run({"validate", "--tier", "quick"});
    INFO(r.out);
    CHECK(r.code == 0);
    CHECK(r.out.find("[FAIL]") == std::string::npos);
    CHECK(r.out.find("all checks passed") != std::string::npos);
}
