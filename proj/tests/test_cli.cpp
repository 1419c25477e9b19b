#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

using namespace keb::cli;
using nlohmann::json;

namespace {

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    std::ostringstream out, err;
    Outcome o;
    o.code = run_cli(args, out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

std::string temp_path(const std::string& name) { return std::string("/tmp/kebcli_test_") + name; }

} // namespace

TEST_CASE("profile CSV layout") {
    const auto o = run({"profile", "--n", "1", "--k", "1", "--lambda", "-2"});
    REQUIRE(o.code == kOk);
    const auto rows = lines(o.out);
    REQUIRE(rows.size() == 1002);
    CHECK(rows[0] == "r,Z,W,phi,phi_prime,Y,ode_residual,phi_ode_residual");
    CHECK(rows[1].rfind("0,", 0) == 0);
    CHECK(rows[501].rfind("0.5,0.7499999999", 0) == 0);
    CHECK(rows[1001].rfind("1,0,", 0) == 0);
    CHECK(rows[1001].find(",inf,") != std::string::npos);
    // 17 significant digits
    CHECK(rows[2].rfind("0.001,", 0) == 0);
    CHECK(rows[501].find("-3.0000000000") != std::string::npos);
}

TEST_CASE("profile JSON embeds config and version") {
    const auto o = run({"profile", "--n", "1", "--k", "2", "--eigs", "-1", "--format", "json"});
    REQUIRE(o.code == kOk);
    const auto j = json::parse(o.out);
    CHECK(j["version"] == "0.1.0");
    CHECK(j["config"]["k"] == 2);
    CHECK(j["rows"].size() == 1001);
    CHECK(j["rows"][1000]["Y"].is_null());
    CHECK(j["rows"][1000]["phi_prime"].get<double>() == doctest::Approx(-2.0).epsilon(1e-6));
    CHECK(j["pass"] == true);
}

TEST_CASE("usage errors exit with 1") {
    CHECK(run({"profile", "--n", "0", "--k", "1", "--lambda", "-2"}).code == kUsage);
    CHECK(run({"profile", "--lambda", "-2", "--eigs", "-2"}).code == kUsage);
    CHECK(run({"profile"}).code == kUsage);
    CHECK(run({}).code == kUsage);
    CHECK(run({"profile", "--n", "2", "--eigs", "-1,-2,-3"}).code == kUsage);
    CHECK(run({"profile", "--lambda", "1.5"}).code == kUsage);
    CHECK(run({"rationality", "--n", "2", "--eigs", "-1,-2"}).code == kUsage);
    CHECK(run({"verify-ma", "--model", "sphere"}).code == kUsage);
    CHECK(run({"bundle-check", "--model", "sum-disk"}).code == kUsage);
    CHECK(run({"profile", "--lambda", "-2", "--format", "xml"}).code == kUsage);
    const auto o = run({"profile", "--bogus"});
    CHECK(o.code == kUsage);
    CHECK_FALSE(o.err.empty());
}

TEST_CASE("threshold failures exit with 3 and still report") {
    const auto o = run({"verify-ma", "--model", "egg", "--n", "1", "--k", "2", "--p", "2", "--points", "3", "--tol",
                        "1e-30"});
    CHECK(o.code == kThreshold);
    CHECK(json::parse(o.out)["pass"] == false);
    CHECK(run({"profile", "--lambda", "-2", "--tol", "1e-30"}).code == kThreshold);
    CHECK(run({"bundle-check", "--model", "sum-disk", "--powers", "1,2", "--require", "split"}).code == kThreshold);
}

TEST_CASE("I/O failures exit with 4") {
    CHECK(run({"profile", "--lambda", "-2", "--output", "/nonexistent/dir/out.csv"}).code == kIo);
    CHECK(run({"profile", "--config", "/nonexistent/keb.cfg"}).code == kIo);
    CHECK(run({"bundle-check", "--model", "json", "--metric-file", "/nonexistent/m.json"}).code == kIo);
}

TEST_CASE("config file with flag override") {
    const std::string cfg = temp_path("config.cfg");
    {
        std::ofstream f(cfg);
        f << "n=1\nk=1\nlambda=-1.5\n";
    }
    const auto from_file = json::parse(run({"rationality", "--config", cfg}).out);
    CHECK(from_file["is_rational"] == false);
    const auto overridden = json::parse(run({"rationality", "--config", cfg, "--lambda", "-2"}).out);
    CHECK(overridden["is_rational"] == true);
    CHECK(overridden["config"]["lambda"].get<double>() == -2.0);
    std::remove(cfg.c_str());
}

TEST_CASE("rationality reports") {
    const auto j = json::parse(run({"rationality", "--n", "1", "--k", "1", "--lambda", "-2"}).out);
    CHECK(j["is_rational"] == true);
    CHECK(j["closed_form_sup_gap"].get<double>() <= 1e-8);
    CHECK(j["phi_sup_gap"].get<double>() <= 1e-8);
    CHECK(std::abs(j["c"].get<double>()) <= 1e-10);
    const auto no = json::parse(run({"rationality", "--n", "1", "--k", "1", "--lambda", "-1.5"}).out);
    CHECK(no["is_rational"] == false);
    CHECK_FALSE(no.contains("closed_form_sup_gap"));
}

TEST_CASE("verify-ma reports are deterministic") {
    const std::vector<std::string> args{"verify-ma", "--model", "egg", "--n", "1", "--k", "1", "--p", "1",
                                        "--points", "20", "--seed", "5"};
    const auto a = run(args);
    const auto b = run(args);
    REQUIRE(a.code == kOk);
    CHECK(a.out == b.out);
    const auto j = json::parse(a.out);
    CHECK(j["points"].size() == 20);
    CHECK(j["max_residual"].get<double>() <= 1e-8);
    CHECK(j["tolerance"].get<double>() == 1e-8);
    CHECK(j["seed"] == 5);

    auto threaded = args;
    threaded.insert(threaded.end(), {"--threads", "3"});
    auto t = json::parse(run(threaded).out);
    CHECK(t["points"] == j["points"]);
    CHECK(t["mean_residual"] == j["mean_residual"]);
}

TEST_CASE("verify-ma product model and output file") {
    const std::string path = temp_path("ma.json");
    const auto o = run({"verify-ma", "--model", "product", "--factors", "1:1,1:2", "--k", "1", "--points", "5",
                        "--output", path});
    CHECK(o.code == kOk);
    CHECK(o.out.empty());
    std::ifstream in(path);
    const auto j = json::parse(in);
    CHECK(j["model"] == "product_ball([(1,1),(1,2)],1)");
    CHECK(j["tolerance"].get<double>() == 1e-5);
    std::remove(path.c_str());
    CHECK(run({"verify-ma", "--model", "product", "--factors", "1x2"}).code == kUsage);
}

TEST_CASE("bundle-check models") {
    const auto split = json::parse(run({"bundle-check", "--model", "sum-disk", "--powers", "1,2"}).out);
    CHECK(split["split_residual"].get<double>() >= 0.4);
    CHECK(split["curvature_split"] == false);

    const auto flat = run({"bundle-check", "--model", "flat", "--n", "2", "--k", "2"});
    CHECK(flat.code == kOk);
    CHECK(json::parse(flat.out)["ricci"].contains("error"));

    const std::string path = temp_path("metric.json");
    {
        std::ofstream f(path);
        f << R"({"n": 1, "k": 1, "terms": [{"i_multi": [1], "j_multi": [1], "re": 1.0, "im": 0.0}]})";
    }
    const auto poly = run({"bundle-check", "--model", "json", "--metric-file", path});
    CHECK(poly.code == kOk);
    std::remove(path.c_str());
}

TEST_CASE("selftest passes") {
    const auto o = run({"selftest"});
    CHECK(o.code == kOk);
    CHECK(o.out.find("FAIL") == std::string::npos);
}
