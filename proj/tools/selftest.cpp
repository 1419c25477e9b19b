#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"

namespace keb::cli {

namespace {

struct Outcome {
    int code = 0;
    std::string out;
};

Outcome run(std::vector<std::string> args) {
    std::ostringstream out, err;
    Outcome o;
    o.code = run_cli(args, out, err);
    o.out = out.str();
    return o;
}

/// Fields of the CSV row whose first column equals `r`.
std::vector<double> csv_row(const std::string& csv, const std::string& r) {
    std::istringstream lines(csv);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.rfind(r + ",", 0) != 0) continue;
        std::vector<double> fields;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) fields.push_back(std::stod(cell));
        return fields;
    }
    return {};
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

struct Check {
    std::string name;
    std::function<bool()> body;
};

std::vector<Check> checks() {
    using nlohmann::json;
    return {
        {"profile (1,1,-2) r=0.5 has Z=0.75 and phi=0.75",
         [] {
             const auto o = run({"profile", "--n", "1", "--k", "1", "--lambda", "-2"});
             const auto row = csv_row(o.out, "0.5");
             return o.code == kOk && row.size() == 8 && near(row[1], 0.75, 1e-8) && near(row[3], 0.75, 1e-8);
         }},
        {"profile (1,2,-1) r=1 has phi_prime=-2",
         [] {
             const auto o = run({"profile", "--n", "1", "--k", "2", "--eigs", "-1"});
             const auto row = csv_row(o.out, "1");
             return o.code == kOk && row.size() == 8 && near(row[4], -2.0, 1e-6);
         }},
        {"profile with n=0 is a usage error",
         [] { return run({"profile", "--n", "0", "--k", "1", "--lambda", "-2"}).code == kUsage; }},
        {"--lambda together with --eigs is a usage error",
         [] { return run({"profile", "--lambda", "-2", "--eigs", "-2"}).code == kUsage; }},
        {"rationality (1,1,-2) is rational with the closed form",
         [] {
             const auto o = run({"rationality", "--n", "1", "--k", "1", "--lambda", "-2"});
             const auto j = json::parse(o.out);
             return o.code == kOk && j["is_rational"] == true && j["closed_form_sup_gap"].get<double>() <= 1e-8;
         }},
        {"rationality (1,1,-1.5) is not rational",
         [] {
             const auto o = run({"rationality", "--n", "1", "--k", "1", "--lambda", "-1.5"});
             return o.code == kOk && json::parse(o.out)["is_rational"] == false;
         }},
        {"rationality (3,2,-2) is rational",
         [] {
             const auto o = run({"rationality", "--n", "3", "--k", "2", "--lambda", "-2"});
             return o.code == kOk && json::parse(o.out)["is_rational"] == true;
         }},
        {"verify-ma egg(1,1,1) on 20 points stays below 1e-8",
         [] {
             const auto o = run({"verify-ma", "--model", "egg", "--n", "1", "--k", "1", "--p", "1", "--points", "20"});
             return o.code == kOk && json::parse(o.out)["max_residual"].get<double>() <= 1e-8;
         }},
        {"bundle-check sum-disk (1,2) is not split",
         [] {
             const auto o = run({"bundle-check", "--model", "sum-disk", "--powers", "1,2"});
             return o.code == kOk && json::parse(o.out)["split_residual"].get<double>() >= 0.4;
         }},
        {"bundle-check sum-disk (1,1) is split with constant Ricci -1",
         [] {
             const auto o = run({"bundle-check", "--model", "sum-disk", "--powers", "1,1", "--require",
                                 "split,negative,constant-ricci"});
             if (o.code != kOk) return false;
             const auto j = json::parse(o.out);
             for (const auto& point : j["ricci"]["eigenvalues"])
                 if (!near(point[0].get<double>(), -1.0, 1e-4)) return false;
             return true;
         }},
    };
}

} // namespace

int run_selftest(std::ostream& out) {
    int failed = 0;
    for (const auto& check : checks()) {
        bool ok = false;
        try {
            ok = check.body();
        } catch (const std::exception&) {
            ok = false;
        }
        out << (ok ? "PASS " : "FAIL ") << check.name << "\n";
        if (!ok) ++failed;
    }
    out << (failed == 0 ? "selftest passed" : "selftest failed") << "\n";
    return failed == 0 ? kOk : kThreshold;
}

} // namespace keb::cli
