#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

using json = nlohmann::json;

namespace {

struct RunResult {
    int rc;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(CLI_PATH) + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf;
    RunResult r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
    const int status = pclose(p);
    r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

// parse CSV produced by the CLI: '#' metadata, then a header, then rows
struct Csv {
    std::vector<std::string> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

Csv parse_csv(const std::string& text) {
    Csv csv;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            csv.meta.push_back(line);
            continue;
        }
        std::istringstream ls(line);
        std::string tok;
        if (!header_seen) {
            while (std::getline(ls, tok, ',')) csv.columns.push_back(tok);
            header_seen = true;
            continue;
        }
        std::vector<double> row;
        while (std::getline(ls, tok, ',')) row.push_back(std::stod(tok));
        csv.rows.push_back(std::move(row));
    }
    return csv;
}

std::string write_tmp(const std::string& name, const std::string& content) {
    const std::string path = "/tmp/hyperlab_cli_test_" + name;
    std::ofstream f(path);
    f << content;
    return path;
}

const char* kSearchSpec =
    R"({"d":1,"p":6.0,"family":{"kind":"exp","m":1,"bounds":[[0.05],[50.0]]},)"
    R"("optimizer":{"iters":40,"tol":1e-5,"restarts":3},"seed":42,)"
    R"("grid":{"x_extent":10.0,"x_step":0.5,"t_extent":10.0,"t_step":0.5}})";

}  // namespace

TEST_CASE("usage errors exit with code 2") {
    CHECK(run("").rc == 2);
    CHECK(run("frobnicate").rc == 2);
    CHECK(run("conv --d 1 --n 3").rc == 2);          // missing --tau
    CHECK(run("conv --d 2 --n 4 --tau 3:5:3").rc == 2);
    CHECK(run("conv --d 1 --n 3 --tau 5:3:10").rc == 2);
    CHECK(run("constants --case d3p4").rc == 2);
    CHECK(run("quotient --family knapp").rc == 2);
    CHECK(run("bilinear --q 1.5 --k 0 --l 1").rc == 2);
}

TEST_CASE("I/O errors exit with code 3") {
    CHECK(run("conv --d 1 --n 2 --tau 1:2:3 -o /no/such/dir/out.csv").rc == 3);
    CHECK(run("search --spec /no/such/spec.json").rc == 3);
}

TEST_CASE("conv emits metadata, config and sandwich columns") {
    const RunResult r = run("conv --d 1 --n 3 --tau 3.001:50:25");
    REQUIRE(r.rc == 0);
    const Csv csv = parse_csv(r.out);
    REQUIRE(csv.meta.size() >= 2);
    CHECK(csv.meta[0].find("hyperlab conv v1") != std::string::npos);
    const auto cfg_pos = csv.meta[1].find("# config ");
    REQUIRE(cfg_pos == 0);
    const json cfg = json::parse(csv.meta[1].substr(9));
    CHECK(cfg["subcommand"] == "conv");
    CHECK(cfg["n"] == 3);
    REQUIRE(csv.columns ==
            std::vector<std::string>{"tau", "value", "lower_L", "upper_U",
                                     "error_estimate"});
    REQUIRE(csv.rows.size() == 25);
    const double sup = 2.0 * std::numbers::pi / std::sqrt(3.0);
    for (const auto& row : csv.rows) {
        CHECK(row[2] <= row[1]);
        CHECK(row[1] <= row[3]);
        CHECK(row[1] < sup);
    }
}

TEST_CASE("conv below the support is identically zero") {
    const RunResult r = run("conv --d 1 --n 2 --tau 1:1.9:10");
    REQUIRE(r.rc == 0);
    const Csv csv = parse_csv(r.out);
    REQUIRE(csv.rows.size() == 10);
    for (const auto& row : csv.rows) CHECK(row[1] == 0.0);
}

TEST_CASE("conv d=2 closed form") {
    const RunResult r = run("conv --d 2 --n 3 --tau 3:50:100");
    REQUIRE(r.rc == 0);
    const Csv csv = parse_csv(r.out);
    REQUIRE(csv.rows.size() == 100);
    const double four_pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
    for (const auto& row : csv.rows)
        CHECK(row[1] ==
              doctest::Approx(four_pi2 * (1.0 - 3.0 / row[0])).epsilon(1e-14));
}

TEST_CASE("constants report") {
    const RunResult r = run("constants --case all");
    REQUIRE(r.rc == 0);
    const json rep = json::parse(r.out);
    CHECK(rep["all_consistent"] == true);
    REQUIRE(rep["constants"].size() == 3);
    const double two_pi = 2.0 * std::numbers::pi;
    for (const auto& c : rep["constants"]) {
        CHECK(c["consistent"] == true);
        const double dec = c["decimal"].get<double>();
        if (c["case"] == "d1p6")
            CHECK(dec == doctest::Approx(std::pow(3.0, -1.0 / 12.0) *
                                         std::sqrt(two_pi)).epsilon(1e-12));
        else if (c["case"] == "d2p4")
            CHECK(dec == doctest::Approx(std::pow(2.0, 0.75) *
                                         std::numbers::pi).epsilon(1e-12));
        else
            CHECK(dec == doctest::Approx(std::pow(two_pi, 5.0 / 6.0)).epsilon(1e-12));
    }
}

TEST_CASE("quotient column increases toward the sup") {
    const RunResult r = run("quotient --family exp --a 1,10,100");
    REQUIRE(r.rc == 0);
    const Csv csv = parse_csv(r.out);
    REQUIRE(csv.rows.size() == 3);
    CHECK(csv.rows[0][1] < csv.rows[1][1]);
    CHECK(csv.rows[1][1] < csv.rows[2][1]);
    const double sup = 2.0 * std::numbers::pi / std::sqrt(3.0);
    CHECK(csv.rows[2][2] > 0.0);
    CHECK(csv.rows[2][2] < 0.02 * sup);
}

TEST_CASE("caps report verifies the recentering bound") {
    const RunResult r = run("caps --d 2 --n 5 --j 7");
    REQUIRE(r.rc == 0);
    const json rep = json::parse(r.out);
    CHECK(rep["within_bound"] == true);
    CHECK(rep["max_sampled_abs_xi"].get<double>() <=
          2.0 * std::sqrt(2.0) * std::numbers::pi);

    const RunResult r1 = run("caps --d 1 --k 5");
    REQUIRE(r1.rc == 0);
    const json rep1 = json::parse(r1.out);
    CHECK(rep1["isometry"]["boost_t"].get<double>() ==
          doctest::Approx(-std::tanh(5.0)).epsilon(1e-12));
    CHECK(rep1["within_bound"] == true);
    CHECK(rep1["cap_measure"].get<double>() == 1.0);
}

TEST_CASE("bilinear report") {
    const RunResult r = run("bilinear --q 4 --k 0 --l 6");
    REQUIRE(r.rc == 0);
    const json rep = json::parse(r.out);
    CHECK(rep["finite"] == true);
    const double ratio = rep["decay_normalized_ratio"].get<double>();
    CHECK(ratio > 0.0);
    CHECK(ratio < 1.5);
}

TEST_CASE("search runs from a JSON spec and is reproducible") {
    const std::string spec = write_tmp("spec.json", kSearchSpec);
    const RunResult a = run("search --spec " + spec);
    REQUIRE(a.rc == 0);
    const RunResult b = run("search --spec " + spec);
    CHECK(a.out == b.out);  // byte-for-byte

    const Csv csv = parse_csv(a.out);
    REQUIRE(!csv.rows.empty());
    for (std::size_t i = 1; i < csv.rows.size(); ++i)
        CHECK(csv.rows[i][2] >= csv.rows[i - 1][2]);
    bool conclusive = false;
    for (const auto& m : csv.meta)
        conclusive = conclusive || m == "# conclusive true";
    CHECK(conclusive);
}

TEST_CASE("search spec validation failures exit with code 2") {
    const std::string bad = write_tmp(
        "spec_bad.json",
        R"({"d":1,"p":6.0,"family":{"kind":"exp","m":1,"bounds":[[0.05],[50.0]]},)"
        R"("optimizer":{"iters":40,"tol":1e-5,"restarts":3},"seed":42,"bogus":1})");
    CHECK(run("search --spec " + bad).rc == 2);
    const std::string notjson = write_tmp("spec_notjson.json", "not json at all");
    CHECK(run("search --spec " + notjson).rc == 2);
    const std::string badp = write_tmp(
        "spec_badp.json",
        R"({"d":1,"p":5.0,"family":{"kind":"exp","m":1,"bounds":[[0.05],[50.0]]},)"
        R"("optimizer":{"iters":40,"tol":1e-5,"restarts":3},"seed":42})");
    CHECK(run("search --spec " + badp).rc == 2);
}

TEST_CASE("inconclusive search exits with code 4 and a partial report") {
    // every evaluation on this tiny grid trips the tail flag
    const std::string spec = write_tmp(
        "spec_inc.json",
        R"({"d":1,"p":6.0,"family":{"kind":"exp","m":1,"bounds":[[20.0],[50.0]]},)"
        R"("optimizer":{"iters":10,"tol":1e-5,"restarts":2},"seed":42,)"
        R"("grid":{"x_extent":3.0,"x_step":0.5,"t_extent":3.0,"t_step":0.5}})");
    const RunResult r = run("search --spec " + spec);
    CHECK(r.rc == 4);
    CHECK(r.out.find("# conclusive false") != std::string::npos);
}
