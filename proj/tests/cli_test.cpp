#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "bifree/cli.hpp"

using nlohmann::json;

namespace {

struct RunResult {
    int code;
    std::string out;
    std::string err;
};

RunResult runCli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = bifree::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string writeTempCov() {
    const std::string path = "cli_test_cov.json";
    std::ofstream f(path);
    f << R"({"labels":[{"name":"z1","side":"l"},{"name":"w1","side":"r"}],)"
      << R"("matrix":[[1.0,0.5],[0.5,1.0]]})";
    return path;
}

}  // namespace

TEST_CASE("partitions count") {
    const auto r = runCli({"partitions", "--chi", "llrr", "--count"});
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc.at("count") == 14);
}

TEST_CASE("partitions listing is canonical JSON") {
    const auto r = runCli({"partitions", "--chi", "lr", "--pairs"});
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc.at("count") == 1);
    CHECK(doc.at("partitions")[0] == json::parse("[[1,2]]"));
}

TEST_CASE("mobius defaults to the full interval") {
    const auto r = runCli({"mobius", "--chi", "lrlr"});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out).at("mu") == "-5");
}

TEST_CASE("poisson cumulant") {
    const auto r =
        runCli({"cumulant", "--chi", "lrr", "--poisson", "1/2,2,3"});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out).at("value") == "9");
}

TEST_CASE("clt moment from a covariance file") {
    const std::string cov = writeTempCov();
    const auto r = runCli({"clt-moment", "--chi", "lr", "--cov", cov});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out).at("value").get<double>() == doctest::Approx(0.5));
    const auto r4 = runCli({"clt-moment", "--chi", "llrr", "--cov", cov});
    CHECK(json::parse(r4.out).at("value").get<double>() == doctest::Approx(1.25));
    std::remove(cov.c_str());
}

TEST_CASE("word moment and constants") {
    const auto r = runCli({"word-moment", "--word", "L1* L1", "--N", "2"});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out).at("value") == "1");
    const auto rc = runCli({"word-moment", "--word", "C[a] Cr[a]", "--N", "2", "--const",
                            "a=[[1,2],[3,4]]"});
    REQUIRE(rc.code == 0);
    // (1/2) Tr(A^2) = (1 + 4 + 6 + 6 + 16 - ...) -> A^2 = [[7,10],[15,22]].
    CHECK(json::parse(rc.out).at("value") == "29/2");
}

TEST_CASE("boolean subcommand emits the closed-form match") {
    const auto r = runCli({"boolean", "--colors", "1 1", "--N", "10"});
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc.at("value") == "4/5");
    CHECK(doc.at("closed_form_match") == true);
    CHECK(doc.at("limit") == "1");
}

TEST_CASE("monotone subcommand") {
    const auto r = runCli({"monotone", "--pattern", "s1^2", "--N", "10"});
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc.at("value") == "4/5");
    CHECK(doc.at("limit") == "1");
}

TEST_CASE("qconv reports exact convergence at q = 0") {
    const auto r = runCli({"qconv", "--word", "L1 L1*", "--q", "0", "--N", "2,4,8"});
    REQUIRE(r.code == 0);
    const auto jsonEnd = r.out.find("\nN,");
    const json doc = json::parse(r.out.substr(0, jsonEnd + 1));
    CHECK(doc.at("exact") == true);
}

TEST_CASE("qconv emits the error columns for deformed words") {
    const auto r = runCli({"qconv", "--word", "L1* L1", "--q", "1/2", "--N", "2,4,8"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("N,value,target,abs_error,error_times_N") != std::string::npos);
}

TEST_CASE("gauss-mc hits the pair covariance") {
    const std::string cov = writeTempCov();
    const auto r = runCli({"gauss-mc", "--cov", cov, "--word", "z1 w1", "--N", "30", "--samples",
                           "4000", "--seed", "9"});
    REQUIRE(r.code == 0);
    const json row = json::parse(r.out).at("rows").at(0);
    CHECK(row.at("target").get<double>() == doctest::Approx(0.5));
    CHECK(std::abs(row.at("mean").get<double>() - 0.5) <
          std::max(5 * row.at("stderr").get<double>(), 0.05));
    std::remove(cov.c_str());
}

TEST_CASE("deterministic reports for a fixed seed (modulo the timestamp)") {
    const std::string cov = writeTempCov();
    const std::vector<std::string> args{"gauss-mc", "--cov", cov,      "--word",  "z1 w1",
                                        "--N",      "10",    "--samples", "1000", "--seed", "4"};
    auto stripTimestamp = [](std::string s) {
        json doc = json::parse(s);
        doc.erase("timestamp");
        return doc.dump(2);
    };
    const auto a = runCli(args);
    const auto b = runCli(args);
    CHECK(stripTimestamp(a.out) == stripTimestamp(b.out));
    std::remove(cov.c_str());
}

TEST_CASE("convergence series fitting") {
    // Exact 1/N decay: slope -1, error_times_N constant.
    const auto rep = bifree::cli::emit_convergence(
        {{4, 1.5, 1.0}, {8, 1.25, 1.0}, {16, 1.125, 1.0}});
    REQUIRE(rep.has_slope);
    CHECK(rep.slope == doctest::Approx(-1.0));
    CHECK(rep.csv.find("2\n") != std::string::npos);  // error_times_N column = 2
    // All-zero errors report the exact sentinel.
    const auto exact = bifree::cli::emit_convergence({{4, 1.0, 1.0}, {8, 1.0, 1.0}});
    CHECK(exact.exact);
    CHECK_FALSE(exact.has_slope);
    CHECK_THROWS(bifree::cli::emit_convergence({{4, 1.0, 1.0}}));
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(runCli({"nonsense"}).code == 2);
    CHECK(runCli({"partitions"}).code == 2);                          // missing --chi
    CHECK(runCli({"word-moment", "--word", "Q9", "--N", "2"}).code == 2);
    CHECK(runCli({"mobius", "--chi", "xyz"}).code == 2);
}

TEST_CASE("csv output format") {
    const std::string cov = writeTempCov();
    const std::string path = "cli_test_row.csv";
    const auto r = runCli({"gauss-mc", "--cov", cov, "--word", "z1 w1", "--N", "10", "--samples",
                           "500", "--seed", "4", "--out", path});
    REQUIRE(r.code == 0);
    std::ifstream f(path);
    std::string header;
    std::getline(f, header);
    CHECK(header.find("mean") != std::string::npos);
    CHECK(header.find("stderr") != std::string::npos);
    std::remove(path.c_str());
    std::remove(cov.c_str());
}
