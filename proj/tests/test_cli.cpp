#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "covertlim/cli.hpp"

using namespace covertlim;

namespace {

RunConfig base_config(const std::string& command) {
    RunConfig cfg;
    cfg.command = command;
    cfg.scenario.eta = 0.01;
    cfg.scenario.n_b = 0.2;
    cfg.scenario.epsilon = 1e-3;
    cfg.scenario.m_modes = 1000;
    return cfg;
}

std::pair<int, std::string> run_capture(const RunConfig& cfg) {
    std::ostringstream out, warn;
    const int status = run(cfg, out, warn);
    return {status, out.str()};
}

}  // namespace

TEST_CASE("parse_grid: log and lin spacing") {
    const auto lin = parse_grid("0:1:lin:5");
    REQUIRE(lin.size() == 5);
    CHECK(lin.front() == 0.0);
    CHECK(lin.back() == 1.0);
    CHECK(lin[2] == doctest::Approx(0.5));

    const auto lg = parse_grid("100:1000000:log:5");
    REQUIRE(lg.size() == 5);
    CHECK(lg.front() == doctest::Approx(100.0));
    CHECK(lg.back() == doctest::Approx(1000000.0));
    CHECK(lg[1] == doctest::Approx(1000.0).epsilon(1e-12));

    CHECK(parse_grid("3:9:lin:1").size() == 1);

    CHECK_THROWS_AS(parse_grid("1:2:3"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("1:2:geom:4"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("1:2:lin:0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("-1:2:log:4"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("a:2:lin:4"), std::invalid_argument);
}

TEST_CASE("format_double: round-trips at full precision") {
    for (double v : {0.1, 1.0 / 3.0, 12345.6789e-7, 2.2250738585072014e-308}) {
        CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
    }
}

TEST_CASE("run: covert-bound emits the frozen schema and is deterministic") {
    const auto cfg = base_config("covert-bound");
    const auto [status, text] = run_capture(cfg);
    CHECK(status == 0);
    std::istringstream is(text);
    std::string header;
    std::getline(is, header);
    CHECK(header == "eta,nb,eps,m,fidelity_lb,pe_lb,exponent,log10_pe_lb");
    const auto second = run_capture(cfg);
    CHECK(second.second == text);
}

TEST_CASE("run: empty grid is a configuration error") {
    auto cfg = base_config("covert-curves");
    cfg.m_grid.clear();
    std::ostringstream out, warn;
    CHECK(run(cfg, out, warn) == 1);
    CHECK(out.str().empty());
    CHECK(warn.str().find("config-error") != std::string::npos);
}

TEST_CASE("run: unknown command and bad format are rejected") {
    auto cfg = base_config("frobnicate");
    std::ostringstream out, warn;
    CHECK(run(cfg, out, warn) == 1);
    auto cfg2 = base_config("covert-bound");
    cfg2.format = "xml";
    std::ostringstream out2, warn2;
    CHECK(run(cfg2, out2, warn2) == 1);
}

TEST_CASE("run: schema headers for the grid commands") {
    auto el = base_config("energy-limits");
    el.m_grid = {1000};
    auto [s1, t1] = run_capture(el);
    CHECK(s1 == 0);
    CHECK(t1.rfind("m,ns_min,ns_max\n", 0) == 0);

    auto cc = base_config("covert-curves");
    cc.m_grid = {1000};
    auto [s2, t2] = run_capture(cc);
    CHECK(s2 == 0);
    CHECK(t2.rfind("m,log10_pe_bound,log10_pe_tmsv,log10_pe_gcs\n", 0) == 0);

    auto pc = base_config("perfect-covert");
    pc.nb_grid = {0.2, 1.0};
    auto [s3, t3] = run_capture(pc);
    CHECK(s3 == 0);
    CHECK(t3.rfind("nb,chi_tmsv_qc,chi_tmsv_qb,chi_gcs_qc,chi_gcs_qb,ratio\n",
                   0) == 0);

    auto hm = base_config("heatmap");
    hm.scenario.m_modes = 100;
    hm.nb_grid = {0.2};
    hm.eps_grid = {1e-3, 1e-2};
    auto [s4, t4] = run_capture(hm);
    CHECK(s4 == 0);
    CHECK(t4.rfind("nb,eps,fid_ratio,flag\n", 0) == 0);
}

TEST_CASE("run: results are independent of the thread count") {
    auto cfg = base_config("covert-curves");
    cfg.m_grid = {100, 1000, 10000, 100000};
    cfg.threads = 1;
    const auto serial = run_capture(cfg);
    cfg.threads = 4;
    const auto parallel = run_capture(cfg);
    CHECK(serial.first == 0);
    CHECK(serial.second == parallel.second);

    auto hm = base_config("heatmap");
    hm.scenario.m_modes = 100;
    hm.nb_grid = {0.002, 0.2};
    hm.eps_grid = {1e-3, 1e-2, 1e-1};
    hm.threads = 1;
    const auto hs = run_capture(hm);
    hm.threads = 3;
    CHECK(run_capture(hm).second == hs.second);
}

TEST_CASE("run: json format emits parseable rows with the same keys") {
    auto cfg = base_config("covert-bound");
    cfg.format = "json";
    const auto [status, text] = run_capture(cfg);
    CHECK(status == 0);
    const auto parsed = nlohmann::json::parse(text);
    REQUIRE(parsed.is_array());
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0].contains("pe_lb"));
    CHECK(parsed[0].contains("exponent"));
}

TEST_CASE("run: golden file for a fixed covert-bound configuration") {
    const auto cfg = base_config("covert-bound");
    const auto [status, text] = run_capture(cfg);
    REQUIRE(status == 0);
    const std::string golden_path =
        std::string(COVERTLIM_SOURCE_DIR) + "/tests/golden/covert_bound.csv";
    std::ifstream f(golden_path, std::ios::binary);
    REQUIRE_MESSAGE(f.good(), "missing golden file: ", golden_path);
    std::stringstream buf;
    buf << f.rdbuf();
    CHECK(buf.str() == text);
}

TEST_CASE("run_to_path: writes files and reports unwritable paths") {
    auto cfg = base_config("covert-bound");
    cfg.output_path = "/nonexistent-dir/x.csv";
    std::ostringstream warn;
    CHECK(run_to_path(cfg, warn) == 1);
    CHECK(warn.str().find("config-error") != std::string::npos);
}
