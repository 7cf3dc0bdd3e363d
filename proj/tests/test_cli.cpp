#include <catch2/catch.hpp>

#include <srtbp/golden.hpp>
#include <srtbp/io.hpp>

#include <cstdlib>
#include <fstream>

using namespace srtbp;

TEST_CASE("config round-trips losslessly") {
    RunConfig cfg;
    cfg.seed = 987654321;
    cfg.grid = 777;
    cfg.energy = -1.2345678901234567;
    cfg.alpha_mode = AlphaSelection::paper;
    cfg.regularization_k = -2.71828182845904523;
    cfg.neck_eps1 = 0.0123456789;

    const json j = cfg;
    const RunConfig back = j.get<RunConfig>();
    CHECK(back.seed == cfg.seed);
    CHECK(back.grid == cfg.grid);
    CHECK(back.energy == cfg.energy);
    CHECK(back.alpha_mode == cfg.alpha_mode);
    CHECK(back.regularization_k == cfg.regularization_k);
    CHECK(back.neck_eps1 == cfg.neck_eps1);

    // through text as the CLI would read it
    const json j2 = json::parse(j.dump());
    const RunConfig back2 = j2.get<RunConfig>();
    CHECK(back2.energy == cfg.energy);
    CHECK(back2.regularization_k == cfg.regularization_k);
}

TEST_CASE("config validation rejects out-of-range parameters") {
    RunConfig cfg;
    cfg.grid = 8;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = RunConfig{};
    cfg.energy = 0.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = RunConfig{};
    cfg.regularization_k = -0.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = RunConfig{};
    cfg.neck_eps1 = 0.06;  // above eps2
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = RunConfig{};
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("17-digit rendering is stable and lossless") {
    for (double v : {-1.0, primary_offset, 80.22583, 1e-300, -7.2146502015549285e-05}) {
        const std::string s = fmt17(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
        CHECK(fmt17(v) == s);
    }
}

TEST_CASE("golden rows are deterministic across in-process runs") {
    RunConfig cfg;
    cfg.grid = 128;  // light settings: determinism is what is under test
    cfg.theta_samples = 180;
    const auto a = run_golden_once(cfg);
    const auto b = run_golden_once(cfg);
    REQUIRE(a.size() == b.size());
    CHECK(golden_rows_to_string(a) == golden_rows_to_string(b));
}

TEST_CASE("golden table enumerates every criterion exactly once") {
    RunConfig cfg;
    cfg.grid = 128;
    cfg.theta_samples = 180;
    const auto rows = run_golden(cfg);
    REQUIRE(rows.size() == 13);
    for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].id == static_cast<int>(i) + 1);
        CHECK(!rows[i].name.empty());
        CHECK(!rows[i].reference.empty());
        CHECK(!rows[i].detail.empty());
    }
}

TEST_CASE("report serialization carries the scan verdicts") {
    const auto cert = estimate_alpha_beta(primary_offset, 64, 64, AlphaMode::paper_21_96);
    const auto scan = certify_contact(-2.0, cert, 128, 128, 32);
    const json j = scan;
    CHECK(j["pass"].get<bool>() == scan.pass);
    CHECK(j["min_witness"].get<double>() == scan.min_witness);
    CHECK(j["alpha_mode"].get<std::string>() == "paper-21.96");
}
