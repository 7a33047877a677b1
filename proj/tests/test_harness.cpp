#include "doctest.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cvdimer/harness.hpp"

using namespace cvdimer;

namespace {

std::string csv(const std::vector<SweepRecord>& r) {
    std::ostringstream os;
    write_levels_csv(os, r);
    return os.str();
}

AmplitudeGrid grid(Eigen::MatrixXd v) {
    AmplitudeGrid g;
    g.values = std::move(v);
    return g;
}

}  // namespace

TEST_CASE("sweep specs") {
    const auto s = parse_sweep("-0.15:0.15:21");
    CHECK(s.count == 21);
    const auto v = s.values();
    CHECK(v.front() == -0.15);
    CHECK(v.back() == 0.15);
    CHECK(v[10] == doctest::Approx(0.0));
    CHECK(parse_sweep("0.1:0.2:1").values() == std::vector<double>{0.1});
    CHECK_THROWS(parse_sweep("0.1:0.2"));
    CHECK_THROWS(parse_sweep("a:b:3"));
    CHECK_THROWS(parse_sweep("0:1:0"));
}

TEST_CASE("config from json") {
    const auto j = nlohmann::json::parse(R"({
        "J_a": 1.0, "U_a": 0.01, "W": 0.001, "N_a": 30,
        "sweep": "0:0.1:5", "levels": 8, "n_max": 5, "solver": "dense", "format": "json"})");
    const auto cfg = config_from_json(j);
    CHECK(cfg.params.N_b == 30);
    REQUIRE(cfg.sweep);
    CHECK(cfg.sweep->count == 5);
    CHECK(cfg.levels == 8);
    CHECK(cfg.n_max == 5);
    CHECK(cfg.m_max == 8);
    CHECK(cfg.solver.kind == SolverKind::dense);
    CHECK(cfg.format == "json");
    CHECK_NOTHROW(cfg.validate());

    const auto obj = config_from_json(nlohmann::json::parse(R"({"N_a": 4, "sweep": {"start": 0, "stop": 1, "count": 3}})"));
    CHECK(obj.sweep->values().size() == 3);
    RunConfig bad = cfg;
    bad.format = "xml";
    CHECK_THROWS(bad.validate());
    bad = cfg;
    bad.levels = 0;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("sweep is ordered, tagged and deterministic") {
    RunConfig cfg;
    cfg.params = ModelParams::twin(20, 0.01, 0.0);
    cfg.sweep = parse_sweep("-0.4:0.4:9");
    cfg.levels = 6;
    cfg.threads = 1;
    const auto one = sweep_coupling(cfg);
    cfg.threads = 3;
    const auto three = sweep_coupling(cfg);
    CHECK(csv(one) == csv(three));
    CHECK(csv(one) == csv(sweep_coupling(cfg)));
    REQUIRE(one.size() == 9);
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].error.empty());
        CHECK(one[i].W == doctest::Approx(-0.4 + 0.1 * i));
        auto p = cfg.params;
        p.W = one[i].W;
        CHECK(one[i].regime == to_string(classify_regime(effective_params(p))));
        CHECK(one[i].exact_rel.size() == 6);
        CHECK(one[i].exact_rel.front() == 0.0);
        if (!one[i].cv_rel.empty()) CHECK(one[i].cv_rel.front() == 0.0);
    }
    CHECK(csv(one).rfind("W,index,exact_rel,cv_rel,regime\n", 0) == 0);
}

TEST_CASE("critical points carry no cv levels") {
    RunConfig cfg;
    cfg.params = ModelParams::twin(20, 0.01, 0.0);
    const auto r = sweep_point(cfg, critical_coupling(cfg.params));
    CHECK(r.error.empty());
    CHECK(r.cv_rel.empty());
    CHECK(r.regime.find("critical") != std::string::npos);
}

TEST_CASE("failed points are recorded, not fatal") {
    RunConfig cfg;
    cfg.params = ModelParams::twin(20, 0.01, 0.0);
    cfg.levels = 6;
    cfg.solver.kind = SolverKind::lanczos;
    cfg.solver.dense_threshold = 1;
    cfg.solver.max_matvec = 3;
    cfg.sweep = parse_sweep("0:0.1:2");
    const auto r = sweep_coupling(cfg);
    REQUIRE(r.size() == 2);
    CHECK_FALSE(r[0].error.empty());
    CHECK(csv(r).find("error") != std::string::npos);
}

TEST_CASE("locate collapse on a synthetic gap curve") {
    std::vector<SweepRecord> recs;
    for (int i = 0; i <= 20; ++i) {
        SweepRecord r;
        r.W = 0.01 * i;
        r.gap = std::pow(r.W - 0.0737, 2) + 0.5;
        recs.push_back(r);
    }
    const auto c = locate_collapse(recs);
    CHECK_FALSE(c.at_boundary);
    CHECK(c.W == doctest::Approx(0.0737).epsilon(1e-9));
    recs.resize(5);
    CHECK(locate_collapse(recs).at_boundary);
    recs.resize(2);
    CHECK_THROWS(locate_collapse(recs));
}

TEST_CASE("collapse estimate is stable under step halving") {
    RunConfig cfg;
    cfg.params = ModelParams::twin(30, 0.01, 0.0);
    cfg.levels = 3;
    cfg.sweep = parse_sweep("0.04:0.2:9");
    const auto coarse = locate_collapse(sweep_coupling(cfg));
    cfg.sweep = parse_sweep("0.04:0.2:17");
    const auto fine = locate_collapse(sweep_coupling(cfg));
    CHECK_FALSE(coarse.at_boundary);
    CHECK(std::abs(fine.W - coarse.W) < 0.02);
}

TEST_CASE("overlaps") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
    a(0, 0) = 0.5;
    a(1, 1) = 0.5;
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(3, 3);
    b(2, 2) = 1.0;
    CHECK(density_overlap(grid(a), grid(a)) == doctest::Approx(1.0));
    CHECK(density_overlap(grid(a), grid(b)) == 0.0);
    CHECK(density_overlap(grid(a), grid(Eigen::MatrixXd::Constant(3, 3, 1.0 / 9))) == doctest::Approx(2 * std::sqrt(0.5 / 9)));
    CHECK_THROWS(density_overlap(grid(a), grid(Eigen::MatrixXd::Zero(2, 3))));
}

TEST_CASE("spectrum comparison") {
    const auto r = compare_spectra({0, 1, 2, 4}, {0, 1.1, 2, 3}, 4);
    CHECK(r.abs_dev[1] == doctest::Approx(0.1));
    CHECK(r.max_abs == doctest::Approx(1.0));
    CHECK(r.max_rel == doctest::Approx(0.25));
    CHECK(r.mean_abs == doctest::Approx(1.1 / 4));
    CHECK_THROWS(compare_spectra({0, 1}, {0, 1, 2}, 3));
    const auto j = report_json(r);
    CHECK(j["max_abs"].get<double>() == doctest::Approx(1.0));
    CHECK_FALSE(j.contains("fit_exponent"));
}

TEST_CASE("power law fit") {
    std::vector<double> N{40, 60, 100, 200};
    std::vector<double> d;
    for (double n : N) d.push_back(3.0 * std::pow(n, -1.7));
    CHECK(fit_power_law_exponent(N, d) == doctest::Approx(1.7).epsilon(1e-12));
    CHECK_THROWS(fit_power_law_exponent({1}, {1}));
    CHECK_THROWS(fit_power_law_exponent({1, 2}, {1, 0}));
}

TEST_CASE("peaks") {
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(10, 10);
    v(2, 2) = 1.0;
    v(7, 7) = 0.8;
    v(5, 5) = 0.05;  // below 10 percent of max
    const auto p = find_peaks(grid(v));
    REQUIRE(p.size() == 2);
    CHECK(p[0] == std::pair{2, 2});
    CHECK(peaks_match(p, {{8, 6}, {3, 1}}, 1));
    CHECK_FALSE(peaks_match(p, {{8, 6}, {5, 1}}, 1));
    CHECK_FALSE(peaks_match(p, {{2, 2}}, 5));
}

TEST_CASE("labels by rank") {
    const EffectiveParams e{9, 9, 30, 30, 0.9, 0.3, 1.0 / 30, 1.0 / 30};
    const auto lv = cv_levels(e, 3, 3);
    CHECK(cv_label_at_rank(lv, 0) == std::pair{0, 0});
    CHECK(cv_label_at_rank(lv, 1) == std::pair{0, 1});
    CHECK(cv_label_at_rank(lv, 2) == std::pair{1, 0});
    const auto strong = cv_levels(EffectiveParams{9, 9, 30, 30, 108, 0.3, 1.0 / 30, 1.0 / 30}, 3, 3);
    CHECK(cv_label_at_rank(strong, 1) == std::pair{0, 0});
    CHECK(cv_label_at_rank(strong, 2) == cv_label_at_rank(strong, 3));
    CHECK_THROWS(cv_label_at_rank(lv, 100));
}

TEST_CASE("compare point at the weak N=60 point") {
    const auto pc = compare_point(ModelParams::twin(60, 0.01, 0.001), 15);
    CHECK(pc.exact_rel.size() == 15);
    for (std::size_t l = 1; l < 15; ++l) CHECK(pc.report.rel_dev[l] < 0.05);
}

TEST_CASE("json writers round to 15 digits") {
    CHECK(round15(0.1 + 0.2) == 0.3);
    CollapseEstimate c;
    c.W = 0.0865;
    c.curve = {{0.08, 1.0}, {0.09, 0.5}};
    const auto j = collapse_json(c);
    CHECK(j["estimate"].get<double>() == 0.0865);
    CHECK(j["gap_curve"].size() == 2);
    SweepRecord r;
    r.W = 0.1;
    r.exact_rel = {0.0, 1.0};
    const auto lj = levels_json({r});
    CHECK(lj[0]["exact_rel"][1].get<double>() == 1.0);
}
