#include "doctest.h"

#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cvdimer/model.hpp"

using namespace cvdimer;

TEST_CASE("effective params at the N=60 twin point") {
    const auto e = effective_params(ModelParams::twin(60, 0.01, 0.12));
    CHECK(e.u_a == doctest::Approx(9.0).epsilon(1e-14));
    CHECK(e.u_b == doctest::Approx(9.0).epsilon(1e-14));
    CHECK(e.tau_a == 30.0);
    CHECK(e.w == doctest::Approx(108.0).epsilon(1e-14));
    CHECK(e.gamma == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(e.eps_a == 1.0 / 30.0);
}

TEST_CASE("trivial effective params") {
    auto p = ModelParams::twin(8, 0.2, 0.0);
    CHECK(effective_params(p).w == 0.0);
    const auto e = effective_params(ModelParams::twin(2, 0.0, 0.3));
    CHECK(e.u_a == 0.0);
    CHECK(e.tau_a == 1.0);
    CHECK(e.gamma == 0.0);
}

TEST_CASE("validation rejects bad parameters") {
    ModelParams p;
    p.N_a = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = ModelParams{};
    p.J_b = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = ModelParams{};
    p.U_a = -0.1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    CHECK_THROWS(ModelParams::twin(5, 0.0, 0.0));
}

TEST_CASE("symmetric case detection") {
    CHECK(is_symmetric_case(effective_params(ModelParams::twin(40, 0.3, 0.1))));

    ModelParams p{};
    p.N_b = 10;
    p.N_a = 20;
    p.U_b = 0.4;
    p.U_a = 0.1;
    p.J_b = 1.0;
    p.J_a = 0.5;
    CHECK(is_symmetric_case(effective_params(p)));

    p.U_a = p.U_b;
    p.J_a = p.J_b;
    CHECK_FALSE(is_symmetric_case(effective_params(p)));
}

TEST_CASE("symmetry survives the N_a -> cN_a, U_a -> U_a/c^2, J_a -> J_a/c rescaling") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 0.5);
    for (int c : {2, 3, 5}) {
        ModelParams p = ModelParams::twin(16, U(rng), 0.05, 1.3);
        const bool before = is_symmetric_case(effective_params(p));
        p.N_a *= c;
        p.U_a /= c * c;
        p.J_a /= c;
        CHECK(is_symmetric_case(effective_params(p)) == before);
    }
}

TEST_CASE("homogeneity under a common energy scale") {
    ModelParams p{0.7, 1.1, 0.02, 0.05, -0.3, 12, 20};
    const auto e = effective_params(p);
    const double s = 3.5;
    ModelParams q = p;
    q.J_a *= s;
    q.J_b *= s;
    q.U_a *= s;
    q.U_b *= s;
    q.W *= s;
    const auto f = effective_params(q);
    CHECK(f.u_a == doctest::Approx(s * e.u_a));
    CHECK(f.u_b == doctest::Approx(s * e.u_b));
    CHECK(f.tau_a == doctest::Approx(s * e.tau_a));
    CHECK(f.tau_b == doctest::Approx(s * e.tau_b));
    CHECK(f.w == doctest::Approx(s * e.w));
    CHECK(f.gamma == doctest::Approx(s * e.gamma));
    CHECK(f.eps_a == e.eps_a);
    CHECK(f.eps_b == e.eps_b);
}

TEST_CASE("critical coupling") {
    CHECK(critical_coupling(ModelParams::twin(60, 0.01, 0.0)) == doctest::Approx(4.0 / 60 + 0.01).epsilon(1e-15));
    CHECK(critical_coupling(ModelParams::twin(60, 0.01, 0.0)) == doctest::Approx(0.0766666).epsilon(1e-6));
    CHECK(critical_coupling(ModelParams::twin(200000, 0.01, 0.0)) == doctest::Approx(0.01).epsilon(1e-3));
    CHECK(critical_coupling(ModelParams::twin(4, 0.0, 0.0)) == doctest::Approx(1.0));
    ModelParams p = ModelParams::twin(10, 0.1, 0.0);
    p.N_b = 6;
    CHECK_THROWS_AS(critical_coupling(p), std::invalid_argument);
}

TEST_CASE("regime classification") {
    EffectiveParams e{9, 9, 30, 30, 0.9, 0.3, 1.0 / 30, 1.0 / 30};
    CHECK(classify_regime(e) == Regime{InteractionSign::repulsive, Strength::weak});
    e.w = 108;
    CHECK(classify_regime(e) == Regime{InteractionSign::repulsive, Strength::strong});
    e.w = -69;
    CHECK(classify_regime(e) == Regime{InteractionSign::attractive, Strength::critical});
    e.w = -69.0 * (1 + 1e-11);
    CHECK(classify_regime(e).strength == Strength::critical);
    e.u_b = 10;
    CHECK_THROWS_AS(classify_regime(e), std::invalid_argument);
}

TEST_CASE("critical coupling agrees with classification") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 0.2);
    std::uniform_real_distribution<double> frac(0.0, 2.0);
    std::uniform_int_distribution<int> half(1, 60);
    for (int t = 0; t < 200; ++t) {
        const int N = 2 * half(rng);
        const double u = U(rng);
        const double Wc = 4.0 / N + u;
        const double W = frac(rng) * Wc;
        if (std::abs(W - Wc) < 1e-6 * Wc) continue;
        const auto r = classify_regime(effective_params(ModelParams::twin(N, u, W)));
        CHECK((W < Wc) == (r.strength == Strength::weak));
    }
}

TEST_CASE("params from json") {
    const auto j = nlohmann::json::parse(R"({"J_a": 1.0, "U_a": 0.01, "W": 0.12, "N_a": 30})");
    const auto p = params_from_json(j);
    CHECK(p.J_b == 1.0);
    CHECK(p.U_b == 0.01);
    CHECK(p.N_b == 30);
    CHECK(p.W == 0.12);
    CHECK_THROWS(params_from_json(nlohmann::json::parse(R"({"N_a": 2.5})")));
}
