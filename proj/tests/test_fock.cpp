#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "cvdimer/fock.hpp"

using namespace cvdimer;

namespace {

std::vector<double> eigs(const SymmetricMatrix& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.to_dense(), Eigen::EigenvaluesOnly);
    const auto& v = es.eigenvalues();
    return {v.data(), v.data() + v.size()};
}

// single-species dimer, written out independently
Eigen::MatrixXd species_block(int N, double J, double U) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(N + 1, N + 1);
    for (int n = 0; n <= N; ++n) {
        const int r = N - n;
        h(n, n) = 0.5 * U * (n * (n - 1) + r * (r - 1));
        if (n > 0) h(n, n - 1) = h(n - 1, n) = -J * std::sqrt(double(n) * (r + 1));
    }
    return h;
}

}  // namespace

TEST_CASE("basis dimensions and indexing") {
    CHECK(build_basis(1, 1).dim() == 4);
    CHECK(build_basis(30, 30).dim() == 961);
    CHECK(build_basis(100, 100).dim() == 10201);
    CHECK(build_basis(1, 0).dim() == 2);
    CHECK_THROWS_AS(build_basis(2000, 2000), std::length_error);

    const auto b = build_basis(5, 7);
    for (std::size_t i = 0; i < b.dim(); ++i) {
        const auto [n, m] = b.occupations(i);
        CHECK(b.index(n, m) == i);
        CHECK(i == static_cast<std::size_t>(n * 8 + m));
    }
}

TEST_CASE("4x4 analytic spectrum") {
    const double W = 0.1;
    ModelParams p{1, 1, 0, 0, W, 1, 1};
    const auto ev = eigs(build_hamiltonian(p, build_basis(1, 1)));
    std::vector<double> ref{0.0, W, 0.5 * (W + std::sqrt(W * W + 16)), 0.5 * (W - std::sqrt(W * W + 16))};
    std::sort(ref.begin(), ref.end());
    for (int i = 0; i < 4; ++i) CHECK(ev[i] == doctest::Approx(ref[i]).epsilon(1e-13));
}

TEST_CASE("one particle in two modes") {
    ModelParams p{0.7, 1, 0, 0, 0.3, 1, 1};
    p.N_b = 0;
    const auto ev = eigs(build_hamiltonian(p, build_basis(1, 0)));
    CHECK(ev[0] == doctest::Approx(-0.7));
    CHECK(ev[1] == doctest::Approx(0.7));
}

TEST_CASE("decoupled species give sums of block energies") {
    ModelParams p{1.0, 0.6, 0.3, 0.1, 0.0, 4, 3};
    const auto ev = eigs(build_hamiltonian(p, build_basis(4, 3)));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> a(species_block(4, 1.0, 0.3));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> b(species_block(3, 0.6, 0.1));
    std::vector<double> sums;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 4; ++j) sums.push_back(a.eigenvalues()(i) + b.eigenvalues()(j));
    std::sort(sums.begin(), sums.end());
    for (std::size_t i = 0; i < sums.size(); ++i) CHECK(ev[i] == doctest::Approx(sums[i]).epsilon(1e-12));
}

TEST_CASE("matrix elements match the explicit formula") {
    ModelParams p{0.9, 1.2, 0.05, 0.08, -0.04, 6, 4};
    const auto b = build_basis(6, 4);
    const auto H = build_hamiltonian(p, b).to_dense();
    CHECK((H - H.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(H.allFinite());
    for (std::size_t i = 0; i < b.dim(); ++i) {
        const auto [n, m] = b.occupations(i);
        const int nr = 6 - n;
        const int mr = 4 - m;
        const double d = 0.5 * 0.05 * (n * (n - 1) + nr * (nr - 1)) + 0.5 * 0.08 * (m * (m - 1) + mr * (mr - 1)) -
                         0.04 * (n * m + nr * mr);
        CHECK(H(i, i) == doctest::Approx(d).epsilon(1e-14));
        for (std::size_t j = 0; j < b.dim(); ++j) {
            if (j == i) continue;
            const auto [n2, m2] = b.occupations(j);
            double ref = 0.0;
            if (m2 == m && n2 == n - 1) ref = -0.9 * std::sqrt(double(n) * (nr + 1));
            if (m2 == m && n2 == n + 1) ref = -0.9 * std::sqrt(double(n + 1) * nr);
            if (n2 == n && m2 == m - 1) ref = -1.2 * std::sqrt(double(m) * (mr + 1));
            if (n2 == n && m2 == m + 1) ref = -1.2 * std::sqrt(double(m + 1) * mr);
            CHECK(H(i, j) == ref);
        }
    }
}

TEST_CASE("trace equals the summed diagonal formula") {
    ModelParams p = ModelParams::twin(40, 0.01, 0.07);
    const auto b = build_basis(20, 20);
    double t = 0.0;
    for (int n = 0; n <= 20; ++n)
        for (int m = 0; m <= 20; ++m) t += diagonal_element(p, n, m);
    CHECK(build_hamiltonian(p, b).trace() == doctest::Approx(t).epsilon(1e-14));
}

TEST_CASE("sparse storage agrees with dense and stays in sector") {
    ModelParams p{1.0, 0.8, 0.02, 0.03, 0.05, 9, 7};
    const auto b = build_basis(9, 7);
    const auto dense = build_hamiltonian(p, b);
    const auto sparse = build_hamiltonian(p, b, 10);
    CHECK(dense.is_dense());
    CHECK_FALSE(sparse.is_dense());
    CHECK((dense.to_dense() - sparse.to_dense()).cwiseAbs().maxCoeff() == 0.0);
    for (const auto& e : sparse.upper_entries()) {
        CHECK(e.row <= e.col);
        CHECK(e.col < b.dim());
        const auto [n1, m1] = b.occupations(e.row);
        const auto [n2, m2] = b.occupations(e.col);
        // one boson hop or diagonal, never anything else
        CHECK(std::abs(n1 - n2) + std::abs(m1 - m2) <= 1);
    }
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    Eigen::VectorXd x(b.dim());
    for (auto& v : x) v = g(rng);
    CHECK(((dense * x) - (sparse * x)).norm() < 1e-12 * x.norm());
}

TEST_CASE("from_upper mirrors and sums duplicates") {
    std::vector<SymmetricMatrix::Entry> up{{0, 1, 2.0}, {0, 1, 1.0}, {1, 1, 4.0}, {0, 2, -1.0}};
    for (std::size_t thr : {std::size_t{100}, std::size_t{1}}) {
        const auto m = SymmetricMatrix::from_upper(3, up, thr);
        CHECK(m(0, 1) == 3.0);
        CHECK(m(1, 0) == 3.0);
        CHECK(m(2, 0) == -1.0);
        CHECK(m(1, 1) == 4.0);
        CHECK(m(2, 2) == 0.0);
    }
    CHECK_THROWS(SymmetricMatrix::from_upper(3, {{2, 1, 1.0}}));
}

TEST_CASE("b parity transform") {
    const auto b = build_basis(3, 4);
    std::vector<double> uniform(b.dim(), 0.25);
    const Eigen::VectorXd u = b_parity_transform(b, uniform);
    CHECK((u.array() == 0.25).all());

    std::vector<double> e(b.dim(), 0.0);
    e[b.index(0, 4)] = 1.0;
    const Eigen::VectorXd t = b_parity_transform(b, e);
    CHECK(t(static_cast<Eigen::Index>(b.index(0, 0))) == 1.0);
    CHECK(t.sum() == 1.0);

    std::vector<double> r(b.dim());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::sin(1.0 + i);
    const Eigen::VectorXd once = b_parity_transform(b, r);
    const Eigen::VectorXd twice = b_parity_transform(b, std::vector<double>(once.data(), once.data() + once.size()));
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(twice(static_cast<Eigen::Index>(i)) == r[i]);

    CHECK_THROWS(b_parity_transform(b, std::vector<double>(3, 0.0)));
}

TEST_CASE("W reflection identity on the full spectrum") {
    for (double W : {0.05, 0.12, 0.3}) {
        auto p = ModelParams::twin(16, 0.02, W);
        auto q = p;
        q.W = -W;
        const auto b = build_basis(8, 8);
        const auto e_plus = eigs(build_hamiltonian(p, b));
        const auto e_minus = eigs(build_hamiltonian(q, b));
        for (std::size_t i = 0; i < e_plus.size(); ++i)
            CHECK(std::abs(e_minus[i] - (e_plus[i] - W * 64)) < 1e-10);
    }
}

TEST_CASE("parity conjugation maps H(W) to H(-W) plus a constant") {
    auto p = ModelParams::twin(10, 0.03, 0.2);
    auto q = p;
    q.W = -0.2;
    const auto b = build_basis(5, 5);
    const auto Hp = build_hamiltonian(p, b).to_dense();
    const auto Hm = build_hamiltonian(q, b).to_dense();
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(b.dim(), b.dim());
    for (std::size_t i = 0; i < b.dim(); ++i) {
        const auto [n, m] = b.occupations(i);
        P(b.index(n, 5 - m), i) = 1.0;
    }
    const Eigen::MatrixXd diff = P * Hp * P.transpose() - Hm;
    CHECK((diff - 0.2 * 25 * Eigen::MatrixXd::Identity(b.dim(), b.dim())).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("coordinate list dump") {
    ModelParams p{1, 1, 0, 0, 0.1, 1, 1};
    std::ostringstream os;
    write_coordinate_list(os, build_hamiltonian(p, build_basis(1, 1)));
    std::istringstream is(os.str());
    std::size_t i = 0;
    std::size_t j = 0;
    double v = 0.0;
    int lines = 0;
    while (is >> i >> j >> v) {
        CHECK(i <= j);
        ++lines;
    }
    // 2 nonzero diagonals (W at n_L=m_L) + 4 hops
    CHECK(lines == 6);
}
