#include "cvdimer/exact.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace cvdimer {

namespace {

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > best * (1.0 + 1e-10)) {
            best = std::abs(v(i));
            imax = i;
        }
    }
    if (v(imax) < 0.0) v = -v;
}

Spectrum dense_lowest(const SymmetricMatrix& H, std::size_t k, bool vectors) {
    const Eigen::MatrixXd A = H.to_dense();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw SolverError("dense symmetric eigensolver failed", 0, 0);
    Spectrum s;
    const auto kk = static_cast<Eigen::Index>(k);
    s.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + kk);
    if (vectors) {
        s.eigenvectors = es.eigenvectors().leftCols(kk);
        for (Eigen::Index c = 0; c < kk; ++c) fix_sign(s.eigenvectors.col(c));
    }
    return s;
}

// Lanczos with full reorthogonalization. Converged Ritz pairs are locked and every
// following run starts orthogonal to the locked set; the search stops once a run in the
// orthogonal complement finds nothing below the k-th locked value. The extra run picks
// up degenerate copies that a single Krylov sequence cannot see.
Spectrum lanczos_lowest(const SymmetricMatrix& H, std::size_t k, const SolverOptions& opts) {
    const auto n = static_cast<Eigen::Index>(H.dim());
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss;

    Eigen::MatrixXd locked(n, 0);
    std::vector<double> locked_vals;
    long matvecs = 0;
    Eigen::VectorXd restart_vec;

    auto orthogonalize = [&](Eigen::Ref<Eigen::VectorXd> v, const Eigen::Ref<const Eigen::MatrixXd>& basis) {
        if (basis.cols() == 0) return;
        for (int pass = 0; pass < 2; ++pass) v.noalias() -= basis * (basis.transpose() * v);
    };
    auto kth_locked = [&]() {
        std::vector<double> tmp = locked_vals;
        std::nth_element(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(k - 1), tmp.end());
        return tmp[k - 1];
    };

    while (true) {
        if (locked.cols() >= n) break;

        const bool verifying = locked_vals.size() >= k;
        const double threshold = verifying ? kth_locked() : 0.0;

        Eigen::VectorXd v(n);
        if (restart_vec.size() == n) {
            v = restart_vec;
            restart_vec.resize(0);
        } else {
            for (Eigen::Index i = 0; i < n; ++i) v(i) = gauss(rng);
        }
        orthogonalize(v, locked);
        double nv = v.norm();
        if (nv < 1e-12) {
            for (Eigen::Index i = 0; i < n; ++i) v(i) = gauss(rng);
            orthogonalize(v, locked);
            nv = v.norm();
            if (nv < 1e-12) break;
        }
        v /= nv;

        const Eigen::Index m_max = std::min<Eigen::Index>(opts.max_krylov, n - locked.cols());
        Eigen::MatrixXd Q(n, m_max);
        Eigen::VectorXd alpha(m_max);
        Eigen::VectorXd beta(m_max);
        Q.col(0) = v;
        Eigen::VectorXd w(n);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
        Eigen::Index m = 0;
        std::size_t need = verifying ? 1 : std::max<std::size_t>(1, k - locked_vals.size());
        std::size_t nconv = 0;

        auto count_converged = [&](Eigen::Index mm, double b) {
            std::size_t c = 0;
            for (Eigen::Index i = 0; i < mm; ++i) {
                const double theta = tri.eigenvalues()(i);
                if (std::abs(b * tri.eigenvectors()(mm - 1, i)) <= opts.tol * std::max(1.0, std::abs(theta)))
                    ++c;
                else
                    break;
            }
            return c;
        };

        for (Eigen::Index j = 0; j < m_max; ++j) {
            if (matvecs >= opts.max_matvec)
                throw SolverError("Lanczos did not converge within " + std::to_string(opts.max_matvec) +
                                      " matrix-vector products",
                                  matvecs, locked_vals.size());
            H.apply(Q.col(j), w);
            ++matvecs;
            alpha(j) = Q.col(j).dot(w);
            w -= alpha(j) * Q.col(j);
            if (j > 0) w -= beta(j - 1) * Q.col(j - 1);
            orthogonalize(w, Q.leftCols(j + 1));
            orthogonalize(w, locked);
            beta(j) = w.norm();
            m = j + 1;
            const double scale = std::max(1.0, alpha.head(m).cwiseAbs().maxCoeff());
            const bool breakdown = beta(j) < 1e-13 * scale;
            if (breakdown || m % 10 == 0 || m == m_max) {
                tri.computeFromTridiagonal(alpha.head(m), beta.head(m - 1), Eigen::ComputeEigenvectors);
                nconv = breakdown ? static_cast<std::size_t>(m) : count_converged(m, beta(j));
                if (nconv >= std::min<std::size_t>(need, static_cast<std::size_t>(m)) || breakdown) break;
            }
            if (j + 1 < m_max) Q.col(j + 1) = w / beta(j);
        }

        const Eigen::MatrixXd ritz = Q.leftCols(m) * tri.eigenvectors();
        if (nconv == 0) {
            restart_vec = ritz.col(0);
            continue;
        }
        const double lowest = tri.eigenvalues()(0);
        for (std::size_t i = 0; i < nconv; ++i) {
            Eigen::VectorXd y = ritz.col(static_cast<Eigen::Index>(i));
            orthogonalize(y, locked);
            const double ny = y.norm();
            if (ny < 1e-8) continue;
            y /= ny;
            locked.conservativeResize(Eigen::NoChange, locked.cols() + 1);
            locked.col(locked.cols() - 1) = y;
            locked_vals.push_back(tri.eigenvalues()(static_cast<Eigen::Index>(i)));
        }
        if (verifying && lowest >= threshold - 1e-9 * std::max(1.0, std::abs(threshold))) break;
    }

    if (locked_vals.size() < k)
        throw SolverError("Lanczos exhausted the space before finding k eigenpairs", matvecs, locked_vals.size());

    // Rayleigh quotients refine the values to the accuracy of the vectors squared; sort after.
    std::vector<double> refined(locked_vals.size());
    for (std::size_t c = 0; c < refined.size(); ++c) {
        const Eigen::VectorXd y = locked.col(static_cast<Eigen::Index>(c));
        refined[c] = y.dot(H * y);
    }
    std::vector<std::size_t> order(refined.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return refined[a] < refined[b]; });

    Spectrum s;
    s.eigenvalues.reserve(k);
    if (opts.vectors) s.eigenvectors.resize(n, static_cast<Eigen::Index>(k));
    for (std::size_t c = 0; c < k; ++c) {
        s.eigenvalues.push_back(refined[order[c]]);
        if (opts.vectors) {
            Eigen::VectorXd y = locked.col(static_cast<Eigen::Index>(order[c]));
            fix_sign(y);
            s.eigenvectors.col(static_cast<Eigen::Index>(c)) = y;
        }
    }
    return s;
}

}  // namespace

SolverKind solver_kind_from_string(const std::string& s) {
    if (s == "auto") return SolverKind::automatic;
    if (s == "dense") return SolverKind::dense;
    if (s == "lanczos") return SolverKind::lanczos;
    throw std::invalid_argument("unknown solver '" + s + "' (expected dense|lanczos|auto)");
}

Spectrum lowest_eigenpairs(const SymmetricMatrix& H, std::size_t k, const SolverOptions& opts) {
    if (k < 1 || k > H.dim()) throw std::invalid_argument("lowest_eigenpairs: need 1 <= k <= dim");
    const bool dense = opts.kind == SolverKind::dense ||
                       (opts.kind == SolverKind::automatic && H.dim() <= opts.dense_threshold) || H.dim() <= 8;
    return dense ? dense_lowest(H, k, opts.vectors) : lanczos_lowest(H, k, opts);
}

AmplitudeGrid amplitude_grid(const Spectrum& s, std::size_t which, const FockBasis& basis) {
    if (!s.has_vectors()) throw std::invalid_argument("amplitude_grid: spectrum carries no eigenvectors");
    if (which >= s.count()) throw std::out_of_range("amplitude_grid: level index out of range");
    if (static_cast<std::size_t>(s.eigenvectors.rows()) != basis.dim())
        throw std::invalid_argument("amplitude_grid: basis does not match the eigenvectors");
    AmplitudeGrid g;
    g.values.resize(basis.N_a() + 1, basis.N_b() + 1);
    const auto col = s.eigenvectors.col(static_cast<Eigen::Index>(which));
    for (int i = 0; i <= basis.N_a(); ++i)
        for (int j = 0; j <= basis.N_b(); ++j) {
            const double c = col(static_cast<Eigen::Index>(basis.index(i, j)));
            g.values(i, j) = c * c;
        }
    g.normalize();
    return g;
}

std::vector<std::pair<std::size_t, std::size_t>> degenerate_clusters(const Spectrum& s, double rel_tol) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= s.count(); ++i) {
        const bool split = i == s.count() || std::abs(s.eigenvalues[i] - s.eigenvalues[i - 1]) >
                                                 rel_tol * std::max(1.0, std::abs(s.eigenvalues[i - 1]));
        if (split) {
            out.emplace_back(begin, i);
            begin = i;
        }
    }
    return out;
}

AmplitudeGrid cluster_grid(const Spectrum& s, std::size_t which, const FockBasis& basis, double rel_tol) {
    if (which >= s.count()) throw std::out_of_range("cluster_grid: level index out of range");
    for (const auto& [b, e] : degenerate_clusters(s, rel_tol)) {
        if (which < b || which >= e) continue;
        AmplitudeGrid g = amplitude_grid(s, b, basis);
        for (std::size_t l = b + 1; l < e; ++l) g.values += amplitude_grid(s, l, basis).values;
        g.normalize();
        return g;
    }
    return amplitude_grid(s, which, basis);
}

std::vector<double> relative_levels(const Spectrum& s) {
    std::vector<double> out;
    out.reserve(s.count());
    for (double e : s.eigenvalues) out.push_back(e - s.eigenvalues.front());
    return out;
}

}  // namespace cvdimer
