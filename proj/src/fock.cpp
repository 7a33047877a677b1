#include "cvdimer/fock.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

namespace cvdimer {

FockBasis::FockBasis(int N_a, int N_b, std::size_t cap) : N_a_(N_a), N_b_(N_b), dim_(0) {
    if (N_a < 0 || N_b < 0) throw std::invalid_argument("boson numbers must be non-negative");
    const auto da = static_cast<std::size_t>(N_a) + 1;
    const auto db = static_cast<std::size_t>(N_b) + 1;
    if (da > cap / db) throw std::length_error("Fock basis dimension exceeds cap " + std::to_string(cap));
    dim_ = da * db;
}

FockBasis build_basis(int N_a, int N_b, std::size_t cap) { return FockBasis(N_a, N_b, cap); }

SymmetricMatrix SymmetricMatrix::from_upper(std::size_t dim, const std::vector<Entry>& upper,
                                            std::size_t dense_threshold) {
    SymmetricMatrix m;
    m.dim_ = dim;
    for (const auto& e : upper) {
        if (e.row > e.col || e.col >= dim) throw std::out_of_range("entry outside the upper triangle");
        if (!std::isfinite(e.value)) throw std::domain_error("non-finite matrix entry");
    }
    const auto n = static_cast<Eigen::Index>(dim);
    if (dim <= dense_threshold) {
        Dense d = Dense::Zero(n, n);
        for (const auto& e : upper) {
            const auto r = static_cast<Eigen::Index>(e.row);
            const auto c = static_cast<Eigen::Index>(e.col);
            d(r, c) += e.value;
            if (r != c) d(c, r) += e.value;
        }
        m.storage_ = std::move(d);
    } else {
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(2 * upper.size());
        for (const auto& e : upper) {
            const auto r = static_cast<Eigen::Index>(e.row);
            const auto c = static_cast<Eigen::Index>(e.col);
            trips.emplace_back(r, c, e.value);
            if (r != c) trips.emplace_back(c, r, e.value);
        }
        Sparse s(n, n);
        s.setFromTriplets(trips.begin(), trips.end());
        s.makeCompressed();
        m.storage_ = std::move(s);
    }
    return m;
}

double SymmetricMatrix::operator()(std::size_t i, std::size_t j) const {
    const auto r = static_cast<Eigen::Index>(i);
    const auto c = static_cast<Eigen::Index>(j);
    if (const auto* d = std::get_if<Dense>(&storage_)) return (*d)(r, c);
    return std::get<Sparse>(storage_).coeff(r, c);
}

Eigen::VectorXd SymmetricMatrix::diagonal() const {
    if (const auto* d = std::get_if<Dense>(&storage_)) return d->diagonal();
    return std::get<Sparse>(storage_).diagonal();
}

void SymmetricMatrix::apply(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> y) const {
    if (static_cast<std::size_t>(x.size()) != dim_ || static_cast<std::size_t>(y.size()) != dim_)
        throw std::invalid_argument("SymmetricMatrix::apply: dimension mismatch");
    if (const auto* d = std::get_if<Dense>(&storage_))
        y.noalias() = d->selfadjointView<Eigen::Lower>() * x;
    else
        y.noalias() = std::get<Sparse>(storage_) * x;
}

Eigen::VectorXd SymmetricMatrix::operator*(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y(static_cast<Eigen::Index>(dim_));
    apply(x, y);
    return y;
}

SymmetricMatrix::Dense SymmetricMatrix::to_dense() const {
    if (const auto* d = std::get_if<Dense>(&storage_)) return *d;
    return Dense(std::get<Sparse>(storage_));
}

std::vector<SymmetricMatrix::Entry> SymmetricMatrix::upper_entries() const {
    std::vector<Entry> out;
    if (const auto* d = std::get_if<Dense>(&storage_)) {
        for (Eigen::Index r = 0; r < d->rows(); ++r)
            for (Eigen::Index c = r; c < d->cols(); ++c)
                if ((*d)(r, c) != 0.0)
                    out.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c), (*d)(r, c)});
        return out;
    }
    const auto& s = std::get<Sparse>(storage_);
    for (Eigen::Index r = 0; r < s.outerSize(); ++r)
        for (Sparse::InnerIterator it(s, r); it; ++it)
            if (it.col() >= r && it.value() != 0.0)
                out.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(it.col()), it.value()});
    return out;
}

double diagonal_element(const ModelParams& p, int n_L, int m_L) noexcept {
    const double nL = n_L;
    const double nR = p.N_a - n_L;
    const double mL = m_L;
    const double mR = p.N_b - m_L;
    return 0.5 * p.U_a * (nL * (nL - 1.0) + nR * (nR - 1.0)) + 0.5 * p.U_b * (mL * (mL - 1.0) + mR * (mR - 1.0)) +
           p.W * (nL * mL + nR * mR);
}

SymmetricMatrix build_hamiltonian(const ModelParams& p, const FockBasis& basis, std::size_t dense_threshold) {
    // an empty species is fine here (the CV side needs N >= 1, the matrix does not)
    for (double c : {p.J_a, p.J_b, p.U_a, p.U_b, p.W})
        if (!std::isfinite(c)) throw std::invalid_argument("build_hamiltonian: non-finite coupling");
    if (basis.N_a() != p.N_a || basis.N_b() != p.N_b)
        throw std::invalid_argument("build_hamiltonian: basis does not match the boson numbers");
    std::vector<SymmetricMatrix::Entry> upper;
    upper.reserve(3 * basis.dim());
    for (int nL = 0; nL <= p.N_a; ++nL) {
        const int nR = p.N_a - nL;
        for (int mL = 0; mL <= p.N_b; ++mL) {
            const int mR = p.N_b - mL;
            const std::size_t i = basis.index(nL, mL);
            upper.push_back({i, i, diagonal_element(p, nL, mL)});
            // a_R^+ a_L : (nL, mL) -> (nL - 1, mL); lower index sits in the upper triangle row
            if (nL > 0) {
                const double amp = -p.J_a * std::sqrt(static_cast<double>(nL) * (nR + 1));
                upper.push_back({basis.index(nL - 1, mL), i, amp});
            }
            if (mL > 0) {
                const double amp = -p.J_b * std::sqrt(static_cast<double>(mL) * (mR + 1));
                upper.push_back({basis.index(nL, mL - 1), i, amp});
            }
        }
    }
    return SymmetricMatrix::from_upper(basis.dim(), upper, dense_threshold);
}

Eigen::VectorXd b_parity_transform(const FockBasis& basis, std::span<const double> v) {
    if (v.size() != basis.dim()) throw std::invalid_argument("b_parity_transform: dimension mismatch");
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (int nL = 0; nL <= basis.N_a(); ++nL)
        for (int mL = 0; mL <= basis.N_b(); ++mL)
            out(static_cast<Eigen::Index>(basis.index(nL, basis.N_b() - mL))) = v[basis.index(nL, mL)];
    return out;
}

void write_coordinate_list(std::ostream& os, const SymmetricMatrix& m) {
    const auto flags = os.flags();
    const auto prec = os.precision();
    os << std::setprecision(17);
    for (const auto& e : m.upper_entries()) os << e.row << ' ' << e.col << ' ' << e.value << '\n';
    os.flags(flags);
    os.precision(prec);
}

}  // namespace cvdimer
