// linalg.hpp — dense complex vectors, matrices, and two-mode embeddings.
//
// Mode counts here are tiny (d ≤ 8 in practice), so everything is a plain
// row-major std::vector<std::complex<double>> with unoptimized loops.
#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "qae/rng.hpp"

namespace qae {

using cplx = std::complex<double>;

class CMat {
public:
    CMat() = default;
    CMat(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols) {}

    static CMat identity(std::size_t n) {
        CMat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cplx& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const {
        return a_[r * cols_ + c];
    }

    bool operator==(const CMat& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cplx> a_;
};

inline CMat operator*(const CMat& a, const CMat& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("matrix product: inner dimensions differ");
    CMat c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j)
                c(i, j) += aik * b(k, j);
        }
    return c;
}

inline CMat adjoint(const CMat& m) {
    CMat r(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            r(j, i) = std::conj(m(i, j));
    return r;
}

// largest entry magnitude of U†U − I; small for anything built as a
// product of exact 2×2 unitaries
inline double unitarity_defect(const CMat& u) {
    if (u.rows() != u.cols())
        throw std::invalid_argument("unitarity_defect: matrix not square");
    const CMat p = adjoint(u) * u;
    double worst = 0.0;
    for (std::size_t i = 0; i < p.rows(); ++i)
        for (std::size_t j = 0; j < p.cols(); ++j) {
            const cplx want = (i == j) ? cplx(1.0) : cplx(0.0);
            worst = std::max(worst, std::abs(p(i, j) - want));
        }
    return worst;
}

struct PureState {
    std::vector<cplx> amps;

    std::size_t dim() const { return amps.size(); }
};

inline double norm(const PureState& s) {
    double n2 = 0.0;
    for (const cplx& a : s.amps) n2 += std::norm(a);
    return std::sqrt(n2);
}

// Unit-normalizes a raw amplitude vector; a (near-)zero vector signals a
// degenerate preparation and is rejected rather than silently patched.
inline PureState normalize(std::vector<cplx> v) {
    if (v.size() < 2)
        throw std::invalid_argument("normalize: need at least 2 modes");
    double n2 = 0.0;
    for (const cplx& a : v) n2 += std::norm(a);
    if (n2 <= 1e-24)
        throw std::invalid_argument("normalize: zero vector");
    const double inv = 1.0 / std::sqrt(n2);
    for (cplx& a : v) a *= inv;
    return PureState{std::move(v)};
}

inline PureState apply_unitary(const CMat& u, const PureState& s) {
    if (u.cols() != s.dim())
        throw std::invalid_argument("apply_unitary: dimension mismatch");
    PureState r;
    r.amps.assign(u.rows(), cplx(0.0));
    for (std::size_t i = 0; i < u.rows(); ++i)
        for (std::size_t j = 0; j < u.cols(); ++j)
            r.amps[i] += u(i, j) * s.amps[j];
    return r;
}

// ⟨a|b⟩, left argument conjugated
inline cplx inner_product(const PureState& a, const PureState& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("inner_product: dimension mismatch");
    cplx acc = 0.0;
    for (std::size_t k = 0; k < a.dim(); ++k)
        acc += std::conj(a.amps[k]) * b.amps[k];
    return acc;
}

struct TwoModeGate {
    std::size_t mode_lo = 0;
    std::size_t mode_hi = 1;
    CMat block;  // 2×2
};

inline CMat embed_two_mode(const TwoModeGate& g, std::size_t d) {
    if (g.mode_lo >= g.mode_hi || g.mode_hi >= d)
        throw std::out_of_range("embed_two_mode: mode pair out of range");
    if (g.block.rows() != 2 || g.block.cols() != 2)
        throw std::invalid_argument("embed_two_mode: block must be 2x2");
    CMat u = CMat::identity(d);
    u(g.mode_lo, g.mode_lo) = g.block(0, 0);
    u(g.mode_lo, g.mode_hi) = g.block(0, 1);
    u(g.mode_hi, g.mode_lo) = g.block(1, 0);
    u(g.mode_hi, g.mode_hi) = g.block(1, 1);
    return u;
}

// d×n matrix with Haar-distributed orthonormal columns: modified
// Gram–Schmidt on an i.i.d. complex-Gaussian matrix. MGS keeps the implied
// R diagonal real-positive, which is exactly the Haar-correct convention.
inline CMat haar_random_isometry(std::size_t d, std::size_t n,
                                 std::uint64_t seed) {
    if (n >= d)
        throw std::invalid_argument("haar_random_isometry: need n < d");
    Rng rng(seed);
    std::vector<std::vector<cplx>> cols(n, std::vector<cplx>(d));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < d; ++i) {
            const double re = rng.gauss();
            const double im = rng.gauss();
            cols[j][i] = cplx(re, im);
        }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            cplx proj = 0.0;
            for (std::size_t i = 0; i < d; ++i)
                proj += std::conj(cols[k][i]) * cols[j][i];
            for (std::size_t i = 0; i < d; ++i)
                cols[j][i] -= proj * cols[k][i];
        }
        double n2 = 0.0;
        for (std::size_t i = 0; i < d; ++i) n2 += std::norm(cols[j][i]);
        const double inv = 1.0 / std::sqrt(n2);
        for (std::size_t i = 0; i < d; ++i) cols[j][i] *= inv;
    }
    CMat v(d, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < d; ++i) v(i, j) = cols[j][i];
    return v;
}

}  // namespace qae
