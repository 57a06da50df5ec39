#pragma once

// Dense complex matrices at the sizes this library needs (codeword and
// covariance matrices, at most a few rows). Hermitian eigendecomposition is
// a cyclic Jacobi iteration: each rotation peels the phase off the pivot and
// applies the textbook symmetric Schur rotation, which is accurate to machine
// precision at these sizes and keeps the tree free of external solvers.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "ofdm.hpp"

namespace dstbc {

class CMat {
  public:
    CMat() = default;
    CMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, cx(0.0, 0.0)) {}

    static CMat identity(std::size_t n) {
        CMat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cx& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const cx& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    CMat adjoint() const {
        CMat m(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
        return m;
    }

    CMat conjugate() const {
        CMat m(rows_, cols_);
        for (std::size_t i = 0; i < rows_ * cols_; ++i) m.a_[i] = std::conj(a_[i]);
        return m;
    }

    CMat& operator+=(const CMat& o) {
        require_same_shape(o, "+=");
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }

    CMat& operator-=(const CMat& o) {
        require_same_shape(o, "-=");
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
        return *this;
    }

    CMat& operator*=(cx s) {
        for (auto& v : a_) v *= s;
        return *this;
    }

    friend CMat operator+(CMat a, const CMat& b) { return a += b; }
    friend CMat operator-(CMat a, const CMat& b) { return a -= b; }
    friend CMat operator*(cx s, CMat a) { return a *= s; }

    friend CMat operator*(const CMat& a, const CMat& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("CMat multiply: inner dimensions differ");
        CMat m(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                cx aik = a(i, k);
                if (aik == cx(0.0, 0.0)) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) m(i, j) += aik * b(k, j);
            }
        return m;
    }

    cvec operator*(const cvec& v) const {
        if (cols_ != v.size()) throw std::invalid_argument("CMat apply: vector length differs from columns");
        cvec out(rows_, cx(0.0, 0.0));
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
        return out;
    }

    double frobenius() const {
        double s = 0.0;
        for (const auto& v : a_) s += std::norm(v);
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : a_) m = std::max(m, std::abs(v));
        return m;
    }

  private:
    void require_same_shape(const CMat& o, const char* op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument(std::string("CMat ") + op + ": shapes differ");
    }

    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cx> a_;
};

struct HermitianEigen {
    std::vector<double> values;  // ascending
    CMat vectors;                // columns; A == V diag(values) V^H
};

// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
inline HermitianEigen hermitian_eigen(const CMat& input) {
    if (input.rows() != input.cols()) throw std::invalid_argument("hermitian_eigen: matrix is not square");
    const std::size_t n = input.rows();
    CMat a = input;
    CMat v = CMat::identity(n);

    const double scale = std::max(a.frobenius(), 1e-300);
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        if (std::sqrt(2.0 * off) <= 1e-15 * scale) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double g = std::abs(a(p, q));
                if (g <= 1e-300) continue;
                const cx phase = a(p, q) / g;  // a(p,q) = g * phase
                const double alpha = a(p, p).real();
                const double beta = a(q, q).real();

                // Real symmetric Schur rotation for [[alpha, g], [g, beta]].
                const double tau = (beta - alpha) / (2.0 * g);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                // Combined unitary J: columns (p, q) mix with an extra phase
                // e^{-i arg(a_pq)} on column q so the pivot becomes real first.
                const cx jqp = -s * std::conj(phase);
                const cx jqq = c * std::conj(phase);

                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const cx arp = a(r, p), arq = a(r, q);
                    a(r, p) = c * arp + jqp * arq;
                    a(r, q) = s * arp + jqq * arq;
                    a(p, r) = std::conj(a(r, p));
                    a(q, r) = std::conj(a(r, q));
                }
                a(p, p) = alpha - t * g;
                a(q, q) = beta + t * g;
                a(p, q) = 0.0;
                a(q, p) = 0.0;

                for (std::size_t r = 0; r < n; ++r) {
                    const cx vrp = v(r, p), vrq = v(r, q);
                    v(r, p) = c * vrp + jqp * vrq;
                    v(r, q) = s * vrp + jqq * vrq;
                }
            }
        }
    }

    HermitianEigen out;
    out.values.resize(n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i).real();
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return diag[x] < diag[y]; });
    out.vectors = CMat(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = diag[order[j]];
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

namespace detail {

template <typename F>
CMat eigen_function(const HermitianEigen& e, F f) {
    const std::size_t n = e.vectors.rows();
    CMat out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cx s(0.0, 0.0);
            for (std::size_t k = 0; k < n; ++k)
                s += e.vectors(i, k) * f(e.values[k]) * std::conj(e.vectors(j, k));
            out(i, j) = s;
        }
    return out;
}

inline void require_positive_definite(const HermitianEigen& e, double rel_tol, const char* op) {
    const double top = e.values.empty() ? 0.0 : e.values.back();
    if (top <= 0.0 || e.values.front() <= rel_tol * top)
        throw std::runtime_error(std::string(op) + ": matrix is not positive definite to working precision");
}

}  // namespace detail

// Omega^{-1/2} for Hermitian positive definite Omega. Throws std::runtime_error
// when the smallest eigenvalue falls below rel_tol times the largest.
inline CMat inverse_sqrt(const CMat& omega, double rel_tol = 1e-12) {
    HermitianEigen e = hermitian_eigen(omega);
    detail::require_positive_definite(e, rel_tol, "inverse_sqrt");
    return detail::eigen_function(e, [](double x) { return 1.0 / std::sqrt(x); });
}

inline CMat hermitian_sqrt(const CMat& omega, double rel_tol = 1e-12) {
    HermitianEigen e = hermitian_eigen(omega);
    detail::require_positive_definite(e, rel_tol, "hermitian_sqrt");
    return detail::eigen_function(e, [](double x) { return std::sqrt(x); });
}

inline CMat hermitian_inverse(const CMat& omega, double rel_tol = 1e-12) {
    HermitianEigen e = hermitian_eigen(omega);
    detail::require_positive_definite(e, rel_tol, "hermitian_inverse");
    return detail::eigen_function(e, [](double x) { return 1.0 / x; });
}

// Rank by singular values: count sigma_i > rel_tol * sigma_max, with the
// sigma_i taken from the eigenvalues of A^H A.
inline std::size_t matrix_rank(const CMat& a, double rel_tol = 1e-9) {
    HermitianEigen e = hermitian_eigen(a.adjoint() * a);
    double top = 0.0;
    for (double w : e.values) top = std::max(top, w);
    if (top <= 0.0) return 0;
    const double thr2 = rel_tol * rel_tol * top;  // compare squared magnitudes
    std::size_t r = 0;
    for (double w : e.values)
        if (w > thr2) ++r;
    return r;
}

}  // namespace dstbc
