#pragma once

// Independent reference implementations used only by tests.  Everything here
// is deliberately naive (triple loops, full matrices, generic matrix
// exponentials) so that agreement with the library is meaningful.

#include "qoc/mpo.hpp"
#include "qoc/mps.hpp"
#include "qoc/tensor.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <random>

namespace oracle {

using qoc::cplx;
using qoc::Tensor;

// Row-major view of a rank-2 tensor.
inline Eigen::MatrixXcd to_matrix(const Tensor& t) {
    if (t.rank() != 2) throw std::invalid_argument("to_matrix: rank-2 tensor required");
    Eigen::MatrixXcd m(t.dim(0), t.dim(1));
    for (long r = 0; r < t.dim(0); ++r)
        for (long c = 0; c < t.dim(1); ++c) m(r, c) = t.at({r, c});
    return m;
}

inline Tensor from_matrix(const Eigen::MatrixXcd& m) {
    Tensor t({m.rows(), m.cols()});
    for (long r = 0; r < m.rows(); ++r)
        for (long c = 0; c < m.cols(); ++c) t.at({r, c}) = m(r, c);
    return t;
}

// Plain triple-loop product, no BLAS.
inline Eigen::MatrixXcd naive_multiply(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(a.rows(), b.cols());
    for (long i = 0; i < a.rows(); ++i)
        for (long k = 0; k < a.cols(); ++k)
            for (long j = 0; j < b.cols(); ++j) out(i, j) += a(i, k) * b(k, j);
    return out;
}

// exp(-i*t*H) through the generic scaling-and-squaring exponential.
inline Eigen::MatrixXcd evolution(const Eigen::MatrixXcd& h, double t) {
    Eigen::MatrixXcd a = cplx(0.0, -t) * h;
    return a.exp();
}

inline Eigen::Matrix2cd pauli_x() {
    Eigen::Matrix2cd m;
    m << 0, 1, 1, 0;
    return m;
}

inline Eigen::Matrix2cd pauli_y() {
    Eigen::Matrix2cd m;
    m << cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0);
    return m;
}

inline Eigen::Matrix2cd pauli_z() {
    Eigen::Matrix2cd m;
    m << 1, 0, 0, -1;
    return m;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Embeds a single-site operator at position `site` of an n-site chain.
// Site 0 is the slowest (most significant) bit, matching the library's
// chain-to-statevector convention.
inline Eigen::MatrixXcd embed_one_site(const Eigen::Matrix2cd& op, long site, long n) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (long j = 0; j < n; ++j)
        out = kron(out, j == site ? Eigen::MatrixXcd(op) : Eigen::MatrixXcd(Eigen::Matrix2cd::Identity()));
    return out;
}

// Embeds a two-site operator on adjacent sites (leftSite, leftSite+1).
inline Eigen::MatrixXcd embed_two_site(const Eigen::Matrix4cd& op, long leftSite, long n) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1L << leftSite, 1L << leftSite);
    out = kron(out, op);
    const long tail = n - leftSite - 2;
    return kron(out, Eigen::MatrixXcd::Identity(1L << tail, 1L << tail));
}

// Statevector from an MPS by brute force: the amplitude of each bit string
// is the product of the selected bond matrices, site 0 most significant.
inline Eigen::VectorXcd dense_from_mps(const qoc::MPS& psi) {
    const long n = psi.length();
    Eigen::VectorXcd v(1L << n);
    for (long idx = 0; idx < v.size(); ++idx) {
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Identity(1, 1);
        for (long j = 0; j < n; ++j) {
            const long bit = (idx >> (n - 1 - j)) & 1;
            const Tensor& a = psi.sites[static_cast<size_t>(j)];
            Eigen::MatrixXcd m(a.dim(0), a.dim(2));
            for (long l = 0; l < a.dim(0); ++l)
                for (long r = 0; r < a.dim(2); ++r) m(l, r) = a.at({l, bit, r});
            acc = naive_multiply(acc, m);
        }
        v(idx) = acc(0, 0);
    }
    return v;
}

// Full matrix from an MPO: entry (out, in) sums the bond products of the
// per-site coefficients that multiply |out><in|.
inline Eigen::MatrixXcd dense_from_mpo(const qoc::MPO& u) {
    const long n = u.length();
    const long dim = 1L << n;
    Eigen::MatrixXcd m(dim, dim);
    for (long out = 0; out < dim; ++out) {
        for (long in = 0; in < dim; ++in) {
            Eigen::MatrixXcd acc = Eigen::MatrixXcd::Identity(1, 1);
            for (long j = 0; j < n; ++j) {
                const long ib = (in >> (n - 1 - j)) & 1;
                const long ob = (out >> (n - 1 - j)) & 1;
                const Tensor& w = u.sites[static_cast<size_t>(j)];
                Eigen::MatrixXcd f(w.dim(0), w.dim(3));
                for (long l = 0; l < w.dim(0); ++l)
                    for (long r = 0; r < w.dim(3); ++r) f(l, r) = w.at({l, ib, ob, r});
                acc = naive_multiply(acc, f);
            }
            m(out, in) = acc(0, 0);
        }
    }
    return m;
}

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(uint64_t seed) : gen(seed) {}
    double real(double lo = -1.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(gen);
    }
    cplx complex_entry() { return {real(), real()}; }
    Tensor tensor(std::vector<long> shape) {
        Tensor t(std::move(shape));
        for (long i = 0; i < t.size(); ++i) t[i] = complex_entry();
        return t;
    }
    Eigen::MatrixXcd matrix(long rows, long cols) {
        Eigen::MatrixXcd m(rows, cols);
        for (long r = 0; r < rows; ++r)
            for (long c = 0; c < cols; ++c) m(r, c) = complex_entry();
        return m;
    }
    Eigen::VectorXcd state(long dim) {
        Eigen::VectorXcd v(dim);
        for (long i = 0; i < dim; ++i) v(i) = complex_entry();
        v.normalize();
        return v;
    }
};

} // namespace oracle
