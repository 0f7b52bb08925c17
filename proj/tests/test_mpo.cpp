#include "qoc/mpo.hpp"

#include "qoc/mps.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace qoc;

namespace {

double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

Eigen::MatrixXcd cnot_dense() {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
    return m;
}

// Frobenius inner product normalized like the library's trace overlap.
cplx dense_trace_overlap(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a.adjoint() * b).trace() / static_cast<double>(a.rows());
}

// A fixed mixed circuit of one- and two-site unitaries with its dense mirror.
struct MirroredCircuit {
    MPO u;
    Eigen::MatrixXcd dense;
};

MirroredCircuit random_circuit(long n, uint64_t seed, int layers, long dMax) {
    oracle::Rng rng(seed);
    MirroredCircuit c{identity_mpo(n),
                      Eigen::MatrixXcd::Identity(1L << n, 1L << n)};
    for (int l = 0; l < layers; ++l) {
        for (long j = 0; j < n; ++j) {
            Tensor g = single_quadrature_gate(rng.real(), 0.6, j % 2 ? Quadrature::X : Quadrature::Y);
            c.u = mpo_apply_one_site(std::move(c.u), g, j);
            c.dense = oracle::embed_one_site(oracle::to_matrix(g), j, n) * c.dense;
        }
        for (long j = 0; j + 1 < n; ++j) {
            Tensor g = bond_gate(rng.real(), rng.real(), rng.real(), rng.real(), 0.8);
            auto [next, rep] = mpo_apply_two_site(std::move(c.u), g, j, dMax, 0.0);
            c.u = std::move(next);
            c.dense = oracle::embed_two_site(oracle::to_matrix(g), j, n) * c.dense;
        }
    }
    return c;
}

} // namespace

TEST_SUITE("mpo") {

TEST_CASE("identity construction") {
    MPO id = identity_mpo(4);
    CHECK(id.bond_dims() == std::vector<long>{1, 1, 1});
    CHECK(max_abs_diff(oracle::dense_from_mpo(id), Eigen::MatrixXcd::Identity(16, 16)) == 0.0);
    CHECK(std::abs(trace_overlap(id, id) - cplx(1.0)) < 1e-15);

    MPS ghz = ghz_state(4);
    CHECK(std::abs(overlap(apply_mpo(id, ghz), ghz) - cplx(1.0)) < 1e-14);

    CHECK_THROWS_AS((void)identity_mpo(1), std::invalid_argument);
}

TEST_CASE("parallel X construction") {
    MPO ux = parallel_x_mpo(2);
    Eigen::MatrixXcd xx = oracle::kron(oracle::pauli_x(), oracle::pauli_x());
    CHECK(max_abs_diff(oracle::dense_from_mpo(ux), xx) == 0.0);
    CHECK(ux.bond_dims() == std::vector<long>{1});

    CHECK(std::abs(trace_overlap(identity_mpo(3), parallel_x_mpo(3))) < 1e-15);

    MPS ones = apply_mpo(parallel_x_mpo(5), product_state({0, 0, 0, 0, 0}));
    CHECK(std::abs(overlap(ones, product_state({1, 1, 1, 1, 1})) - cplx(1.0)) < 1e-14);

    CHECK_THROWS_AS((void)parallel_x_mpo(1), std::invalid_argument);
}

TEST_CASE("parallel CNOT construction") {
    CHECK(max_abs_diff(oracle::dense_from_mpo(parallel_cnot_mpo(2)), cnot_dense()) == 0.0);

    MPO uc = parallel_cnot_mpo(4);
    CHECK(uc.bond_dims() == std::vector<long>{2, 1, 2});
    CHECK(max_abs_diff(oracle::dense_from_mpo(uc), oracle::kron(cnot_dense(), cnot_dense())) == 0.0);
    CHECK(std::abs(trace_overlap(uc, uc) - cplx(1.0)) < 1e-15);

    MPS flipped = apply_mpo(parallel_cnot_mpo(2), product_state({1, 0}));
    CHECK(std::abs(overlap(flipped, product_state({1, 1})) - cplx(1.0)) < 1e-14);

    CHECK_THROWS_AS((void)parallel_cnot_mpo(3), std::invalid_argument);
    CHECK_THROWS_AS((void)parallel_cnot_mpo(0), std::invalid_argument);
}

TEST_CASE("one-site gates multiply from the left on the output axis") {
    MPO id = identity_mpo(2);
    MPO same = mpo_apply_one_site(id, Tensor::identity(2), 0);
    CHECK(max_abs_diff(oracle::dense_from_mpo(same), oracle::dense_from_mpo(id)) == 0.0);

    Tensor x = oracle::from_matrix(oracle::pauli_x());
    Eigen::MatrixXcd xi = oracle::kron(oracle::pauli_x(), Eigen::Matrix2cd::Identity());
    CHECK(max_abs_diff(oracle::dense_from_mpo(mpo_apply_one_site(id, x, 0)), xi) == 0.0);

    // left-composition on a non-identity operator: gate picks up the CNOT output
    MPO xc = mpo_apply_one_site(parallel_cnot_mpo(2), x, 1);
    CHECK(max_abs_diff(oracle::dense_from_mpo(xc),
                       oracle::kron(Eigen::Matrix2cd::Identity(), oracle::pauli_x()) * cnot_dense()) <
          1e-15);

    CHECK_THROWS_AS((void)mpo_apply_one_site(id, x, 2), std::invalid_argument);
}

TEST_CASE("a mixed gate circuit matches the dense unitary") {
    MirroredCircuit c = random_circuit(5, 7, 1, 32);
    CHECK(max_abs_diff(oracle::dense_from_mpo(c.u), c.dense) < 1e-10);
    CHECK(std::abs(std::abs(trace_overlap(c.u, c.u)) - 1.0) < 1e-10);
}

TEST_CASE("trace overlap matches the dense trace") {
    MirroredCircuit c = random_circuit(4, 9, 1, 16);
    MPO ux = parallel_x_mpo(4);
    cplx dense = dense_trace_overlap(c.dense, oracle::dense_from_mpo(ux));
    CHECK(std::abs(trace_overlap(c.u, ux) - dense) < 1e-10);

    CHECK_THROWS_AS((void)trace_overlap(identity_mpo(2), identity_mpo(3)), std::invalid_argument);
}

TEST_CASE("trace overlap modulus ignores global phases") {
    MPO a = parallel_cnot_mpo(4);
    MPO b = a;
    b.sites[2] *= std::exp(cplx(0.0, 0.9));
    CHECK(std::abs(std::abs(trace_overlap(a, b)) - std::abs(trace_overlap(a, a))) < 1e-14);
}

TEST_CASE("gate application composes when nothing is truncated") {
    MPO u = identity_mpo(4);
    Eigen::MatrixXcd ref = Eigen::MatrixXcd::Identity(16, 16);
    oracle::Rng rng(13);
    for (long j = 0; j + 1 < 4; ++j) {
        Tensor g = bond_gate(rng.real(), rng.real(), rng.real(), rng.real(), 1.2);
        auto [next, rep] = mpo_apply_two_site(std::move(u), g, j, 256, 0.0);
        u = std::move(next);
        CHECK(rep.discardedWeight == 0.0);
        ref = oracle::embed_two_site(oracle::to_matrix(g), j, 4) * ref;
    }
    CHECK(max_abs_diff(oracle::dense_from_mpo(u), ref) < 1e-10);
}

TEST_CASE("truncation drops Frobenius weight without renormalizing") {
    MirroredCircuit c = random_circuit(6, 15, 1, 256);
    double before = trace_overlap(c.u, c.u).real();
    CHECK(before == doctest::Approx(1.0).epsilon(1e-9));

    MPO u = c.u;
    double dropped = 0.0;
    for (long j = 0; j + 1 < 6; ++j) {
        auto [next, rep] = mpo_apply_two_site(std::move(u), Tensor::identity(4), j, 3, 0.0);
        u = std::move(next);
        dropped += rep.discardedWeight;
    }
    CHECK(dropped > 0.0);
    double after = trace_overlap(u, u).real();
    CHECK(after < before);
    // each discarded singular value removes its squared weight from tr(U^dagger U)/2^n
    CHECK(after == doctest::Approx(before - dropped / 64.0).epsilon(1e-6));
}

TEST_CASE("canonicalization preserves the operator") {
    MirroredCircuit c = random_circuit(4, 17, 1, 32);
    MPO canon = mpo_canonicalize(c.u, 1);
    CHECK(canon.center == 1);
    CHECK(max_abs_diff(oracle::dense_from_mpo(canon), c.dense) < 1e-10);
    CHECK(std::abs(trace_overlap(canon, c.u) - trace_overlap(c.u, c.u)) < 1e-10);
}

} // TEST_SUITE
