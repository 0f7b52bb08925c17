#include "qoc/mps.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace qoc;

namespace {

double max_abs_diff(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

// Sum of Z_j Z_{j+1} over all bonds, in the standard bond-3 form.
MPO zz_sum_mpo(long n) {
    auto block = [](Tensor& w, long a, long b, double z00, double z11) {
        w.at({a, 0, 0, b}) = z00;
        w.at({a, 1, 1, b}) = z11;
    };
    MPO h;
    Tensor first({1, 2, 2, 3});
    block(first, 0, 0, 1.0, 1.0);
    block(first, 0, 1, 1.0, -1.0);
    h.sites.push_back(first);
    for (long j = 1; j + 1 < n; ++j) {
        Tensor w({3, 2, 2, 3});
        block(w, 0, 0, 1.0, 1.0);
        block(w, 0, 1, 1.0, -1.0);
        block(w, 1, 2, 1.0, -1.0);
        block(w, 2, 2, 1.0, 1.0);
        h.sites.push_back(w);
    }
    Tensor last({3, 2, 2, 1});
    block(last, 1, 0, 1.0, -1.0);
    block(last, 2, 0, 1.0, 1.0);
    h.sites.push_back(last);
    return h;
}

Eigen::MatrixXcd zz_sum_dense(long n) {
    const long dim = 1L << n;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    for (long j = 0; j + 1 < n; ++j)
        h += oracle::naive_multiply(oracle::embed_one_site(oracle::pauli_z(), j, n),
                                    oracle::embed_one_site(oracle::pauli_z(), j + 1, n));
    return h;
}

// Random state built from gates with a matching dense mirror, so library and
// oracle paths stay independent.
struct MirroredState {
    MPS psi;
    Eigen::VectorXcd dense;
};

MirroredState random_state(long n, uint64_t seed, int layers, long dMax = 64) {
    oracle::Rng rng(seed);
    std::vector<int> bits(static_cast<size_t>(n), 0);
    MirroredState st{product_state(bits), Eigen::VectorXcd::Zero(1L << n)};
    st.dense(0) = 1.0;
    for (int l = 0; l < layers; ++l) {
        for (long j = 0; j < n; ++j) {
            Tensor g = rng.tensor({2, 2});
            st.psi = apply_one_site(std::move(st.psi), g, j);
            st.dense = oracle::embed_one_site(oracle::to_matrix(g), j, n) * st.dense;
        }
        for (long j = 0; j + 1 < n; ++j) {
            Tensor g = bond_gate(rng.real(), rng.real(), rng.real(), rng.real(), 0.7);
            auto [next, rep] = apply_two_site(std::move(st.psi), g, j, dMax, 0.0);
            st.psi = std::move(next);
            st.dense = oracle::embed_two_site(oracle::to_matrix(g), j, n) * st.dense;
        }
        // two-site application renormalizes, so mirror that densely
        st.dense.normalize();
    }
    return st;
}

void normalize_in_place(MPS& psi) {
    psi.sites[0] *= cplx(1.0 / psi.norm(), 0.0);
}

bool is_identity_gram(const Tensor& gram, double tol) {
    if (gram.rank() != 2 || gram.dim(0) != gram.dim(1)) return false;
    for (long r = 0; r < gram.dim(0); ++r)
        for (long c = 0; c < gram.dim(1); ++c)
            if (std::abs(gram.at({r, c}) - (r == c ? cplx(1.0) : cplx(0.0))) > tol) return false;
    return true;
}

} // namespace

TEST_SUITE("mps") {

TEST_CASE("product state holds the selected amplitudes on bond dimension 1") {
    MPS zeros = product_state({0, 0, 0, 0});
    for (const Tensor& a : zeros.sites) {
        CHECK(a.at({0, 0, 0}) == cplx(1.0));
        CHECK(a.at({0, 1, 0}) == cplx(0.0));
    }
    CHECK(zeros.bond_dims() == std::vector<long>{1, 1, 1});
    CHECK(zeros.norm() == doctest::Approx(1.0).epsilon(1e-15));

    Eigen::VectorXcd ten = oracle::dense_from_mps(product_state({1, 0}));
    CHECK(std::abs(ten(2) - cplx(1.0)) < 1e-15);
    CHECK(ten.cwiseAbs().sum() == doctest::Approx(1.0).epsilon(1e-15));

    CHECK(product_state({1, 1, 0, 1, 0, 0, 1}).norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("product state rejects bad input") {
    CHECK_THROWS_AS((void)product_state({}), std::invalid_argument);
    CHECK_THROWS_AS((void)product_state({0}), std::invalid_argument);
    CHECK_THROWS_AS((void)product_state({0, 2}), std::invalid_argument);
}

TEST_CASE("ghz state carries the exact bond-2 tensors") {
    MPS ghz = ghz_state(4);
    const double r = 1.0 / std::sqrt(2.0);

    const Tensor& first = ghz.sites.front();
    CHECK(first.shape() == std::vector<long>{1, 2, 2});
    CHECK(first.at({0, 0, 0}) == cplx(r));
    CHECK(first.at({0, 1, 1}) == cplx(r));
    CHECK(first.at({0, 0, 1}) == cplx(0.0));
    CHECK(first.at({0, 1, 0}) == cplx(0.0));

    for (size_t j = 1; j + 1 < ghz.sites.size(); ++j) {
        const Tensor& bulk = ghz.sites[j];
        CHECK(bulk.shape() == std::vector<long>{2, 2, 2});
        for (long a = 0; a < 2; ++a)
            for (long s = 0; s < 2; ++s)
                for (long b = 0; b < 2; ++b)
                    CHECK(bulk.at({a, s, b}) == (a == s && s == b ? cplx(1.0) : cplx(0.0)));
    }

    const Tensor& last = ghz.sites.back();
    CHECK(last.shape() == std::vector<long>{2, 2, 1});
    CHECK(last.at({0, 0, 0}) == cplx(1.0));
    CHECK(last.at({1, 1, 0}) == cplx(1.0));
    CHECK(last.at({0, 1, 0}) == cplx(0.0));
    CHECK(last.at({1, 0, 0}) == cplx(0.0));
}

TEST_CASE("ghz state matches its dense definition") {
    Eigen::VectorXcd v = oracle::dense_from_mps(ghz_state(3));
    Eigen::VectorXcd ref = Eigen::VectorXcd::Zero(8);
    ref(0) = ref(7) = 1.0 / std::sqrt(2.0);
    CHECK(max_abs_diff(v, ref) < 1e-15);

    for (long n = 2; n <= 6; ++n) CHECK(ghz_state(n).norm() == doctest::Approx(1.0).epsilon(1e-14));

    cplx ov = overlap(ghz_state(5), product_state({0, 0, 0, 0, 0}));
    CHECK(std::abs(ov - cplx(1.0 / std::sqrt(2.0))) < 1e-14);

    CHECK_THROWS_AS((void)ghz_state(1), std::invalid_argument);
}

TEST_CASE("overlap agrees with the dense inner product") {
    CHECK(std::abs(overlap(product_state({0, 0}), product_state({1, 1}))) < 1e-15);
    CHECK(std::abs(overlap(ghz_state(4), ghz_state(4)) - cplx(1.0)) < 1e-14);

    MirroredState a = random_state(6, 11, 2);
    MirroredState b = random_state(6, 12, 2);
    cplx dense = a.dense.adjoint() * b.dense;
    CHECK(std::abs(overlap(a.psi, b.psi) - dense) < 1e-12);

    CHECK_THROWS_AS((void)overlap(product_state({0, 0}), product_state({0, 0, 0})),
                    std::invalid_argument);
}

TEST_CASE("one-site gates act locally") {
    MPS psi = product_state({0, 0});
    MPS same = apply_one_site(psi, Tensor::identity(2), 1);
    CHECK(max_abs_diff(oracle::dense_from_mps(same), oracle::dense_from_mps(psi)) < 1e-15);
    CHECK(same.bond_dims() == psi.bond_dims());

    Tensor x = oracle::from_matrix(oracle::pauli_x());
    MPS flipped = apply_one_site(psi, x, 0);
    CHECK(std::abs(overlap(flipped, product_state({1, 0})) - cplx(1.0)) < 1e-15);

    MirroredState st = random_state(5, 21, 2);
    oracle::Rng rng(22);
    Tensor g = rng.tensor({2, 2});
    MPS after = apply_one_site(st.psi, g, 3);
    Eigen::VectorXcd ref = oracle::embed_one_site(oracle::to_matrix(g), 3, 5) * st.dense;
    CHECK(max_abs_diff(oracle::dense_from_mps(after), ref) < 1e-12);

    CHECK_THROWS_AS((void)apply_one_site(psi, x, 2), std::invalid_argument);
    CHECK_THROWS_AS((void)apply_one_site(psi, x, -1), std::invalid_argument);
}

TEST_CASE("one-site gates keep the center only when they act on it") {
    MPS psi = canonicalize(random_state(4, 31, 1).psi, 2);
    Tensor g = single_quadrature_gate(0.3, 0.5, Quadrature::X);
    CHECK(apply_one_site(psi, g, 2).center == 2);
    CHECK_FALSE(apply_one_site(psi, g, 1).center.has_value());
}

TEST_CASE("two-site identity leaves the state intact") {
    MPS ghz = ghz_state(4);
    auto [same, rep] = apply_two_site(ghz, Tensor::identity(4), 1, 8, 0.0);
    CHECK(rep.discardedWeight == 0.0);
    CHECK(max_abs_diff(oracle::dense_from_mps(same), oracle::dense_from_mps(ghz)) < 1e-14);
    CHECK(same.center == 2);
}

TEST_CASE("a bond gate entangles a product state exactly at bond dimension 2") {
    MPS psi = product_state({0, 0});
    Tensor g = bond_gate(0.9, 0.4, -0.3, 0.2, 1.1);
    auto [after, rep] = apply_two_site(psi, g, 0, 2, 0.0);
    CHECK(rep.keptRank <= 2);
    CHECK(rep.discardedWeight == 0.0);
    Eigen::VectorXcd ref = oracle::to_matrix(g) * oracle::dense_from_mps(psi);
    CHECK(max_abs_diff(oracle::dense_from_mps(after), ref) < 1e-12);

    CHECK_THROWS_AS((void)apply_two_site(psi, g, 1, 2, 0.0), std::invalid_argument);
}

TEST_CASE("truncation reports the weight it discards") {
    const long n = 8;
    oracle::Rng rng(41);
    std::vector<int> bits(n, 0);
    MPS exact = product_state(bits);
    MPS lossy = exact;
    Eigen::VectorXcd dense = Eigen::VectorXcd::Zero(1L << n);
    dense(0) = 1.0;

    double discardedSum = 0.0;
    for (int layer = 0; layer < 2; ++layer) {
        for (long j = 0; j + 1 < n; ++j) {
            Tensor g = bond_gate(rng.real(), rng.real(), rng.real(), rng.real(), 0.35);
            auto [e, erep] = apply_two_site(std::move(exact), g, j, 256, 0.0);
            exact = std::move(e);
            auto [l, lrep] = apply_two_site(std::move(lossy), g, j, 2, 0.0);
            lossy = std::move(l);
            discardedSum += lrep.discardedWeight;
            dense = oracle::embed_two_site(oracle::to_matrix(g), j, n) * dense;
        }
    }

    CHECK(discardedSum > 0.0);
    CHECK(max_abs_diff(oracle::dense_from_mps(exact), dense) < 1e-12);

    double fidelity = std::norm(cplx(dense.adjoint() * oracle::dense_from_mps(lossy)));
    double loss = 1.0 - fidelity;
    CHECK(loss > 0.0);
    CHECK(loss == doctest::Approx(discardedSum).epsilon(0.5));
}

TEST_CASE("canonicalization changes gauge but nothing observable") {
    MPS psi = random_state(5, 51, 2).psi;
    normalize_in_place(psi);
    MPS ref = ghz_state(5);

    cplx before = overlap(ref, psi);
    MPS canon = canonicalize(psi, 3);
    CHECK(canon.center == 3);
    CHECK(std::abs(overlap(ref, canon) - before) < 1e-12);
    CHECK(canon.norm() == doctest::Approx(psi.norm()).epsilon(1e-12));

    MPS again = canonicalize(canon, 3);
    CHECK(std::abs(overlap(ref, again) - before) < 1e-12);
    for (size_t j = 0; j < again.sites.size(); ++j) {
        REQUIRE(again.sites[j].shape() == canon.sites[j].shape());
        double diff = 0.0;
        for (long i = 0; i < again.sites[j].size(); ++i)
            diff = std::max(diff, std::abs(again.sites[j][i] - canon.sites[j][i]));
        CHECK(diff < 1e-12);
    }
}

TEST_CASE("the orthogonality center separates left and right isometries") {
    MPS psi = canonicalize(random_state(6, 61, 2).psi, 2);
    for (long j = 0; j < psi.length(); ++j) {
        const Tensor& a = psi.sites[static_cast<size_t>(j)];
        if (j < 2) CHECK(is_identity_gram(contract(a.conjugate(), a, {0, 1}, {0, 1}), 1e-12));
        if (j > 2) CHECK(is_identity_gram(contract(a.conjugate(), a, {1, 2}, {1, 2}), 1e-12));
    }
}

TEST_CASE("expectation values match dense references") {
    MPS psi = random_state(4, 71, 2).psi;
    normalize_in_place(psi);
    CHECK(expectation(psi, identity_mpo(4)) == doctest::Approx(1.0).epsilon(1e-12));

    MPS zeros = product_state({0, 0, 0, 0});
    CHECK(expectation(zeros, zz_sum_mpo(4)) == doctest::Approx(3.0).epsilon(1e-12));

    Eigen::VectorXcd v = oracle::dense_from_mps(psi);
    double dense = (v.adjoint() * zz_sum_dense(4) * v).real()(0);
    CHECK(expectation(psi, zz_sum_mpo(4)) == doctest::Approx(dense).epsilon(1e-10));

    CHECK_THROWS_AS((void)expectation(zeros, identity_mpo(5)), std::invalid_argument);
}

TEST_CASE("mpo application on a state matches the dense product") {
    MPS ghz = ghz_state(4);
    MPS same = apply_mpo(identity_mpo(4), ghz);
    CHECK(std::abs(overlap(same, ghz) - cplx(1.0)) < 1e-13);

    MPS ones = apply_mpo(parallel_x_mpo(3), product_state({0, 0, 0}));
    CHECK(std::abs(overlap(ones, product_state({1, 1, 1})) - cplx(1.0)) < 1e-13);

    MirroredState st = random_state(4, 81, 2);
    MPS mapped = apply_mpo(zz_sum_mpo(4), st.psi);
    Eigen::VectorXcd ref = zz_sum_dense(4) * st.dense;
    CHECK(max_abs_diff(oracle::dense_from_mps(mapped), ref) < 1e-12);
    CHECK(mapped.bond_dims() == std::vector<long>{3 * st.psi.bond_dims()[0],
                                                  3 * st.psi.bond_dims()[1],
                                                  3 * st.psi.bond_dims()[2]});
}

TEST_CASE("gate application preserves the norm when nothing is truncated") {
    MPS psi = ghz_state(6);
    oracle::Rng rng(91);
    for (long j = 0; j + 1 < 6; ++j) {
        Tensor g = bond_gate(rng.real(), rng.real(), rng.real(), rng.real(), 0.5);
        auto [next, rep] = apply_two_site(std::move(psi), g, j, 64, 0.0);
        psi = std::move(next);
        CHECK(rep.discardedWeight == 0.0);
    }
    CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-10));
}

} // TEST_SUITE
