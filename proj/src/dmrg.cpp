#include "qoc/model.hpp"
#include "qoc/rng.hpp"

#include "chain_ops.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qoc {

namespace {

constexpr double kLocalTol = 1e-10;
constexpr long kLocalMaxMatvecs = 200;
constexpr long kKrylovBlock = 30;
constexpr double kSvdCutoff = 1e-12;
constexpr uint64_t kInitSeed = 0x5eedu;

// Left environment of a site: axes (braBond, mpoBond, ketBond).
Tensor unit_env() {
    Tensor e({1, 1, 1});
    e[0] = 1.0;
    return e;
}

Tensor step_left_env(const Tensor& env, const Tensor& w, const Tensor& a) {
    Tensor t = contract(env, a.conjugate(), {0}, {0});  // (w, ket, sOut, bra')
    t = contract(t, w, {0, 2}, {0, 2});                 // (ket, bra', in, w')
    return contract(t, a, {0, 2}, {0, 1});              // (bra', w', ket')
}

Tensor step_right_env(const Tensor& env, const Tensor& w, const Tensor& a) {
    Tensor t = contract(a.conjugate(), env, {2}, {0});  // (bra', sOut, w, ket)
    t = contract(t, w, {1, 2}, {2, 3});                 // (bra', ket, w', in)
    return contract(t, a, {1, 3}, {2, 1});              // (bra', w', ket')
}

// Effective Hamiltonian on the two-site block between fixed environments.
struct BondOperator {
    const Tensor& lenv;
    const Tensor& wa;
    const Tensor& wb;
    const Tensor& renv;
    long dl, dr;

    long dim() const { return dl * 4 * dr; }

    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const {
        Tensor th({dl, 2, 2, dr});
        std::copy(v.data(), v.data() + v.size(), th.data());
        Tensor t = contract(lenv, th, {2}, {0});    // (bra, w, s1, s2, ar)
        t = contract(t, wa, {1, 2}, {0, 1});        // (bra, s2, ar, o1, w2)
        t = contract(t, wb, {4, 1}, {0, 1});        // (bra, ar, o1, o2, w3)
        t = contract(t, renv, {1, 4}, {2, 1});      // (bra, o1, o2, bra')
        Eigen::VectorXcd out(v.size());
        std::copy(t.data(), t.data() + t.size(), out.data());
        return out;
    }
};

struct LocalSolve {
    Eigen::VectorXcd vec;
    double value;
};

// Restarted Lanczos for the lowest eigenpair, warm-started from v0.
LocalSolve lanczos_ground(const BondOperator& op, Eigen::VectorXcd v0, long sweep, long bond) {
    const long dim = op.dim();
    if (v0.norm() < 1e-300) v0.setOnes();
    v0.normalize();

    long used = 0;
    while (true) {
        std::vector<Eigen::VectorXcd> basis{v0};
        std::vector<double> alphas, betas;
        Eigen::VectorXcd ritz = v0;
        double value = 0.0;
        double resid = 0.0;
        bool exhausted = false;

        for (long k = 0; k < std::min(kKrylovBlock, dim); ++k) {
            Eigen::VectorXcd w = op.apply(basis[static_cast<size_t>(k)]);
            ++used;
            const double alpha = basis[static_cast<size_t>(k)].dot(w).real();
            alphas.push_back(alpha);
            w -= alpha * basis[static_cast<size_t>(k)];
            if (k > 0) w -= betas[static_cast<size_t>(k - 1)] * basis[static_cast<size_t>(k - 1)];
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& b : basis) w -= b.dot(w) * b;
            const double beta = w.norm();

            const long m = k + 1;
            Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
            for (long r = 0; r < m; ++r) {
                tri(r, r) = alphas[static_cast<size_t>(r)];
                if (r + 1 < m) tri(r, r + 1) = tri(r + 1, r) = betas[static_cast<size_t>(r)];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(tri);
            value = eig.eigenvalues()(0);
            const Eigen::VectorXd u = eig.eigenvectors().col(0);
            ritz.setZero();
            for (long r = 0; r < m; ++r) ritz += u(r) * basis[static_cast<size_t>(r)];
            ritz.normalize();
            resid = beta * std::abs(u(m - 1));

            if (resid <= kLocalTol * std::max(1.0, std::abs(value)) || beta < 1e-14 || m == dim)
                return {ritz, value};
            if (used >= kLocalMaxMatvecs) {
                exhausted = true;
                break;
            }
            betas.push_back(beta);
            basis.push_back(w / beta);
        }

        if (exhausted)
            throw std::runtime_error("dmrg: local eigensolver did not converge within " +
                                     std::to_string(kLocalMaxMatvecs) + " matvecs (sweep " +
                                     std::to_string(sweep) + ", bond " + std::to_string(bond) +
                                     ", residual " + std::to_string(resid) + ")");
        v0 = ritz;  // restart from the best Ritz vector
    }
}

MPS random_start(long n, long dMax) {
    const Philox rng(kInitSeed);
    MPS psi;
    psi.sites.reserve(static_cast<size_t>(n));
    std::vector<long> bond(static_cast<size_t>(n + 1), 1);
    for (long j = 0; j + 1 < n; ++j) {
        const long fromLeft = 1L << std::min<long>(j + 1, 30);
        const long fromRight = 1L << std::min<long>(n - j - 1, 30);
        bond[static_cast<size_t>(j + 1)] = std::min({dMax, fromLeft, fromRight});
    }
    for (long j = 0; j < n; ++j) {
        Tensor a({bond[static_cast<size_t>(j)], 2, bond[static_cast<size_t>(j + 1)]});
        for (long i = 0; i < a.size(); ++i)
            a[i] = cplx(rng.uniform(static_cast<uint64_t>(j), 2 * static_cast<uint64_t>(i), -0.5, 0.5),
                        rng.uniform(static_cast<uint64_t>(j), 2 * static_cast<uint64_t>(i) + 1, -0.5, 0.5));
        psi.sites.push_back(std::move(a));
    }
    psi = canonicalize(std::move(psi), 0);
    psi.sites[0] *= cplx(1.0 / psi.norm(), 0.0);
    return psi;
}

// Split the optimized block, renormalize the kept spectrum, and absorb it
// toward the sweep direction.
void split_block(MPS& psi, const Tensor& theta, long bond, long dMax, bool movingRight) {
    const long dl = theta.dim(0);
    const long dr = theta.dim(3);
    SvdResult svd = svd_truncate(theta.reshape({dl * 2, 2 * dr}), dMax, kSvdCutoff);
    const long k = svd.report.keptRank;
    double nrm = 0.0;
    for (double s : svd.s) nrm += s * s;
    nrm = std::sqrt(nrm);

    if (movingRight) {
        for (long r = 0; r < k; ++r) {
            const cplx scale(svd.s[static_cast<size_t>(r)] / nrm, 0.0);
            for (long c = 0; c < 2 * dr; ++c) svd.v.at({r, c}) *= scale;
        }
        psi.sites[static_cast<size_t>(bond)] = svd.u.reshape({dl, 2, k});
        psi.sites[static_cast<size_t>(bond + 1)] = svd.v.reshape({k, 2, dr});
        psi.center = bond + 1;
    } else {
        for (long c = 0; c < k; ++c) {
            const cplx scale(svd.s[static_cast<size_t>(c)] / nrm, 0.0);
            for (long r = 0; r < dl * 2; ++r) svd.u.at({r, c}) *= scale;
        }
        psi.sites[static_cast<size_t>(bond)] = svd.u.reshape({dl, 2, k});
        psi.sites[static_cast<size_t>(bond + 1)] = svd.v.reshape({k, 2, dr});
        psi.center = bond;
    }
}

Eigen::VectorXcd block_vector(const MPS& psi, long bond) {
    Tensor theta = contract(psi.sites[static_cast<size_t>(bond)],
                            psi.sites[static_cast<size_t>(bond + 1)], {2}, {0});
    Eigen::VectorXcd v(theta.size());
    std::copy(theta.data(), theta.data() + theta.size(), v.data());
    return v;
}

} // namespace

DmrgResult dmrg_ground_state(const MPO& h, long dMax, long sweeps, double tol) {
    const long n = h.length();
    if (n < 2 || n % 2 != 0)
        throw std::invalid_argument("dmrg_ground_state: requires an even chain length, got " +
                                    std::to_string(n));
    if (dMax < 2) throw std::invalid_argument("dmrg_ground_state: dMax must be at least 2");
    if (sweeps < 1) throw std::invalid_argument("dmrg_ground_state: need at least one sweep");
    if (!(tol >= 0.0)) throw std::invalid_argument("dmrg_ground_state: tol must be >= 0");

    DmrgResult res;
    res.state = random_start(n, dMax);
    MPS& psi = res.state;

    std::vector<Tensor> lenv(static_cast<size_t>(n + 1), unit_env());
    std::vector<Tensor> renv(static_cast<size_t>(n + 1), unit_env());
    for (long j = n - 1; j >= 1; --j)
        renv[static_cast<size_t>(j)] = step_right_env(renv[static_cast<size_t>(j + 1)],
                                                      h.sites[static_cast<size_t>(j)],
                                                      psi.sites[static_cast<size_t>(j)]);

    double lastSweepEnergy = 0.0;
    for (long sweep = 0; sweep < sweeps; ++sweep) {
        double energy = 0.0;
        for (long bond = 0; bond + 1 < n; ++bond) {
            BondOperator op{lenv[static_cast<size_t>(bond)], h.sites[static_cast<size_t>(bond)],
                            h.sites[static_cast<size_t>(bond + 1)],
                            renv[static_cast<size_t>(bond + 2)],
                            psi.sites[static_cast<size_t>(bond)].dim(0),
                            psi.sites[static_cast<size_t>(bond + 1)].dim(2)};
            LocalSolve sol = lanczos_ground(op, block_vector(psi, bond), sweep, bond);
            energy = sol.value;
            Tensor theta({op.dl, 2, 2, op.dr});
            std::copy(sol.vec.data(), sol.vec.data() + sol.vec.size(), theta.data());
            split_block(psi, theta, bond, dMax, /*movingRight=*/true);
            lenv[static_cast<size_t>(bond + 1)] =
                step_left_env(lenv[static_cast<size_t>(bond)], h.sites[static_cast<size_t>(bond)],
                              psi.sites[static_cast<size_t>(bond)]);
        }
        for (long bond = n - 2; bond >= 0; --bond) {
            BondOperator op{lenv[static_cast<size_t>(bond)], h.sites[static_cast<size_t>(bond)],
                            h.sites[static_cast<size_t>(bond + 1)],
                            renv[static_cast<size_t>(bond + 2)],
                            psi.sites[static_cast<size_t>(bond)].dim(0),
                            psi.sites[static_cast<size_t>(bond + 1)].dim(2)};
            LocalSolve sol = lanczos_ground(op, block_vector(psi, bond), sweep, bond);
            energy = sol.value;
            Tensor theta({op.dl, 2, 2, op.dr});
            std::copy(sol.vec.data(), sol.vec.data() + sol.vec.size(), theta.data());
            split_block(psi, theta, bond, dMax, /*movingRight=*/false);
            renv[static_cast<size_t>(bond + 1)] =
                step_right_env(renv[static_cast<size_t>(bond + 2)],
                               h.sites[static_cast<size_t>(bond + 1)],
                               psi.sites[static_cast<size_t>(bond + 1)]);
        }

        res.sweepEnergies.push_back(energy);
        res.energy = energy;
        if (sweep > 0 && std::abs(lastSweepEnergy - energy) < tol) break;
        lastSweepEnergy = energy;
    }
    return res;
}

} // namespace qoc
