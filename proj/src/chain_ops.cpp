#include "chain_ops.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace qoc::detail {

namespace {

using RowMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<RowMatrix>;
using ConstMapRM = Eigen::Map<const RowMatrix>;

long block_size(const Tensor& site) {
    return site.size() / (left_bond(site) * right_bond(site));
}

// Thin QR: A (rows x cols) = Q R with Q of shape (rows x k), k = min(rows, cols).
void thin_qr(const Eigen::MatrixXcd& a, Eigen::MatrixXcd& q, Eigen::MatrixXcd& r) {
    const long k = std::min(a.rows(), a.cols());
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    q = qr.householderQ() * Eigen::MatrixXcd::Identity(a.rows(), k);
    r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
}

} // namespace

long left_bond(const Tensor& site) { return site.dim(0); }
long right_bond(const Tensor& site) { return site.dim(site.rank() - 1); }

void shift_center_right(std::vector<Tensor>& sites, long i) {
    Tensor& a = sites[static_cast<size_t>(i)];
    const long dr = right_bond(a);
    const long rows = a.size() / dr;

    Eigen::MatrixXcd q, r;
    thin_qr(ConstMapRM(a.data(), rows, dr), q, r);
    const long k = q.cols();

    std::vector<long> qShape(a.shape());
    qShape.back() = k;
    Tensor qt(qShape);
    MapRM(qt.data(), rows, k) = q;
    a = std::move(qt);

    Tensor rt({k, dr});
    MapRM(rt.data(), k, dr) = r;
    sites[static_cast<size_t>(i + 1)] = contract(rt, sites[static_cast<size_t>(i + 1)], {1}, {0});
}

void shift_center_left(std::vector<Tensor>& sites, long i) {
    Tensor& a = sites[static_cast<size_t>(i)];
    const long dl = left_bond(a);
    const long cols = a.size() / dl;

    // A = L Q with Q having orthonormal rows, via QR of the adjoint.
    Eigen::MatrixXcd q, r;
    thin_qr(ConstMapRM(a.data(), dl, cols).adjoint(), q, r);
    const long k = q.cols();

    std::vector<long> qShape(a.shape());
    qShape.front() = k;
    Tensor qt(qShape);
    MapRM(qt.data(), k, cols) = q.adjoint();
    a = std::move(qt);

    Tensor lt({dl, k});
    MapRM(lt.data(), dl, k) = r.adjoint();
    Tensor& prev = sites[static_cast<size_t>(i - 1)];
    prev = contract(prev, lt, {prev.rank() - 1}, {0});
}

void canonicalize_chain(std::vector<Tensor>& sites, std::optional<long>& center, long target) {
    const long n = static_cast<long>(sites.size());
    if (target < 0 || target >= n)
        throw std::invalid_argument("canonicalize: center " + std::to_string(target) + " out of range");

    if (center.has_value()) {
        for (long i = *center; i < target; ++i) shift_center_right(sites, i);
        for (long i = *center; i > target; --i) shift_center_left(sites, i);
    } else {
        for (long i = 0; i < target; ++i) shift_center_right(sites, i);
        for (long i = n - 1; i > target; --i) shift_center_left(sites, i);
    }
    center = target;
}

TruncationReport apply_two_site_chain(std::vector<Tensor>& sites, std::optional<long>& center,
                                      const Tensor& gate, long left, long dMax, double cutoff,
                                      bool renormalize, SplitSide side) {
    const long n = static_cast<long>(sites.size());
    if (left < 0 || left + 1 >= n)
        throw std::invalid_argument("apply_two_site: bond " + std::to_string(left) + " out of range");

    // The SVD split is only Frobenius-optimal in mixed-canonical gauge.
    if (!center.has_value() || (*center != left && *center != left + 1))
        canonicalize_chain(sites, center, left);

    Tensor& a = sites[static_cast<size_t>(left)];
    Tensor& b = sites[static_cast<size_t>(left + 1)];
    const long dl = left_bond(a);
    const long dr = right_bond(b);
    const long pa = block_size(a);
    const long pb = block_size(b);

    Tensor theta = contract(a, b, {a.rank() - 1}, {0}); // (dl, blockA..., blockB..., dr)
    if (gate.rank() != 4 || gate.dim(0) != pa || gate.dim(1) != pb ||
        gate.dim(2) != pa || gate.dim(3) != pb)
        throw std::invalid_argument("apply_two_site: gate shape does not match the physical blocks");

    // Contract the gate over both flattened physical blocks, then restore the
    // (dl, outA, outB, dr) ordering.
    Tensor th = theta.reshape({dl, pa, pb, dr});
    Tensor acted = contract(gate, th, {2, 3}, {1, 2}); // (outA, outB, dl, dr)
    acted = acted.permute({2, 0, 1, 3});

    SvdResult svd = svd_truncate(acted.reshape({dl * pa, pb * dr}), dMax, cutoff);
    const long k = svd.report.keptRank;

    if (renormalize) {
        double nrm = 0.0;
        for (double s : svd.s) nrm += s * s;
        nrm = std::sqrt(nrm);
        if (nrm > 0.0)
            for (double& s : svd.s) s /= nrm;
    }

    // Multiply the singular values into the side that keeps the center.
    Tensor u = svd.u; // (dl*pa, k)
    Tensor v = svd.v; // (k, pb*dr)
    if (side == SplitSide::Right) {
        for (long row = 0; row < k; ++row)
            for (long c = 0; c < pb * dr; ++c) v[row * pb * dr + c] *= svd.s[static_cast<size_t>(row)];
        center = left + 1;
    } else {
        for (long row = 0; row < dl * pa; ++row)
            for (long c = 0; c < k; ++c) u[row * k + c] *= svd.s[static_cast<size_t>(c)];
        center = left;
    }

    std::vector<long> aShape(a.shape());
    aShape.back() = k;
    std::vector<long> bShape(b.shape());
    bShape.front() = k;
    sites[static_cast<size_t>(left)] = u.reshape(std::move(aShape));
    sites[static_cast<size_t>(left + 1)] = v.reshape(std::move(bShape));
    return svd.report;
}

cplx chain_overlap(const std::vector<Tensor>& a, const std::vector<Tensor>& b, double siteFactor) {
    if (a.size() != b.size())
        throw std::invalid_argument("overlap: chain lengths differ");
    const long n = static_cast<long>(a.size());

    Tensor env({1, 1});
    env[0] = 1.0;
    for (long j = 0; j < n; ++j) {
        const Tensor& sa = a[static_cast<size_t>(j)];
        const Tensor& sb = b[static_cast<size_t>(j)];
        // env (alpha, beta) -> contract bra then ket over bond + physical block
        Tensor t = contract(env, sa.conjugate(), {0}, {0}); // (beta, blockA..., alpha')
        std::vector<long> axT, axB;
        axT.push_back(0);
        axB.push_back(0);
        for (long p = 1; p < sb.rank() - 1; ++p) {
            axT.push_back(p);
            axB.push_back(p);
        }
        env = contract(t, sb, axT, axB); // (alpha', beta')
        if (siteFactor != 1.0) env *= siteFactor;
    }
    return env.scalar_value();
}

void apply_block_one_site(std::vector<Tensor>& sites, const Tensor& op, long site) {
    const long n = static_cast<long>(sites.size());
    if (site < 0 || site >= n)
        throw std::invalid_argument("apply_one_site: site " + std::to_string(site) + " out of range");
    Tensor& a = sites[static_cast<size_t>(site)];
    const long dl = left_bond(a);
    const long dr = right_bond(a);
    const long p = block_size(a);
    if (op.rank() != 2 || op.dim(0) != p || op.dim(1) != p)
        throw std::invalid_argument("apply_one_site: operator does not match the physical block");
    std::vector<long> shape(a.shape());
    Tensor flat = a.reshape({dl, p, dr});
    Tensor out = contract(op, flat, {1}, {1}).permute({1, 0, 2}); // (dl, p', dr)
    a = out.reshape(std::move(shape));
}

std::vector<cplx> inserted_overlaps(const std::vector<Tensor>& bra,
                                    const std::vector<Tensor>& ket,
                                    const Tensor& op, double siteFactor) {
    if (bra.size() != ket.size())
        throw std::invalid_argument("inserted_overlaps: chain lengths differ");
    const long n = static_cast<long>(bra.size());

    auto step_left_env = [&](const Tensor& env, const Tensor& sa, const Tensor& sb) {
        Tensor t = contract(env, sa.conjugate(), {0}, {0});
        std::vector<long> axT{0}, axB{0};
        for (long p = 1; p < sb.rank() - 1; ++p) {
            axT.push_back(p);
            axB.push_back(p);
        }
        return contract(t, sb, axT, axB);
    };

    // Right environments: renv[j] covers sites j..n-1, axes (bra bond, ket bond).
    std::vector<Tensor> renv(static_cast<size_t>(n) + 1);
    Tensor unit({1, 1});
    unit[0] = 1.0;
    renv[static_cast<size_t>(n)] = unit;
    for (long j = n - 1; j >= 0; --j) {
        const Tensor& sa = bra[static_cast<size_t>(j)];
        const Tensor& sb = ket[static_cast<size_t>(j)];
        Tensor t = contract(sa.conjugate(), renv[static_cast<size_t>(j + 1)], {sa.rank() - 1}, {0});
        // t: (alpha, blockA..., beta'), pair block + right ket bond
        std::vector<long> axT, axB;
        for (long p = 1; p < sb.rank() - 1; ++p) {
            axT.push_back(p);
            axB.push_back(p);
        }
        axT.push_back(t.rank() - 1);
        axB.push_back(sb.rank() - 1);
        Tensor e = contract(t, sb, axT, axB); // (alpha, beta)
        if (siteFactor != 1.0) e *= siteFactor;
        renv[static_cast<size_t>(j)] = std::move(e);
    }

    std::vector<cplx> vals(static_cast<size_t>(n));
    Tensor lenv = unit;
    for (long j = 0; j < n; ++j) {
        const Tensor& sa = bra[static_cast<size_t>(j)];
        const Tensor& sb = ket[static_cast<size_t>(j)];
        const long dl = left_bond(sb);
        const long dr = right_bond(sb);
        const long p = block_size(sb);

        Tensor acted = contract(op, sb.reshape({dl, p, dr}), {1}, {1}).permute({1, 0, 2});
        Tensor t = contract(lenv, sa.conjugate().reshape({left_bond(sa), p, right_bond(sa)}),
                            {0}, {0});                    // (beta, p, alpha')
        Tensor closed = contract(t, acted, {0, 1}, {0, 1}); // (alpha', beta')
        vals[static_cast<size_t>(j)] =
            siteFactor * contract(closed, renv[static_cast<size_t>(j + 1)], {0, 1}, {0, 1}).scalar_value();

        lenv = step_left_env(lenv, sa, sb);
        if (siteFactor != 1.0) lenv *= siteFactor;
    }
    return vals;
}

} // namespace qoc::detail
