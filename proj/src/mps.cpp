#include "qoc/mps.hpp"

#include "chain_ops.hpp"

#include <cmath>

namespace qoc {

namespace {

void require_site(const MPS& psi, long site, const char* who) {
    if (site < 0 || site >= psi.length())
        throw std::invalid_argument(std::string(who) + ": site " + std::to_string(site) +
                                    " out of range for length " + std::to_string(psi.length()));
}

} // namespace

std::vector<long> MPS::bond_dims() const {
    std::vector<long> dims;
    for (size_t j = 0; j + 1 < sites.size(); ++j) dims.push_back(sites[j].dim(2));
    return dims;
}

double MPS::norm() const {
    return std::sqrt(std::abs(detail::chain_overlap(sites, sites).real()));
}

MPS product_state(const std::vector<int>& bits) {
    const long n = static_cast<long>(bits.size());
    if (n < 2)
        throw std::invalid_argument("product_state: need at least 2 sites, got " + std::to_string(n));
    MPS psi;
    psi.sites.reserve(static_cast<size_t>(n));
    for (int b : bits) {
        if (b != 0 && b != 1)
            throw std::invalid_argument("product_state: bits must be 0 or 1");
        Tensor site({1, 2, 1});
        site.at({0, b, 0}) = 1.0;
        psi.sites.push_back(std::move(site));
    }
    psi.center = 0;
    return psi;
}

MPS ghz_state(long n) {
    if (n < 2)
        throw std::invalid_argument("ghz_state: need at least 2 sites, got " + std::to_string(n));
    const double r = 1.0 / std::sqrt(2.0);

    MPS psi;
    psi.sites.reserve(static_cast<size_t>(n));

    Tensor first({1, 2, 2});
    first.at({0, 0, 0}) = r;
    first.at({0, 1, 1}) = r;
    psi.sites.push_back(std::move(first));

    for (long j = 1; j + 1 < n; ++j) {
        Tensor bulk({2, 2, 2});
        bulk.at({0, 0, 0}) = 1.0;
        bulk.at({1, 1, 1}) = 1.0;
        psi.sites.push_back(std::move(bulk));
    }

    Tensor last({2, 2, 1});
    last.at({0, 0, 0}) = 1.0;
    last.at({1, 1, 0}) = 1.0;
    psi.sites.push_back(std::move(last));

    // Every site to the right of the first is right-orthonormal by
    // construction, so the chain is already canonical about site 0.
    psi.center = 0;
    return psi;
}

cplx overlap(const MPS& a, const MPS& b) {
    if (a.length() != b.length())
        throw std::invalid_argument("overlap: lengths " + std::to_string(a.length()) + " and " +
                                    std::to_string(b.length()) + " differ");
    return detail::chain_overlap(a.sites, b.sites);
}

MPS apply_one_site(MPS psi, const Tensor& gate, long site) {
    require_site(psi, site, "apply_one_site");
    if (gate.rank() != 2 || gate.dim(0) != 2 || gate.dim(1) != 2)
        throw std::invalid_argument("apply_one_site: gate must be 2x2");
    detail::apply_block_one_site(psi.sites, gate, site);
    if (psi.center != site) psi.center.reset();
    return psi;
}

std::pair<MPS, TruncationReport> apply_two_site(MPS psi, const Tensor& gate, long leftSite,
                                                long dMax, double cutoff) {
    require_site(psi, leftSite, "apply_two_site");
    if (leftSite + 1 >= psi.length())
        throw std::invalid_argument("apply_two_site: bond " + std::to_string(leftSite) +
                                    " has no right neighbor");
    if (gate.rank() != 2 || gate.dim(0) != 4 || gate.dim(1) != 4)
        throw std::invalid_argument("apply_two_site: gate must be 4x4");
    TruncationReport rep = detail::apply_two_site_chain(psi.sites, psi.center,
                                                        gate.reshape({2, 2, 2, 2}), leftSite,
                                                        dMax, cutoff, /*renormalize=*/true,
                                                        detail::SplitSide::Right);
    return {std::move(psi), rep};
}

MPS canonicalize(MPS psi, long center) {
    require_site(psi, center, "canonicalize");
    detail::canonicalize_chain(psi.sites, psi.center, center);
    return psi;
}

double expectation(const MPS& psi, const MPO& op) {
    if (psi.length() != op.length())
        throw std::invalid_argument("expectation: state length " + std::to_string(psi.length()) +
                                    " does not match operator length " + std::to_string(op.length()));
    // Three-legged transfer (bra bond, operator bond, ket bond).
    Tensor env({1, 1, 1});
    env[0] = 1.0;
    for (long j = 0; j < psi.length(); ++j) {
        const Tensor& a = psi.sites[static_cast<size_t>(j)];
        const Tensor& w = op.sites[static_cast<size_t>(j)];
        Tensor t = contract(env, a.conjugate(), {0}, {0});      // (w, k, sOut, abar')
        t = contract(t, w, {0, 2}, {0, 2});                     // (k, abar', sIn, w')
        env = contract(t, a, {0, 2}, {0, 1});                   // (abar', w', k')
    }
    return env.scalar_value().real();
}

MPS apply_mpo(const MPO& op, const MPS& psi) {
    if (psi.length() != op.length())
        throw std::invalid_argument("apply_mpo: length mismatch");
    MPS out;
    out.sites.reserve(psi.sites.size());
    for (long j = 0; j < psi.length(); ++j) {
        const Tensor& a = psi.sites[static_cast<size_t>(j)];
        const Tensor& w = op.sites[static_cast<size_t>(j)];
        // (wl, sIn, sOut, wr) x (dl, sIn, dr) -> (wl*dl, sOut, wr*dr)
        Tensor t = contract(w, a, {1}, {1});        // (wl, sOut, wr, dl, dr)
        t = t.permute({0, 3, 1, 2, 4});
        out.sites.push_back(t.reshape({w.dim(0) * a.dim(0), 2, w.dim(3) * a.dim(2)}));
    }
    return out;
}

} // namespace qoc
