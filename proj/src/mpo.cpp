#include "qoc/mpo.hpp"

#include "chain_ops.hpp"

namespace qoc {

namespace {

void require_even_length(long n, const char* who) {
    if (n < 2 || n % 2 != 0)
        throw std::invalid_argument(std::string(who) + ": requires even n >= 2, got " +
                                    std::to_string(n));
}

void require_site(const MPO& u, long site, const char* who) {
    if (site < 0 || site >= u.length())
        throw std::invalid_argument(std::string(who) + ": site " + std::to_string(site) +
                                    " out of range for length " + std::to_string(u.length()));
}

// Site tensor of a bond-1 product operator from a 2x2 gate.
Tensor product_site(const cplx g00, const cplx g01, const cplx g10, const cplx g11) {
    Tensor w({1, 2, 2, 1});
    // coefficient at (in, out) multiplies |out><in|, i.e. the matrix entry (out, in)
    w.at({0, 0, 0, 0}) = g00;
    w.at({0, 1, 0, 0}) = g01;
    w.at({0, 0, 1, 0}) = g10;
    w.at({0, 1, 1, 0}) = g11;
    return w;
}

// Rank-4 gate over the fused (in, out) physical blocks of two operator
// sites: the 4x4 circuit gate acts on the out legs, the in legs ride along.
Tensor fused_operator_gate(const Tensor& gate) {
    Tensor f({4, 4, 4, 4});
    for (long i1 = 0; i1 < 2; ++i1)
        for (long i2 = 0; i2 < 2; ++i2)
            for (long o1 = 0; o1 < 2; ++o1)
                for (long o2 = 0; o2 < 2; ++o2)
                    for (long t1 = 0; t1 < 2; ++t1)
                        for (long t2 = 0; t2 < 2; ++t2)
                            f.at({i1 * 2 + o1, i2 * 2 + o2, i1 * 2 + t1, i2 * 2 + t2}) =
                                gate.at({o1 * 2 + o2, t1 * 2 + t2});
    return f;
}

} // namespace

std::vector<long> MPO::bond_dims() const {
    std::vector<long> dims;
    for (size_t j = 0; j + 1 < sites.size(); ++j) dims.push_back(sites[j].dim(3));
    return dims;
}

MPO identity_mpo(long n) {
    if (n < 2)
        throw std::invalid_argument("identity_mpo: need at least 2 sites, got " + std::to_string(n));
    MPO u;
    u.sites.assign(static_cast<size_t>(n), product_site(1.0, 0.0, 0.0, 1.0));
    u.center = 0;
    return u;
}

MPO parallel_x_mpo(long n) {
    if (n < 2)
        throw std::invalid_argument("parallel_x_mpo: need at least 2 sites, got " + std::to_string(n));
    MPO u;
    u.sites.assign(static_cast<size_t>(n), product_site(0.0, 1.0, 1.0, 0.0));
    u.center = 0;
    return u;
}

MPO parallel_cnot_mpo(long n) {
    require_even_length(n, "parallel_cnot_mpo");
    MPO u;
    u.sites.reserve(static_cast<size_t>(n));
    for (long pair = 0; pair < n / 2; ++pair) {
        // Control site: bond channel c selects the projector |c><c|.
        Tensor ctrl({1, 2, 2, 2});
        ctrl.at({0, 0, 0, 0}) = 1.0;
        ctrl.at({0, 1, 1, 1}) = 1.0;
        u.sites.push_back(std::move(ctrl));
        // Target site: identity on channel 0, X on channel 1.
        Tensor tgt({2, 2, 2, 1});
        tgt.at({0, 0, 0, 0}) = 1.0;
        tgt.at({0, 1, 1, 0}) = 1.0;
        tgt.at({1, 1, 0, 0}) = 1.0;
        tgt.at({1, 0, 1, 0}) = 1.0;
        u.sites.push_back(std::move(tgt));
    }
    u.center.reset();
    return u;
}

MPO mpo_apply_one_site(MPO u, const Tensor& gate, long site) {
    require_site(u, site, "mpo_apply_one_site");
    if (gate.rank() != 2 || gate.dim(0) != 2 || gate.dim(1) != 2)
        throw std::invalid_argument("mpo_apply_one_site: gate must be 2x2");
    Tensor& w = u.sites[static_cast<size_t>(site)];
    // gate acts on physOut: (o, t) x (dl, pIn, t, dr) -> (dl, pIn, o, dr)
    w = contract(gate, w, {1}, {2}).permute({1, 2, 0, 3});
    if (u.center != site) u.center.reset();
    return u;
}

std::pair<MPO, TruncationReport> mpo_apply_two_site(MPO u, const Tensor& gate, long leftSite,
                                                    long dMax, double cutoff) {
    require_site(u, leftSite, "mpo_apply_two_site");
    if (leftSite + 1 >= u.length())
        throw std::invalid_argument("mpo_apply_two_site: bond " + std::to_string(leftSite) +
                                    " has no right neighbor");
    if (gate.rank() != 2 || gate.dim(0) != 4 || gate.dim(1) != 4)
        throw std::invalid_argument("mpo_apply_two_site: gate must be 4x4");
    TruncationReport rep = detail::apply_two_site_chain(u.sites, u.center,
                                                        fused_operator_gate(gate), leftSite,
                                                        dMax, cutoff, /*renormalize=*/false,
                                                        detail::SplitSide::Right);
    return {std::move(u), rep};
}

MPO mpo_canonicalize(MPO u, long center) {
    require_site(u, center, "mpo_canonicalize");
    detail::canonicalize_chain(u.sites, u.center, center);
    return u;
}

cplx trace_overlap(const MPO& a, const MPO& b) {
    if (a.length() != b.length())
        throw std::invalid_argument("trace_overlap: lengths " + std::to_string(a.length()) +
                                    " and " + std::to_string(b.length()) + " differ");
    // tr(a^dagger b) is the Frobenius inner product of the coefficient
    // tensors; the 1/2 per site implements the 1/2^n normalization.
    return detail::chain_overlap(a.sites, b.sites, 0.5);
}

} // namespace qoc
