#pragma once

#include "qoc/tensor.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace qoc {

// Matrix-product operator.  Site tensors carry axes (leftBond, physIn,
// physOut, rightBond): the coefficient at (in, out) multiplies |out><in|.
// Gates compose from the left (gate * U), acting on the physOut axis.
// Indexing conventions match MPS.
struct MPO {
    std::vector<Tensor> sites;
    std::optional<long> center;

    long length() const { return static_cast<long>(sites.size()); }
    std::vector<long> bond_dims() const;
};

MPO identity_mpo(long n);

// X on every site (bond dimension 1).
MPO parallel_x_mpo(long n);

// CNOT on each adjacent pair (0,1), (2,3), ...: bond 2 inside a pair, 1
// between pairs.  Requires even n.
MPO parallel_cnot_mpo(long n);

MPO mpo_apply_one_site(MPO u, const Tensor& gate, long site);

// Truncation keeps the raw Frobenius weight: operators are never
// renormalized, so the trace overlap keeps its meaning.
std::pair<MPO, TruncationReport> mpo_apply_two_site(MPO u, const Tensor& gate, long leftSite,
                                                    long dMax, double cutoff);

MPO mpo_canonicalize(MPO u, long center);

// tr(a^dagger b)/2^n via transfer contraction.
cplx trace_overlap(const MPO& a, const MPO& b);

} // namespace qoc
