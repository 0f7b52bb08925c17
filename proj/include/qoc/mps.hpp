#pragma once

#include "qoc/mpo.hpp"
#include "qoc/tensor.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace qoc {

// Matrix-product state.  Site tensors carry axes (leftBond, physical,
// rightBond) with boundary bonds of extent 1.  Sites and bonds are indexed
// from zero; bond b sits between sites b and b+1.  `center` is the
// orthogonality center when one is known: every site left of it is
// left-orthonormal and every site right of it is right-orthonormal.
struct MPS {
    std::vector<Tensor> sites;
    std::optional<long> center;

    long length() const { return static_cast<long>(sites.size()); }
    std::vector<long> bond_dims() const;
    double norm() const;
};

// |b_0 b_1 ... b_{n-1}> as a bond-dimension-1 chain.
MPS product_state(const std::vector<int>& bits);

// (|0...0> + |1...1>)/sqrt(2) with its exact bond-dimension-2 tensors.
MPS ghz_state(long n);

// <a|b> by left-to-right transfer contraction.
cplx overlap(const MPS& a, const MPS& b);

// Apply a 2x2 gate on one site.  The orthogonality center survives only
// when it sits on the acted site; otherwise it is forgotten, since a
// non-unitary gate would invalidate it.
MPS apply_one_site(MPS psi, const Tensor& gate, long site);

// Apply a 4x4 gate on sites (leftSite, leftSite+1).  The center is moved to
// the acted bond first, the pair is split with a truncated SVD, the kept
// singular values are renormalized to unit norm, and the center ends on
// leftSite+1.
std::pair<MPS, TruncationReport> apply_two_site(MPS psi, const Tensor& gate, long leftSite,
                                                long dMax, double cutoff);

MPS canonicalize(MPS psi, long center);

// <psi|op|psi>; the imaginary part is discarded (callers pass Hermitian
// operators).
double expectation(const MPS& psi, const MPO& op);

// Exact application op|psi>: bond dimensions multiply, nothing is truncated
// and the result is generally unnormalized.
MPS apply_mpo(const MPO& op, const MPS& psi);

} // namespace qoc
