#pragma once

// Internal machinery shared by the state and operator chains.  A "site" here
// is any tensor whose first axis is the left bond and whose last axis is the
// right bond; everything in between is the physical block (one axis of
// extent 2 for states, two axes of extent 2 for operators).  All routines
// mutate the site list in place; the public wrappers provide value
// semantics.

#include "qoc/tensor.hpp"

#include <optional>
#include <vector>

namespace qoc::detail {

// After a two-site split, which side carries the singular values (and with
// it the orthogonality center).
enum class SplitSide { Left, Right };

long left_bond(const Tensor& site);
long right_bond(const Tensor& site);

// QR-orthonormalize site i and push the remainder into site i+1.
void shift_center_right(std::vector<Tensor>& sites, long i);

// LQ-orthonormalize site i and push the remainder into site i-1.
void shift_center_left(std::vector<Tensor>& sites, long i);

// Bring the chain into mixed-canonical form with the center at `target`.
// When `center` already holds a trusted value only the intermediate sites
// are re-orthonormalized; otherwise both sides are swept in full.
void canonicalize_chain(std::vector<Tensor>& sites, std::optional<long>& center, long target);

// Contract sites (left, left+1), apply `gate` given as a rank-4 tensor
// (out1, out2, in1, in2) over the full physical blocks, split with a
// truncated SVD and leave the center on the requested side.  When
// `renormalize` is set the kept singular values are rescaled to unit norm
// (state semantics); operators keep their raw Frobenius weight.
TruncationReport apply_two_site_chain(std::vector<Tensor>& sites, std::optional<long>& center,
                                      const Tensor& gate, long left, long dMax, double cutoff,
                                      bool renormalize, SplitSide side);

// <a|b> with an optional per-site scale factor (used to fold the 1/2^n of
// operator trace overlaps into the transfer).
cplx chain_overlap(const std::vector<Tensor>& a, const std::vector<Tensor>& b,
                   double siteFactor = 1.0);

// <bra| P_j |ket> for every site j in one pass, where `op` acts on the full
// physical block of one site (shape (p, p) against the flattened block).
// Transfer caches make the whole sweep linear in the chain length.
std::vector<cplx> inserted_overlaps(const std::vector<Tensor>& bra,
                                    const std::vector<Tensor>& ket,
                                    const Tensor& op, double siteFactor = 1.0);

// Apply an operator on the flattened physical block of one site.
void apply_block_one_site(std::vector<Tensor>& sites, const Tensor& op, long site);

} // namespace qoc::detail
