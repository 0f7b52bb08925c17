#pragma once

#include "qoc/model.hpp"
#include "qoc/mpo.hpp"
#include "qoc/mps.hpp"

#include <vector>

namespace qoc {

// Full statevector over n qubits.  Basis index i holds the amplitude of the
// bit string whose site-j bit is (i >> (n-1-j)) & 1, so site 0 is the most
// significant bit.
struct DenseState {
    long n = 0;
    std::vector<cplx> amps;  // 2^n entries
};

// Full operator over the same basis, row-major with entry (out, in) at
// entries[out * 2^n + in].
struct DenseUnitary {
    long n = 0;
    std::vector<cplx> entries;  // 2^n x 2^n entries
};

// Brute-force contractions of a chain into the full space, n <= 10.
DenseState dense_state(const MPS& psi);
DenseUnitary dense_operator(const MPO& op);

// <a|b>, and tr(a^dagger b) / 2^n.
cplx dense_overlap(const DenseState& a, const DenseState& b);
cplx dense_trace_overlap(const DenseUnitary& a, const DenseUnitary& b);

// Applies the same per-bin gate sequence as the tensor-network propagator
// (bond gates up the chain, then the Y layer, then the X layer), acting on
// the full space with gates embedded by index arithmetic.  Linear in the
// input; no normalization is imposed.  States are capped at n <= 10 and
// operators at n <= 7.
DenseState dense_propagate(const DenseState& initial, const PulseSchedule& schedule,
                           const CouplingPattern& coupling, const ParasiticSample& sample);
DenseUnitary dense_propagate(const DenseUnitary& initial, const PulseSchedule& schedule,
                             const CouplingPattern& coupling, const ParasiticSample& sample);

struct DenseGround {
    double energy = 0.0;
    DenseState state;
};

// Lowest eigenpair of a Hermitian matrix over at most 10 qubits.  Rejects
// input whose anti-Hermitian part exceeds a small relative tolerance.
DenseGround exact_ground(const DenseUnitary& h);

} // namespace qoc
