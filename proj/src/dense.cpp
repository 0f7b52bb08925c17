#include "qoc/dense.hpp"

#include "qoc/tebd.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace qoc {

namespace {

constexpr long kStateCap = 10;
constexpr long kOperatorCap = 7;

long dense_dim(long n) { return 1L << n; }

void check_state(const DenseState& s, const char* where) {
    if (s.n < 1) throw std::invalid_argument(std::string(where) + ": needs at least one qubit");
    if (s.n > kStateCap)
        throw std::invalid_argument(std::string(where) + ": states support at most " +
                                    std::to_string(kStateCap) + " qubits, got " +
                                    std::to_string(s.n));
    if (static_cast<long>(s.amps.size()) != dense_dim(s.n))
        throw std::invalid_argument(std::string(where) +
                                    ": amplitude count does not match the qubit count");
}

void check_operator(const DenseUnitary& u, long cap, const char* where) {
    if (u.n < 1) throw std::invalid_argument(std::string(where) + ": needs at least one qubit");
    if (u.n > cap)
        throw std::invalid_argument(std::string(where) + ": operators support at most " +
                                    std::to_string(cap) + " qubits, got " + std::to_string(u.n));
    const long dim = dense_dim(u.n);
    if (static_cast<long>(u.entries.size()) != dim * dim)
        throw std::invalid_argument(std::string(where) +
                                    ": entry count does not match the qubit count");
}

// Left-multiplies data (2^n rows of `cols` entries, row-major) by a one-site
// gate embedded at qubit `site`.
void apply_one_site_dense(std::vector<cplx>& data, long n, long cols, const Tensor& g,
                          long site) {
    const long dim = dense_dim(n);
    const long stride = 1L << (n - 1 - site);
    const cplx g00 = g.at({0, 0}), g01 = g.at({0, 1});
    const cplx g10 = g.at({1, 0}), g11 = g.at({1, 1});
    for (long base = 0; base < dim; base += 2 * stride) {
        for (long off = 0; off < stride; ++off) {
            cplx* row0 = data.data() + (base + off) * cols;
            cplx* row1 = row0 + stride * cols;
            for (long c = 0; c < cols; ++c) {
                const cplx a = row0[c], b = row1[c];
                row0[c] = g00 * a + g01 * b;
                row1[c] = g10 * a + g11 * b;
            }
        }
    }
}

// Left-multiplies by a two-site gate on the adjacent pair (site, site+1).
// The 4x4 gate orders both fused indices with the left qubit as the slower
// bit, matching the basis layout here.
void apply_two_site_dense(std::vector<cplx>& data, long n, long cols, const Tensor& g,
                          long site) {
    const long dim = dense_dim(n);
    const long stride = 1L << (n - 2 - site);  // right qubit's bit
    cplx ge[4][4];
    for (long r = 0; r < 4; ++r)
        for (long c = 0; c < 4; ++c) ge[r][c] = g.at({r, c});
    for (long base = 0; base < dim; base += 4 * stride) {
        for (long off = 0; off < stride; ++off) {
            cplx* rows[4];
            for (long k = 0; k < 4; ++k) rows[k] = data.data() + (base + off + k * stride) * cols;
            for (long c = 0; c < cols; ++c) {
                const cplx in[4] = {rows[0][c], rows[1][c], rows[2][c], rows[3][c]};
                for (long r = 0; r < 4; ++r)
                    rows[r][c] =
                        ge[r][0] * in[0] + ge[r][1] * in[1] + ge[r][2] * in[2] + ge[r][3] * in[3];
            }
        }
    }
}

void apply_all_slices(std::vector<cplx>& data, long n, long cols, const PulseSchedule& schedule,
                      const CouplingPattern& coupling, const ParasiticSample& sample) {
    for (long l = 0; l < schedule.bins; ++l) {
        const SliceCircuit slice = build_slice(schedule, l, coupling, sample);
        for (long j = 0; j + 1 < n; ++j)
            apply_two_site_dense(data, n, cols, slice.vGates[static_cast<size_t>(j)], j);
        for (long j = 0; j < n; ++j)
            apply_one_site_dense(data, n, cols, slice.yGates[static_cast<size_t>(j)], j);
        for (long j = 0; j < n; ++j)
            apply_one_site_dense(data, n, cols, slice.xGates[static_cast<size_t>(j)], j);
    }
}

void check_propagation_inputs(long stateN, const PulseSchedule& schedule,
                              const CouplingPattern& coupling, const ParasiticSample& sample,
                              const char* where) {
    validate_schedule(schedule);
    if (schedule.n != stateN)
        throw std::invalid_argument(std::string(where) +
                                    ": schedule does not match the qubit count");
    const size_t bonds = static_cast<size_t>(stateN - 1);
    if (coupling.g.size() != bonds)
        throw std::invalid_argument(std::string(where) +
                                    ": coupling pattern does not match the qubit count");
    if (sample.jx.size() != bonds || sample.jy.size() != bonds || sample.jz.size() != bonds)
        throw std::invalid_argument(std::string(where) +
                                    ": parasitic sample does not match the qubit count");
}

} // namespace

DenseState dense_state(const MPS& psi) {
    const long n = psi.length();
    if (n > kStateCap)
        throw std::invalid_argument("dense_state: supports at most " + std::to_string(kStateCap) +
                                    " qubits, got " + std::to_string(n));
    Tensor acc({1, 1});
    acc.at({0, 0}) = 1.0;
    for (long j = 0; j < n; ++j) {
        const Tensor& a = psi.sites[static_cast<size_t>(j)];
        acc = contract(acc, a, {1}, {0}).reshape({acc.dim(0) * 2, a.dim(2)});
    }
    DenseState out;
    out.n = n;
    out.amps = std::move(acc.storage());
    return out;
}

DenseUnitary dense_operator(const MPO& op) {
    const long n = op.length();
    if (n > kStateCap)
        throw std::invalid_argument("dense_operator: supports at most " +
                                    std::to_string(kStateCap) + " qubits, got " +
                                    std::to_string(n));
    Tensor acc({1, 1, 1});
    acc.at({0, 0, 0}) = 1.0;
    for (long j = 0; j < n; ++j) {
        const Tensor& w = op.sites[static_cast<size_t>(j)];
        // (out, in, chi) x (chi, pIn, pOut, chi') -> (out*pOut, in*pIn, chi')
        Tensor grown = contract(acc, w, {2}, {0}).permute({0, 3, 1, 2, 4});
        acc = grown.reshape({acc.dim(0) * 2, acc.dim(1) * 2, w.dim(3)});
    }
    DenseUnitary out;
    out.n = n;
    out.entries = std::move(acc.storage());
    return out;
}

cplx dense_overlap(const DenseState& a, const DenseState& b) {
    check_state(a, "dense_overlap");
    check_state(b, "dense_overlap");
    if (a.n != b.n) throw std::invalid_argument("dense_overlap: qubit counts differ");
    cplx acc = 0.0;
    for (size_t i = 0; i < a.amps.size(); ++i) acc += std::conj(a.amps[i]) * b.amps[i];
    return acc;
}

cplx dense_trace_overlap(const DenseUnitary& a, const DenseUnitary& b) {
    check_operator(a, kStateCap, "dense_trace_overlap");
    check_operator(b, kStateCap, "dense_trace_overlap");
    if (a.n != b.n) throw std::invalid_argument("dense_trace_overlap: qubit counts differ");
    cplx acc = 0.0;
    for (size_t i = 0; i < a.entries.size(); ++i) acc += std::conj(a.entries[i]) * b.entries[i];
    return acc / static_cast<double>(dense_dim(a.n));
}

DenseState dense_propagate(const DenseState& initial, const PulseSchedule& schedule,
                           const CouplingPattern& coupling, const ParasiticSample& sample) {
    check_state(initial, "dense_propagate");
    check_propagation_inputs(initial.n, schedule, coupling, sample, "dense_propagate");
    DenseState out = initial;
    apply_all_slices(out.amps, out.n, 1, schedule, coupling, sample);
    return out;
}

DenseUnitary dense_propagate(const DenseUnitary& initial, const PulseSchedule& schedule,
                             const CouplingPattern& coupling, const ParasiticSample& sample) {
    check_operator(initial, kOperatorCap, "dense_propagate");
    check_propagation_inputs(initial.n, schedule, coupling, sample, "dense_propagate");
    DenseUnitary out = initial;
    apply_all_slices(out.entries, out.n, dense_dim(out.n), schedule, coupling, sample);
    return out;
}

DenseGround exact_ground(const DenseUnitary& h) {
    check_operator(h, kStateCap, "exact_ground");
    const long dim = dense_dim(h.n);
    Eigen::MatrixXcd m(dim, dim);
    for (long r = 0; r < dim; ++r)
        for (long c = 0; c < dim; ++c) m(r, c) = h.entries[static_cast<size_t>(r * dim + c)];
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (defect > 1e-12 * scale)
        throw std::invalid_argument("exact_ground: input is not Hermitian");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("exact_ground: eigensolver failed to converge");

    DenseGround out;
    out.energy = solver.eigenvalues()(0);
    out.state.n = h.n;
    out.state.amps.resize(static_cast<size_t>(dim));
    const auto vec = solver.eigenvectors().col(0);
    for (long i = 0; i < dim; ++i) out.state.amps[static_cast<size_t>(i)] = vec(i);
    return out;
}

} // namespace qoc
