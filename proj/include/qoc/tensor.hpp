#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qoc {

using cplx = std::complex<double>;

// Dense complex tensor with row-major storage: the last axis varies fastest.
// Rank 0 is allowed and holds exactly one entry (a scalar).
class Tensor {
public:
    // Rank-0 zero scalar.
    Tensor() : shape_{}, data_(1, cplx(0.0, 0.0)) {}

    // Zero-filled tensor of the given shape.
    explicit Tensor(std::vector<long> shape);

    Tensor(std::vector<long> shape, std::vector<cplx> data);

    const std::vector<long>& shape() const { return shape_; }
    long rank() const { return static_cast<long>(shape_.size()); }
    long size() const { return static_cast<long>(data_.size()); }
    long dim(long axis) const;

    cplx* data() { return data_.data(); }
    const cplx* data() const { return data_.data(); }
    std::vector<cplx>& storage() { return data_; }
    const std::vector<cplx>& storage() const { return data_; }

    // Flat access.
    cplx& operator[](long i) { return data_[static_cast<size_t>(i)]; }
    const cplx& operator[](long i) const { return data_[static_cast<size_t>(i)]; }

    // Multi-index access (rank must match the index count).
    cplx& at(std::initializer_list<long> idx) { return data_[flat_index(idx)]; }
    const cplx& at(std::initializer_list<long> idx) const { return data_[flat_index(idx)]; }

    // Same data, new shape; the entry count must be preserved.
    Tensor reshape(std::vector<long> newShape) const;

    // Axis permutation: result axis k is this tensor's axis perm[k].
    Tensor permute(const std::vector<long>& perm) const;

    Tensor conjugate() const;

    double frobenius_norm() const;

    // Value of a single-entry tensor.
    cplx scalar_value() const;

    Tensor& operator*=(cplx factor);

    static Tensor identity(long d);

private:
    size_t flat_index(std::initializer_list<long> idx) const;

    std::vector<long> shape_;
    std::vector<cplx> data_;
};

// Report of one truncated SVD.  discardedWeight is the summed squares of the
// dropped singular values; it equals the squared Frobenius reconstruction
// error of the kept factors.
struct TruncationReport {
    long keptRank = 0;
    double discardedWeight = 0.0;
    double largestDiscarded = 0.0;
};

struct SvdResult {
    Tensor u;               // rows x kept, orthonormal columns
    std::vector<double> s;  // kept singular values, descending
    Tensor v;               // kept x cols, orthonormal rows (this is V^dagger)
    TruncationReport report;
};

// Contract a and b over the paired axes (axesA[i] with axesB[i]).  Result
// axes are the unpaired axes of a in order, then the unpaired axes of b.
Tensor contract(const Tensor& a, const Tensor& b,
                const std::vector<long>& axesA, const std::vector<long>& axesB);

// Truncated SVD of a rank-2 tensor.  Keeps min(dMax, #{s_i > cutoff*s_1},
// full rank) singular values, at least one.  cutoff is relative to the
// largest singular value.
SvdResult svd_truncate(const Tensor& m, long dMax, double cutoff);

enum class Quadrature { X, Y };

// exp(-i*amp*dt*P) for P in {X, Y}: cos(amp*dt)*I - i*sin(amp*dt)*P.
Tensor single_quadrature_gate(double amp, double dt, Quadrature axis);

// exp(-i*dt*(jx*XX + jy*YY + (g+jz)*ZZ)) on two qubits, in closed form.
// Basis order |00>, |01>, |10>, |11> with the first qubit as the slower bit.
Tensor bond_gate(double g, double jx, double jy, double jz, double dt);

} // namespace qoc
