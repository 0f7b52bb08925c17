#include "qoc/tensor.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numeric>

namespace qoc {

namespace {

using RowMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<RowMatrix>;
using ConstMapRM = Eigen::Map<const RowMatrix>;

long shape_product(const std::vector<long>& shape) {
    long p = 1;
    for (long d : shape) {
        if (d < 0) throw std::invalid_argument("Tensor: negative axis extent");
        p *= d;
    }
    return p;
}

std::string shape_string(const std::vector<long>& shape) {
    std::string s = "(";
    for (size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape[i]);
    }
    return s + ")";
}

} // namespace

Tensor::Tensor(std::vector<long> shape)
    : shape_(std::move(shape)), data_(static_cast<size_t>(shape_product(shape_)), cplx(0.0, 0.0)) {}

Tensor::Tensor(std::vector<long> shape, std::vector<cplx> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (static_cast<long>(data_.size()) != shape_product(shape_))
        throw std::invalid_argument("Tensor: data size " + std::to_string(data_.size()) +
                                    " does not match shape " + shape_string(shape_));
}

long Tensor::dim(long axis) const {
    if (axis < 0 || axis >= rank())
        throw std::invalid_argument("Tensor::dim: axis " + std::to_string(axis) + " out of range");
    return shape_[static_cast<size_t>(axis)];
}

size_t Tensor::flat_index(std::initializer_list<long> idx) const {
    if (static_cast<long>(idx.size()) != rank())
        throw std::invalid_argument("Tensor::at: index count does not match rank");
    size_t flat = 0;
    size_t axis = 0;
    for (long i : idx) {
        long d = shape_[axis];
        if (i < 0 || i >= d)
            throw std::invalid_argument("Tensor::at: index out of range on axis " + std::to_string(axis));
        flat = flat * static_cast<size_t>(d) + static_cast<size_t>(i);
        ++axis;
    }
    return flat;
}

Tensor Tensor::reshape(std::vector<long> newShape) const {
    if (shape_product(newShape) != size())
        throw std::invalid_argument("Tensor::reshape: " + shape_string(shape_) + " -> " +
                                    shape_string(newShape) + " changes the entry count");
    return Tensor(std::move(newShape), data_);
}

Tensor Tensor::permute(const std::vector<long>& perm) const {
    const long r = rank();
    if (static_cast<long>(perm.size()) != r)
        throw std::invalid_argument("Tensor::permute: permutation length does not match rank");
    std::vector<bool> seen(static_cast<size_t>(r), false);
    std::vector<long> newShape(static_cast<size_t>(r));
    for (long k = 0; k < r; ++k) {
        long p = perm[static_cast<size_t>(k)];
        if (p < 0 || p >= r || seen[static_cast<size_t>(p)])
            throw std::invalid_argument("Tensor::permute: invalid permutation");
        seen[static_cast<size_t>(p)] = true;
        newShape[static_cast<size_t>(k)] = shape_[static_cast<size_t>(p)];
    }
    if (r <= 1) return Tensor(std::move(newShape), data_);

    // Strides of the source tensor, then walk the destination in order while
    // tracking the matching source offset.
    std::vector<long> srcStride(static_cast<size_t>(r), 1);
    for (long k = r - 2; k >= 0; --k)
        srcStride[static_cast<size_t>(k)] =
            srcStride[static_cast<size_t>(k + 1)] * shape_[static_cast<size_t>(k + 1)];

    std::vector<long> dstStrideInSrc(static_cast<size_t>(r));
    for (long k = 0; k < r; ++k)
        dstStrideInSrc[static_cast<size_t>(k)] = srcStride[static_cast<size_t>(perm[static_cast<size_t>(k)])];

    Tensor out(newShape);
    std::vector<long> idx(static_cast<size_t>(r), 0);
    long srcOffset = 0;
    const long total = size();
    for (long flat = 0; flat < total; ++flat) {
        out.data_[static_cast<size_t>(flat)] = data_[static_cast<size_t>(srcOffset)];
        // Increment the destination multi-index (last axis fastest).
        for (long k = r - 1; k >= 0; --k) {
            auto ku = static_cast<size_t>(k);
            ++idx[ku];
            srcOffset += dstStrideInSrc[ku];
            if (idx[ku] < newShape[ku]) break;
            srcOffset -= dstStrideInSrc[ku] * newShape[ku];
            idx[ku] = 0;
        }
    }
    return out;
}

Tensor Tensor::conjugate() const {
    Tensor out = *this;
    for (auto& z : out.data_) z = std::conj(z);
    return out;
}

double Tensor::frobenius_norm() const {
    double acc = 0.0;
    for (const auto& z : data_) acc += std::norm(z);
    return std::sqrt(acc);
}

cplx Tensor::scalar_value() const {
    if (size() != 1)
        throw std::invalid_argument("Tensor::scalar_value: tensor has " +
                                    std::to_string(size()) + " entries");
    return data_[0];
}

Tensor& Tensor::operator*=(cplx factor) {
    for (auto& z : data_) z *= factor;
    return *this;
}

Tensor Tensor::identity(long d) {
    if (d < 1) throw std::invalid_argument("Tensor::identity: dimension must be positive");
    Tensor out({d, d});
    for (long i = 0; i < d; ++i) out.at({i, i}) = 1.0;
    return out;
}

// ==== contraction ====

Tensor contract(const Tensor& a, const Tensor& b,
                const std::vector<long>& axesA, const std::vector<long>& axesB) {
    if (axesA.size() != axesB.size())
        throw std::invalid_argument("contract: paired axis lists differ in length");

    const long ra = a.rank();
    const long rb = b.rank();
    std::vector<bool> pairedA(static_cast<size_t>(ra), false);
    std::vector<bool> pairedB(static_cast<size_t>(rb), false);
    long pairedSize = 1;
    for (size_t i = 0; i < axesA.size(); ++i) {
        long axA = axesA[i];
        long axB = axesB[i];
        if (axA < 0 || axA >= ra || axB < 0 || axB >= rb)
            throw std::invalid_argument("contract: axis index out of range");
        if (pairedA[static_cast<size_t>(axA)] || pairedB[static_cast<size_t>(axB)])
            throw std::invalid_argument("contract: axis paired twice");
        if (a.dim(axA) != b.dim(axB))
            throw std::invalid_argument("contract: extent mismatch, a axis " + std::to_string(axA) +
                                        " has " + std::to_string(a.dim(axA)) + ", b axis " +
                                        std::to_string(axB) + " has " + std::to_string(b.dim(axB)));
        pairedA[static_cast<size_t>(axA)] = true;
        pairedB[static_cast<size_t>(axB)] = true;
        pairedSize *= a.dim(axA);
    }

    std::vector<long> freeA, freeB, outShape;
    long freeSizeA = 1, freeSizeB = 1;
    for (long k = 0; k < ra; ++k)
        if (!pairedA[static_cast<size_t>(k)]) {
            freeA.push_back(k);
            freeSizeA *= a.dim(k);
            outShape.push_back(a.dim(k));
        }
    for (long k = 0; k < rb; ++k)
        if (!pairedB[static_cast<size_t>(k)]) {
            freeB.push_back(k);
            freeSizeB *= b.dim(k);
            outShape.push_back(b.dim(k));
        }

    // a -> (free, paired) matrix, b -> (paired, free) matrix, then one GEMM.
    std::vector<long> permA = freeA;
    permA.insert(permA.end(), axesA.begin(), axesA.end());
    std::vector<long> permB(axesB.begin(), axesB.end());
    permB.insert(permB.end(), freeB.begin(), freeB.end());

    Tensor am = a.permute(permA);
    Tensor bm = b.permute(permB);

    Tensor out(outShape);
    ConstMapRM ma(am.data(), freeSizeA, pairedSize);
    ConstMapRM mb(bm.data(), pairedSize, freeSizeB);
    MapRM mo(out.data(), freeSizeA, freeSizeB);
    mo.noalias() = ma * mb;
    return out;
}

// ==== truncated SVD ====

SvdResult svd_truncate(const Tensor& m, long dMax, double cutoff) {
    if (m.rank() != 2)
        throw std::invalid_argument("svd_truncate: expected a rank-2 tensor, got rank " +
                                    std::to_string(m.rank()));
    if (dMax < 1)
        throw std::invalid_argument("svd_truncate: dMax must be at least 1");
    if (cutoff < 0.0)
        throw std::invalid_argument("svd_truncate: cutoff must be non-negative");

    const long rows = m.dim(0);
    const long cols = m.dim(1);
    ConstMapRM mm(m.data(), rows, cols);

    Eigen::MatrixXcd u;
    Eigen::VectorXd sv;
    Eigen::MatrixXcd v;

    // Jacobi is faster below roughly 16x16; the divide-and-conquer kernel
    // wins decisively above that.
    if (std::min(rows, cols) <= 16) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(mm, Eigen::ComputeThinU | Eigen::ComputeThinV);
        u = svd.matrixU();
        sv = svd.singularValues();
        v = svd.matrixV();
    } else {
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(mm, Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (svd.info() != Eigen::Success)
            throw std::runtime_error("svd_truncate: SVD failed to converge on a " +
                                     std::to_string(rows) + "x" + std::to_string(cols) + " matrix");
        u = svd.matrixU();
        sv = svd.singularValues();
        v = svd.matrixV();
    }

    const long full = sv.size();
    long kept = 0;
    const double floor = cutoff * (full > 0 ? sv(0) : 0.0);
    while (kept < full && sv(kept) > floor) ++kept;
    kept = std::min(kept, dMax);
    if (kept < 1) kept = 1; // keep a bond even for a numerically zero block

    SvdResult res;
    res.report.keptRank = kept;
    res.report.largestDiscarded = kept < full ? sv(kept) : 0.0;
    double w = 0.0;
    for (long i = kept; i < full; ++i) w += sv(i) * sv(i);
    res.report.discardedWeight = w;

    res.s.assign(sv.data(), sv.data() + kept);

    Tensor ut({rows, kept});
    MapRM(ut.data(), rows, kept) = u.leftCols(kept);
    Tensor vt({kept, cols});
    MapRM(vt.data(), kept, cols) = v.leftCols(kept).adjoint();
    res.u = std::move(ut);
    res.v = std::move(vt);
    return res;
}

// ==== gate factories ====

namespace {

void require_finite(double value, const char* what) {
    if (!std::isfinite(value))
        throw std::invalid_argument(std::string(what) + " must be finite");
}

} // namespace

Tensor single_quadrature_gate(double amp, double dt, Quadrature axis) {
    require_finite(amp, "single_quadrature_gate: amp");
    require_finite(dt, "single_quadrature_gate: dt");
    if (dt <= 0.0)
        throw std::invalid_argument("single_quadrature_gate: dt must be positive");

    const double th = amp * dt;
    const double c = std::cos(th);
    const double s = std::sin(th);
    Tensor g({2, 2});
    if (axis == Quadrature::X) {
        // cos(th) I - i sin(th) X
        g.at({0, 0}) = c;
        g.at({0, 1}) = cplx(0.0, -s);
        g.at({1, 0}) = cplx(0.0, -s);
        g.at({1, 1}) = c;
    } else {
        // cos(th) I - i sin(th) Y is real: a rotation matrix
        g.at({0, 0}) = c;
        g.at({0, 1}) = -s;
        g.at({1, 0}) = s;
        g.at({1, 1}) = c;
    }
    return g;
}

Tensor bond_gate(double g, double jx, double jy, double jz, double dt) {
    require_finite(g, "bond_gate: g");
    require_finite(jx, "bond_gate: jx");
    require_finite(jy, "bond_gate: jy");
    require_finite(jz, "bond_gate: jz");
    require_finite(dt, "bond_gate: dt");
    if (dt <= 0.0)
        throw std::invalid_argument("bond_gate: dt must be positive");

    // XX, YY and ZZ commute pairwise, so the exponential factorizes over the
    // two invariant planes span{|00>,|11>} and span{|01>,|10>}:
    //   on {|00>,|11>}: jz-part is +c on the diagonal, XX couples with +jx,
    //   YY couples with -jy;
    //   on {|01>,|10>}: diagonal -c, XX couples +jx, YY couples +jy,
    // with c = g + jz.  Each plane exponentiates like a single-qubit
    // rotation exp(-i t (d I + k Sx)).
    const double t = dt;
    const double c = g + jz;
    const cplx phaseOuter = std::exp(cplx(0.0, -c * t)); // |00>,|11> plane
    const cplx phaseInner = std::exp(cplx(0.0, c * t));  // |01>,|10> plane
    const double kOuter = (jx - jy) * t;
    const double kInner = (jx + jy) * t;

    Tensor gate({4, 4});
    gate.at({0, 0}) = phaseOuter * std::cos(kOuter);
    gate.at({3, 3}) = phaseOuter * std::cos(kOuter);
    gate.at({0, 3}) = phaseOuter * cplx(0.0, -std::sin(kOuter));
    gate.at({3, 0}) = phaseOuter * cplx(0.0, -std::sin(kOuter));

    gate.at({1, 1}) = phaseInner * std::cos(kInner);
    gate.at({2, 2}) = phaseInner * std::cos(kInner);
    gate.at({1, 2}) = phaseInner * cplx(0.0, -std::sin(kInner));
    gate.at({2, 1}) = phaseInner * cplx(0.0, -std::sin(kInner));
    return gate;
}

} // namespace qoc
