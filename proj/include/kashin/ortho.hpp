#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "kashin/errors.hpp"

namespace kashin {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class OperatorKind : std::uint8_t {
    RandomDense = 0,
    Householder = 1,
    Dct2 = 2,
    Butterfly = 3,
};

const char* kind_name(OperatorKind k);
OperatorKind kind_from_name(const std::string& name);

/// Everything needed to regenerate an operator without storing it densely:
/// kind + dim + seed, plus a parameter blob for kinds whose parameters are
/// cheap to keep (butterfly angles, householder axis). RandomDense carries
/// only its seed and is rebuilt through the same seeded QR.
struct TransformDescriptor {
    OperatorKind kind = OperatorKind::RandomDense;
    std::uint32_t dim = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint8_t> params;

    bool operator==(const TransformDescriptor&) const = default;
};

namespace detail {
struct DctPlan; // fftw plans, hidden from the public header
}

/// One butterfly factor matrix B_k: block diagonal with n/k orthogonal
/// blocks, each parameterized by one rotation angle and one reflection bit.
struct ButterflyLevel {
    int block_size = 0;                // k
    std::vector<double> angles;        // n/k entries
    std::vector<std::uint8_t> reflect; // n/k entries
    std::vector<double> cos_table;     // derived
    std::vector<double> sin_table;     // derived
};

/// An orthogonal linear map with forward and adjoint application.
/// Immutable after construction; applies are pure and thread-safe.
/// Construction itself must stay single-threaded (fftw planning).
class OrthogonalOperator {
public:
    static constexpr int kDenseCap = 4096;

    OperatorKind kind() const { return kind_; }
    int dim() const { return dim_; }

    Vector apply(const Vector& x) const;         // Q x
    Vector apply_adjoint(const Vector& x) const; // Q^T x

    /// Dense materialization, built from the defining formulas (not the fast
    /// apply paths) so tests can use it as an independent oracle.
    Matrix to_dense(int max_dim = kDenseCap) const;

    /// Descriptor for serialization; empty for operators wrapped from an
    /// arbitrary dense matrix, which have no generating recipe.
    const std::optional<TransformDescriptor>& descriptor() const { return descriptor_; }

    /// Doubles held by the payload; lets tests assert that the structured
    /// kinds never store an n-by-n matrix.
    std::size_t payload_doubles() const;

    friend OrthogonalOperator make_random_orthogonal(int n, std::uint64_t seed);
    friend OrthogonalOperator make_householder(const Vector& y);
    friend OrthogonalOperator make_random_householder(int n, std::uint64_t seed);
    friend OrthogonalOperator make_dct(int n);
    friend OrthogonalOperator make_butterfly(int n, std::uint64_t seed);
    friend OrthogonalOperator make_from_dense(Matrix q);

    /// Butterfly apply with a multiply-add counter, for complexity tests.
    friend Vector butterfly_apply_counted(const OrthogonalOperator& op, const Vector& x,
                                          bool adjoint, std::uint64_t& macs);

private:
    OrthogonalOperator() = default;

    struct DensePayload {
        Matrix q;
    };
    struct HouseholderPayload {
        Vector y; // unit
    };
    struct DctPayload {
        std::shared_ptr<const detail::DctPlan> plan;
    };
    struct ButterflyPayload {
        std::vector<ButterflyLevel> levels; // k = n, n/2, ..., 2
    };

    OperatorKind kind_ = OperatorKind::RandomDense;
    int dim_ = 0;
    std::optional<TransformDescriptor> descriptor_;
    std::variant<DensePayload, HouseholderPayload, DctPayload, ButterflyPayload> payload_;
};

/// Haar-distributed random orthogonal matrix: QR of a standard-normal
/// matrix with the R-diagonal sign correction.
OrthogonalOperator make_random_orthogonal(int n, std::uint64_t seed);

/// Reflection I - 2yy^T across the hyperplane orthogonal to y
/// (y normalized internally). Applies in O(n).
OrthogonalOperator make_householder(const Vector& y);

/// Householder reflection with a seeded random unit axis.
OrthogonalOperator make_random_householder(int n, std::uint64_t seed);

/// Orthonormal DCT-II. Column 0 is the constant column 1/sqrt(n); apply and
/// adjoint run matrix-free in O(n log n).
OrthogonalOperator make_dct(int n);

/// Random butterfly matrix Q = B_n B_{n/2} ... B_2 for n = 2^m, m >= 1.
/// Applies in at most 4 n log2(n) multiply-adds.
OrthogonalOperator make_butterfly(int n, std::uint64_t seed);

/// Wraps an explicit orthogonal matrix (validated); used by test oracles.
OrthogonalOperator make_from_dense(Matrix q);

OrthogonalOperator make_from_descriptor(const TransformDescriptor& desc);

Vector butterfly_apply_counted(const OrthogonalOperator& op, const Vector& x,
                               bool adjoint, std::uint64_t& macs);

/// (adjoint ? Q^T : Q) * X, using the operator's fast path column-wise.
Matrix left_apply(const OrthogonalOperator& op, const Matrix& x, bool adjoint);

/// X * (adjoint ? Q^T : Q), fast path row-wise.
Matrix right_apply(const OrthogonalOperator& op, const Matrix& x, bool adjoint);

} // namespace kashin
