#include "kashin/ortho.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <string>

#include <fftw3.h>

#include "kashin/bytes.hpp"
#include "kashin/rng.hpp"

namespace kashin {

const char* kind_name(OperatorKind k) {
    switch (k) {
    case OperatorKind::RandomDense: return "qr";
    case OperatorKind::Householder: return "householder";
    case OperatorKind::Dct2: return "dct";
    case OperatorKind::Butterfly: return "butterfly";
    }
    return "unknown";
}

OperatorKind kind_from_name(const std::string& name) {
    if (name == "qr" || name == "random") return OperatorKind::RandomDense;
    if (name == "householder") return OperatorKind::Householder;
    if (name == "dct") return OperatorKind::Dct2;
    if (name == "butterfly") return OperatorKind::Butterfly;
    throw InvalidArgumentError("unknown transform kind: " + name);
}

namespace detail {

struct DctPlan {
    int n = 0;
    fftw_plan forward = nullptr; // REDFT10, the analysis direction Q^T x
    fftw_plan inverse = nullptr; // REDFT01, the synthesis direction Q x

    explicit DctPlan(int dim) : n(dim) {
        std::vector<double> in(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        forward = fftw_plan_r2r_1d(n, in.data(), out.data(), FFTW_REDFT10, flags);
        inverse = fftw_plan_r2r_1d(n, in.data(), out.data(), FFTW_REDFT01, flags);
        if (!forward || !inverse) throw Error("fftw plan creation failed");
    }

    ~DctPlan() {
        if (forward) fftw_destroy_plan(forward);
        if (inverse) fftw_destroy_plan(inverse);
    }

    DctPlan(const DctPlan&) = delete;
    DctPlan& operator=(const DctPlan&) = delete;
};

} // namespace detail

namespace {

void check_vec_shape(const OrthogonalOperator& op, const Vector& x) {
    if (x.size() != op.dim())
        throw ShapeError("vector length " + std::to_string(x.size()) +
                         " does not match operator dim " + std::to_string(op.dim()));
}

// Orthonormal DCT-II analysis: out = Q^T x via REDFT10 plus rescaling.
Vector dct_analysis(const detail::DctPlan& plan, const Vector& x) {
    const int n = plan.n;
    if (n == 1) return x;
    Vector in = x;
    Vector out(n);
    fftw_execute_r2r(plan.forward, in.data(), out.data());
    const double s0 = 0.5 / std::sqrt(static_cast<double>(n));
    const double sk = 1.0 / std::sqrt(2.0 * n);
    out[0] *= s0;
    for (int k = 1; k < n; ++k) out[k] *= sk;
    return out;
}

// Synthesis: out = Q x via prescale plus REDFT01.
Vector dct_synthesis(const detail::DctPlan& plan, const Vector& x) {
    const int n = plan.n;
    if (n == 1) return x;
    Vector in = x;
    in[0] /= std::sqrt(static_cast<double>(n));
    const double sk = 1.0 / std::sqrt(2.0 * n);
    for (int k = 1; k < n; ++k) in[k] *= sk;
    Vector out(n);
    fftw_execute_r2r(plan.inverse, in.data(), out.data());
    return out;
}

void block_coeffs(const ButterflyLevel& level, std::size_t b, double m[4], bool transposed) {
    const double c = level.cos_table[b];
    const double s = level.sin_table[b];
    if (level.reflect[b]) {
        // [c s; s -c], symmetric
        m[0] = c; m[1] = s; m[2] = s; m[3] = -c;
    } else if (!transposed) {
        m[0] = c; m[1] = -s; m[2] = s; m[3] = c;
    } else {
        m[0] = c; m[1] = s; m[2] = -s; m[3] = c;
    }
}

void butterfly_level_apply(const ButterflyLevel& level, double* v, int n, bool transposed) {
    const int k = level.block_size;
    const int h = k / 2;
    const int nb = n / k;
    for (int b = 0; b < nb; ++b) {
        double m[4];
        block_coeffs(level, static_cast<std::size_t>(b), m, transposed);
        double* base = v + static_cast<std::ptrdiff_t>(b) * k;
        for (int j = 0; j < h; ++j) {
            const double a = base[j];
            const double d = base[j + h];
            base[j] = m[0] * a + m[1] * d;
            base[j + h] = m[2] * a + m[3] * d;
        }
    }
}

// Q x applies B_2 first; Q^T x applies B_n^T first (levels are stored
// largest block first).
Vector butterfly_apply_impl(const std::vector<ButterflyLevel>& levels, const Vector& x,
                            bool adjoint, std::uint64_t* macs) {
    Vector v = x;
    const int n = static_cast<int>(x.size());
    if (adjoint) {
        for (const auto& level : levels) butterfly_level_apply(level, v.data(), n, true);
    } else {
        for (auto it = levels.rbegin(); it != levels.rend(); ++it)
            butterfly_level_apply(*it, v.data(), n, false);
    }
    if (macs) *macs += 4ull * static_cast<std::uint64_t>(n / 2) * levels.size();
    return v;
}

Matrix butterfly_level_dense(const ButterflyLevel& level, int n) {
    Matrix b = Matrix::Zero(n, n);
    const int k = level.block_size;
    const int h = k / 2;
    for (int blk = 0; blk < n / k; ++blk) {
        double m[4];
        block_coeffs(level, static_cast<std::size_t>(blk), m, false);
        const int off = blk * k;
        for (int j = 0; j < h; ++j) {
            b(off + j, off + j) = m[0];
            b(off + j, off + j + h) = m[1];
            b(off + j + h, off + j) = m[2];
            b(off + j + h, off + j + h) = m[3];
        }
    }
    return b;
}

std::vector<std::uint8_t> butterfly_blob(const std::vector<ButterflyLevel>& levels) {
    std::vector<std::uint8_t> blob;
    for (const auto& level : levels) {
        for (std::size_t b = 0; b < level.angles.size(); ++b) {
            detail::append_f64(blob, level.angles[b]);
            detail::append_u8(blob, level.reflect[b]);
        }
    }
    return blob;
}

std::vector<ButterflyLevel> butterfly_levels_from_blob(int n,
                                                       const std::vector<std::uint8_t>& blob) {
    const std::size_t expected = 9ull * static_cast<std::size_t>(n - 1);
    if (blob.size() != expected)
        throw FormatError("butterfly parameter blob has wrong size");
    detail::ByteReader r(blob.data(), blob.size());
    std::vector<ButterflyLevel> levels;
    for (int k = n; k >= 2; k /= 2) {
        ButterflyLevel level;
        level.block_size = k;
        const int nb = n / k;
        for (int b = 0; b < nb; ++b) {
            const double angle = r.f64();
            const std::uint8_t refl = r.u8();
            level.angles.push_back(angle);
            level.reflect.push_back(refl ? 1 : 0);
            level.cos_table.push_back(std::cos(angle));
            level.sin_table.push_back(std::sin(angle));
        }
        levels.push_back(std::move(level));
    }
    return levels;
}

bool is_power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

} // namespace

Vector OrthogonalOperator::apply(const Vector& x) const {
    check_vec_shape(*this, x);
    switch (kind_) {
    case OperatorKind::RandomDense:
        return std::get<DensePayload>(payload_).q * x;
    case OperatorKind::Householder: {
        const Vector& y = std::get<HouseholderPayload>(payload_).y;
        return x - (2.0 * y.dot(x)) * y;
    }
    case OperatorKind::Dct2:
        return dct_synthesis(*std::get<DctPayload>(payload_).plan, x);
    case OperatorKind::Butterfly:
        return butterfly_apply_impl(std::get<ButterflyPayload>(payload_).levels, x, false, nullptr);
    }
    throw Error("corrupt operator kind");
}

Vector OrthogonalOperator::apply_adjoint(const Vector& x) const {
    check_vec_shape(*this, x);
    switch (kind_) {
    case OperatorKind::RandomDense:
        return std::get<DensePayload>(payload_).q.transpose() * x;
    case OperatorKind::Householder: {
        const Vector& y = std::get<HouseholderPayload>(payload_).y;
        return x - (2.0 * y.dot(x)) * y; // symmetric
    }
    case OperatorKind::Dct2:
        return dct_analysis(*std::get<DctPayload>(payload_).plan, x);
    case OperatorKind::Butterfly:
        return butterfly_apply_impl(std::get<ButterflyPayload>(payload_).levels, x, true, nullptr);
    }
    throw Error("corrupt operator kind");
}

Matrix OrthogonalOperator::to_dense(int max_dim) const {
    if (dim_ > max_dim)
        throw ResourceLimitError("dense materialization of dim " + std::to_string(dim_) +
                                 " exceeds cap " + std::to_string(max_dim));
    const int n = dim_;
    switch (kind_) {
    case OperatorKind::RandomDense:
        return std::get<DensePayload>(payload_).q;
    case OperatorKind::Householder: {
        const Vector& y = std::get<HouseholderPayload>(payload_).y;
        return Matrix::Identity(n, n) - 2.0 * (y * y.transpose());
    }
    case OperatorKind::Dct2: {
        Matrix q(n, n);
        const double c0 = 1.0 / std::sqrt(static_cast<double>(n));
        const double ck = std::sqrt(2.0 / n);
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                q(i, j) = j == 0
                              ? c0
                              : ck * std::cos(std::numbers::pi * (2.0 * i + 1.0) * j / (2.0 * n));
            }
        }
        return q;
    }
    case OperatorKind::Butterfly: {
        const auto& levels = std::get<ButterflyPayload>(payload_).levels;
        Matrix q = Matrix::Identity(n, n);
        for (const auto& level : levels) q = q * butterfly_level_dense(level, n);
        return q;
    }
    }
    throw Error("corrupt operator kind");
}

std::size_t OrthogonalOperator::payload_doubles() const {
    switch (kind_) {
    case OperatorKind::RandomDense: {
        const auto& q = std::get<DensePayload>(payload_).q;
        return static_cast<std::size_t>(q.size());
    }
    case OperatorKind::Householder:
        return static_cast<std::size_t>(dim_);
    case OperatorKind::Dct2:
        return 0;
    case OperatorKind::Butterfly: {
        std::size_t total = 0;
        for (const auto& level : std::get<ButterflyPayload>(payload_).levels)
            total += 3 * level.angles.size();
        return total;
    }
    }
    return 0;
}

OrthogonalOperator make_random_orthogonal(int n, std::uint64_t seed) {
    if (n < 1) throw InvalidDimensionError("dimension must be at least 1");
    NormalSampler normal(seed);
    Matrix a(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) a(i, j) = normal();
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ();
    const Vector rdiag = qr.matrixQR().diagonal();
    for (int j = 0; j < n; ++j)
        if (rdiag[j] < 0.0) q.col(j) = -q.col(j);

    OrthogonalOperator op;
    op.kind_ = OperatorKind::RandomDense;
    op.dim_ = n;
    op.descriptor_ = TransformDescriptor{OperatorKind::RandomDense, static_cast<std::uint32_t>(n),
                                         seed, {}};
    op.payload_ = OrthogonalOperator::DensePayload{std::move(q)};
    return op;
}

namespace {

OrthogonalOperator householder_from_unit(Vector unit, std::uint64_t seed) {
    const int n = static_cast<int>(unit.size());
    std::vector<std::uint8_t> blob;
    blob.reserve(static_cast<std::size_t>(n) * 8);
    for (int i = 0; i < n; ++i) detail::append_f64(blob, unit[i]);

    OrthogonalOperator op;
    op.kind_ = OperatorKind::Householder;
    op.dim_ = n;
    op.descriptor_ = TransformDescriptor{OperatorKind::Householder, static_cast<std::uint32_t>(n),
                                         seed, std::move(blob)};
    op.payload_ = OrthogonalOperator::HouseholderPayload{std::move(unit)};
    return op;
}

} // namespace

OrthogonalOperator make_householder(const Vector& y) {
    if (y.size() < 1) throw InvalidDimensionError("dimension must be at least 1");
    const double norm = y.norm();
    if (norm <= 0.0) throw InvalidArgumentError("householder axis must be nonzero");
    return householder_from_unit(y / norm, 0);
}

OrthogonalOperator make_random_householder(int n, std::uint64_t seed) {
    if (n < 1) throw InvalidDimensionError("dimension must be at least 1");
    NormalSampler normal(seed);
    Vector y(n);
    double norm = 0.0;
    do {
        for (int i = 0; i < n; ++i) y[i] = normal();
        norm = y.norm();
    } while (norm <= 0.0);
    return householder_from_unit(y / norm, seed);
}

OrthogonalOperator make_dct(int n) {
    if (n < 1) throw InvalidDimensionError("dimension must be at least 1");
    OrthogonalOperator op;
    op.kind_ = OperatorKind::Dct2;
    op.dim_ = n;
    op.descriptor_ = TransformDescriptor{OperatorKind::Dct2, static_cast<std::uint32_t>(n), 0, {}};
    op.payload_ = OrthogonalOperator::DctPayload{std::make_shared<const detail::DctPlan>(n)};
    return op;
}

OrthogonalOperator make_butterfly(int n, std::uint64_t seed) {
    if (n < 2 || !is_power_of_two(n))
        throw UnsupportedDimensionError("butterfly requires dim = 2^m with m >= 1, got " +
                                        std::to_string(n));
    std::mt19937_64 gen(seed);
    std::vector<ButterflyLevel> levels;
    for (int k = n; k >= 2; k /= 2) {
        ButterflyLevel level;
        level.block_size = k;
        const int nb = n / k;
        for (int b = 0; b < nb; ++b) {
            const double angle = 2.0 * std::numbers::pi * uniform_unit(gen);
            const std::uint8_t refl = static_cast<std::uint8_t>(gen() & 1u);
            level.angles.push_back(angle);
            level.reflect.push_back(refl);
            level.cos_table.push_back(std::cos(angle));
            level.sin_table.push_back(std::sin(angle));
        }
        levels.push_back(std::move(level));
    }

    OrthogonalOperator op;
    op.kind_ = OperatorKind::Butterfly;
    op.dim_ = n;
    op.descriptor_ = TransformDescriptor{OperatorKind::Butterfly, static_cast<std::uint32_t>(n),
                                         seed, butterfly_blob(levels)};
    op.payload_ = OrthogonalOperator::ButterflyPayload{std::move(levels)};
    return op;
}

OrthogonalOperator make_from_dense(Matrix q) {
    if (q.rows() != q.cols() || q.rows() < 1)
        throw InvalidArgumentError("dense operator payload must be square and nonempty");
    const int n = static_cast<int>(q.rows());
    const double err = (q.transpose() * q - Matrix::Identity(n, n)).norm();
    if (err > 1e-8 * std::sqrt(static_cast<double>(n)))
        throw InvalidArgumentError("dense operator payload is not orthogonal");

    OrthogonalOperator op;
    op.kind_ = OperatorKind::RandomDense;
    op.dim_ = n;
    op.descriptor_ = std::nullopt; // no generating recipe; not serializable
    op.payload_ = OrthogonalOperator::DensePayload{std::move(q)};
    return op;
}

OrthogonalOperator make_from_descriptor(const TransformDescriptor& desc) {
    const int n = static_cast<int>(desc.dim);
    switch (desc.kind) {
    case OperatorKind::RandomDense:
        if (!desc.params.empty())
            throw FormatError("random-dense descriptor carries unexpected parameters");
        return make_random_orthogonal(n, desc.seed);
    case OperatorKind::Householder: {
        if (desc.params.size() != 8ull * desc.dim)
            throw FormatError("householder parameter blob has wrong size");
        detail::ByteReader r(desc.params.data(), desc.params.size());
        Vector y(n);
        for (int i = 0; i < n; ++i) y[i] = r.f64();
        OrthogonalOperator op = make_householder(y);
        // keep the original seed so the descriptor round-trips bit-exactly
        op = householder_from_unit(y / y.norm(), desc.seed);
        return op;
    }
    case OperatorKind::Dct2:
        if (!desc.params.empty())
            throw FormatError("dct descriptor carries unexpected parameters");
        return make_dct(n);
    case OperatorKind::Butterfly: {
        if (n < 2 || !is_power_of_two(n))
            throw UnsupportedDimensionError("butterfly requires dim = 2^m with m >= 1");
        auto levels = butterfly_levels_from_blob(n, desc.params);
        OrthogonalOperator op;
        op.kind_ = OperatorKind::Butterfly;
        op.dim_ = n;
        op.descriptor_ = desc;
        op.payload_ = OrthogonalOperator::ButterflyPayload{std::move(levels)};
        return op;
    }
    }
    throw UnsupportedKindError("unknown transform kind code " +
                               std::to_string(static_cast<int>(desc.kind)));
}

Vector butterfly_apply_counted(const OrthogonalOperator& op, const Vector& x, bool adjoint,
                               std::uint64_t& macs) {
    if (op.kind_ != OperatorKind::Butterfly)
        throw InvalidArgumentError("multiply-add counting is only instrumented for butterfly");
    check_vec_shape(op, x);
    return butterfly_apply_impl(std::get<OrthogonalOperator::ButterflyPayload>(op.payload_).levels,
                                x, adjoint, &macs);
}

Matrix left_apply(const OrthogonalOperator& op, const Matrix& x, bool adjoint) {
    if (x.rows() != op.dim())
        throw ShapeError("left operand rows " + std::to_string(x.rows()) +
                         " do not match operator dim " + std::to_string(op.dim()));
    if (op.kind() == OperatorKind::RandomDense) {
        const Matrix& q = *[&] {
            // direct GEMM on the stored payload
            return &static_cast<const Matrix&>(op.to_dense(op.dim()));
        }();
        return adjoint ? Matrix(q.transpose() * x) : Matrix(q * x);
    }
    Matrix out(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j)
        out.col(j) = adjoint ? op.apply_adjoint(x.col(j)) : op.apply(x.col(j));
    return out;
}

Matrix right_apply(const OrthogonalOperator& op, const Matrix& x, bool adjoint) {
    if (x.cols() != op.dim())
        throw ShapeError("right operand cols " + std::to_string(x.cols()) +
                         " do not match operator dim " + std::to_string(op.dim()));
    if (op.kind() == OperatorKind::RandomDense) {
        const Matrix q = op.to_dense(op.dim());
        return adjoint ? Matrix(x * q.transpose()) : Matrix(x * q);
    }
    Matrix out(x.rows(), x.cols());
    Vector row(x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        row = x.row(i).transpose();
        // row_i(X Q) = Q^T row_i(X); row_i(X Q^T) = Q row_i(X)
        out.row(i) = (adjoint ? op.apply(row) : op.apply_adjoint(row)).transpose();
    }
    return out;
}

} // namespace kashin
