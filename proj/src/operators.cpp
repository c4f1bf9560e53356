#include "ifb/operators.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace ifb {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double inv_sqrt2 = 0.70710678118654752440;

} // namespace

LinearOperator::LinearOperator(Index in_dim, Index out_dim, Map apply, Map adjoint)
    : in_dim_(in_dim), out_dim_(out_dim), apply_(std::move(apply)), adjoint_(std::move(adjoint))
{
}

LinearOperator LinearOperator::identity(Index dim)
{
    auto id = [](const Vector& v) { return v; };
    return {dim, dim, id, id};
}

LinearOperator LinearOperator::diagonal(Vector diag)
{
    const Index n = diag.size();
    auto scale = [d = std::move(diag)](const Vector& v) -> Vector { return d.cwiseProduct(v); };
    return {n, n, scale, scale};
}

Vector LinearOperator::apply(const Vector& x) const
{
    if (x.size() != in_dim_)
        throw DimensionMismatch("LinearOperator::apply", in_dim_, x.size());
    return apply_(x);
}

Vector LinearOperator::adjoint(const Vector& y) const
{
    if (y.size() != out_dim_)
        throw DimensionMismatch("LinearOperator::adjoint", out_dim_, y.size());
    return adjoint_(y);
}

double adjoint_mismatch(const LinearOperator& op, const Vector& x, const Vector& y)
{
    return std::abs(op.apply(x).dot(y) - x.dot(op.adjoint(y)));
}

double operator_norm(const LinearOperator& op, int iters, std::uint64_t seed)
{
    if (iters < 1)
        throw Error("operator_norm: iters must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Vector v(op.in_dim());
    for (Index i = 0; i < v.size(); ++i)
        v[i] = unif(rng);
    double nv = v.norm();
    if (nv == 0.0)
        throw ZeroVector("operator_norm: zero starting vector");
    v /= nv;

    double best = 0.0;
    for (int it = 0; it < iters; ++it) {
        const Vector w = op.apply(v);
        best = std::max(best, w.norm());
        Vector u = op.adjoint(w);
        nv = u.norm();
        if (nv == 0.0)
            throw ZeroVector("operator_norm: iterate collapsed to zero at iteration " + std::to_string(it + 1));
        v = u / nv;
    }
    return best;
}

Boundary parse_boundary(std::string_view name)
{
    if (name == "symmetric")
        return Boundary::symmetric;
    if (name == "zero")
        return Boundary::zero;
    if (name == "periodic")
        return Boundary::periodic;
    throw Error("unknown boundary rule '" + std::string(name) + "'");
}

std::string_view to_string(Boundary b)
{
    switch (b) {
    case Boundary::symmetric:
        return "symmetric";
    case Boundary::zero:
        return "zero";
    case Boundary::periodic:
        return "periodic";
    }
    return "?";
}

Matrix gaussian_kernel(int size, double sigma)
{
    if (size < 1 || size % 2 == 0)
        throw InvalidKernel("gaussian_kernel: size must be a positive odd integer, got " + std::to_string(size));
    if (!(sigma > 0.0))
        throw InvalidKernel("gaussian_kernel: sigma must be positive");
    const int r = size / 2;
    Matrix k(size, size);
    for (int i = -r; i <= r; ++i)
        for (int j = -r; j <= r; ++j)
            k(i + r, j + r) = std::exp(-double(i * i + j * j) / (2.0 * sigma * sigma));
    return k / k.sum();
}

GaussianBlur::GaussianBlur(const GaussianBlurConfig& config)
    : config_(config), kernel_(gaussian_kernel(config.kernel_size, config.sigma))
{
    if (config.image_rows < 1 || config.image_cols < 1)
        throw BadDimensions("GaussianBlur: image dimensions must be positive");
    const int pad = config.kernel_size - 1;
    row_src_.resize(static_cast<std::size_t>(config.image_rows + pad));
    col_src_.resize(static_cast<std::size_t>(config.image_cols + pad));
    for (std::size_t p = 0; p < row_src_.size(); ++p)
        row_src_[p] = fold(static_cast<int>(p), config.image_rows);
    for (std::size_t p = 0; p < col_src_.size(); ++p)
        col_src_[p] = fold(static_cast<int>(p), config.image_cols);
}

int GaussianBlur::fold(int p, int n) const
{
    const int q = p - config_.kernel_size / 2;
    switch (config_.boundary) {
    case Boundary::zero:
        return (q >= 0 && q < n) ? q : -1;
    case Boundary::periodic:
        return ((q % n) + n) % n;
    case Boundary::symmetric: {
        const int period = 2 * n;
        const int m = ((q % period) + period) % period;
        return m < n ? m : period - 1 - m;
    }
    }
    return -1;
}

// Both passes work on the image extended by the boundary rule to
// (rows + k - 1) x (cols + k - 1): apply gathers into the extension and
// correlates, adjoint correlates transposed into it and folds back.
Vector GaussianBlur::apply(const Vector& image) const
{
    if (image.size() != size())
        throw DimensionMismatch("GaussianBlur::apply", size(), image.size());
    const int rows = config_.image_rows;
    const int cols = config_.image_cols;
    const int ks = config_.kernel_size;
    const int pr = static_cast<int>(row_src_.size());
    const int pc = static_cast<int>(col_src_.size());

    std::vector<double> padded(static_cast<std::size_t>(pr) * pc);
    for (int p = 0; p < pr; ++p)
        for (int q = 0; q < pc; ++q) {
            const int si = row_src_[p];
            const int sj = col_src_[q];
            padded[std::size_t(p) * pc + q] = (si < 0 || sj < 0) ? 0.0 : image[Index{si} * cols + sj];
        }

    Vector out = Vector::Zero(size());
    for (int a = 0; a < ks; ++a)
        for (int b = 0; b < ks; ++b) {
            const double w = kernel_(a, b);
            for (int i = 0; i < rows; ++i) {
                const double* src = padded.data() + std::size_t(i + a) * pc + b;
                double* dst = out.data() + Index{i} * cols;
                for (int j = 0; j < cols; ++j)
                    dst[j] += w * src[j];
            }
        }
    return out;
}

Vector GaussianBlur::adjoint(const Vector& image) const
{
    if (image.size() != size())
        throw DimensionMismatch("GaussianBlur::adjoint", size(), image.size());
    const int rows = config_.image_rows;
    const int cols = config_.image_cols;
    const int ks = config_.kernel_size;
    const int pr = static_cast<int>(row_src_.size());
    const int pc = static_cast<int>(col_src_.size());

    std::vector<double> padded(static_cast<std::size_t>(pr) * pc, 0.0);
    for (int a = 0; a < ks; ++a)
        for (int b = 0; b < ks; ++b) {
            const double w = kernel_(a, b);
            for (int i = 0; i < rows; ++i) {
                const double* src = image.data() + Index{i} * cols;
                double* dst = padded.data() + std::size_t(i + a) * pc + b;
                for (int j = 0; j < cols; ++j)
                    dst[j] += w * src[j];
            }
        }

    Vector out = Vector::Zero(size());
    for (int p = 0; p < pr; ++p)
        for (int q = 0; q < pc; ++q) {
            const int si = row_src_[p];
            const int sj = col_src_[q];
            if (si >= 0 && sj >= 0)
                out[Index{si} * cols + sj] += padded[std::size_t(p) * pc + q];
        }
    return out;
}

LinearOperator GaussianBlur::as_operator() const
{
    auto self = std::make_shared<const GaussianBlur>(*this);
    return {size(), size(), [self](const Vector& x) { return self->apply(x); },
            [self](const Vector& y) { return self->adjoint(y); }};
}

Haar2D::Haar2D(const HaarConfig& config) : config_(config)
{
    if (config.levels < 0 || config.levels > 30)
        throw BadDimensions("Haar2D: invalid number of levels");
    const int block = 1 << config.levels;
    if (config.image_rows < 1 || config.image_cols < 1 || config.image_rows % block != 0 ||
        config.image_cols % block != 0)
        throw BadDimensions("Haar2D: image dimensions " + std::to_string(config.image_rows) + "x" +
                            std::to_string(config.image_cols) + " must be positive multiples of " +
                            std::to_string(block));
}

Vector Haar2D::forward(const Vector& image) const
{
    if (image.size() != size())
        throw DimensionMismatch("Haar2D::forward", size(), image.size());
    RowMajor c = Eigen::Map<const RowMajor>(image.data(), config_.image_rows, config_.image_cols);
    std::vector<double> tmp(static_cast<std::size_t>(std::max(config_.image_rows, config_.image_cols)));
    int rows = config_.image_rows;
    int cols = config_.image_cols;
    for (int level = 0; level < config_.levels; ++level) {
        const int hr = rows / 2;
        const int hc = cols / 2;
        for (int i = 0; i < rows; ++i) {
            for (int j = 0; j < hc; ++j) {
                const double a = c(i, 2 * j);
                const double b = c(i, 2 * j + 1);
                tmp[j] = (a + b) * inv_sqrt2;
                tmp[hc + j] = (a - b) * inv_sqrt2;
            }
            for (int j = 0; j < cols; ++j)
                c(i, j) = tmp[j];
        }
        for (int j = 0; j < cols; ++j) {
            for (int i = 0; i < hr; ++i) {
                const double a = c(2 * i, j);
                const double b = c(2 * i + 1, j);
                tmp[i] = (a + b) * inv_sqrt2;
                tmp[hr + i] = (a - b) * inv_sqrt2;
            }
            for (int i = 0; i < rows; ++i)
                c(i, j) = tmp[i];
        }
        rows = hr;
        cols = hc;
    }
    return Eigen::Map<const Vector>(c.data(), size());
}

Vector Haar2D::inverse(const Vector& coeffs) const
{
    if (coeffs.size() != size())
        throw DimensionMismatch("Haar2D::inverse", size(), coeffs.size());
    RowMajor c = Eigen::Map<const RowMajor>(coeffs.data(), config_.image_rows, config_.image_cols);
    std::vector<double> tmp(static_cast<std::size_t>(std::max(config_.image_rows, config_.image_cols)));
    for (int level = config_.levels - 1; level >= 0; --level) {
        const int rows = config_.image_rows >> level;
        const int cols = config_.image_cols >> level;
        const int hr = rows / 2;
        const int hc = cols / 2;
        for (int j = 0; j < cols; ++j) {
            for (int i = 0; i < hr; ++i) {
                const double s = c(i, j);
                const double d = c(hr + i, j);
                tmp[2 * i] = (s + d) * inv_sqrt2;
                tmp[2 * i + 1] = (s - d) * inv_sqrt2;
            }
            for (int i = 0; i < rows; ++i)
                c(i, j) = tmp[i];
        }
        for (int i = 0; i < rows; ++i) {
            for (int j = 0; j < hc; ++j) {
                const double s = c(i, j);
                const double d = c(i, hc + j);
                tmp[2 * j] = (s + d) * inv_sqrt2;
                tmp[2 * j + 1] = (s - d) * inv_sqrt2;
            }
            for (int j = 0; j < cols; ++j)
                c(i, j) = tmp[j];
        }
    }
    return Eigen::Map<const Vector>(c.data(), size());
}

LinearOperator Haar2D::as_operator() const
{
    const Haar2D self = *this;
    return {size(), size(), [self](const Vector& x) { return self.forward(x); },
            [self](const Vector& y) { return self.inverse(y); }};
}

} // namespace ifb
