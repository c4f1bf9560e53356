#pragma once

#include "ifb/common.hpp"

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

namespace ifb {

/// Type-erased linear map with its adjoint. Immutable once built; the
/// wrapped callables must be safe for concurrent read-only use.
class LinearOperator {
public:
    using Map = std::function<Vector(const Vector&)>;

    LinearOperator(Index in_dim, Index out_dim, Map apply, Map adjoint);

    static LinearOperator identity(Index dim);
    static LinearOperator diagonal(Vector diag);

    Index in_dim() const noexcept { return in_dim_; }
    Index out_dim() const noexcept { return out_dim_; }

    Vector apply(const Vector& x) const;
    Vector adjoint(const Vector& y) const;

private:
    Index in_dim_;
    Index out_dim_;
    Map apply_;
    Map adjoint_;
};

/// |<Ax, y> - <x, A^T y>|
double adjoint_mismatch(const LinearOperator& op, const Vector& x, const Vector& y);

/// Power-iteration estimate of the spectral norm, run on A^T A from a seeded
/// Gaussian start. The returned value is the best Rayleigh estimate seen, so
/// it never decreases with `iters` and never exceeds ||A||_2.
double operator_norm(const LinearOperator& op, int iters, std::uint64_t seed = 0);

enum class Boundary { symmetric, zero, periodic };

Boundary parse_boundary(std::string_view name);
std::string_view to_string(Boundary b);

/// size x size Gaussian, entries proportional to exp(-(i^2+j^2)/(2 sigma^2)),
/// normalised to unit sum.
Matrix gaussian_kernel(int size, double sigma);

struct GaussianBlurConfig {
    int kernel_size = 9;
    double sigma = 4.0;
    Boundary boundary = Boundary::symmetric;
    int image_rows = 0;
    int image_cols = 0;
};

/// 2D correlation of a row-major image with a Gaussian kernel.
///
/// `symmetric` mirrors about the pixel edge (x[-1] = x[0]); with a normalised
/// nonnegative kernel the resulting matrix is doubly stochastic. The adjoint is
/// the exact transpose for every boundary rule: it scatters with the same index
/// map the forward pass gathers with.
class GaussianBlur {
public:
    explicit GaussianBlur(const GaussianBlurConfig& config);

    const GaussianBlurConfig& config() const noexcept { return config_; }
    const Matrix& kernel() const noexcept { return kernel_; }
    Index size() const noexcept { return Index{config_.image_rows} * config_.image_cols; }

    Vector apply(const Vector& image) const;
    Vector adjoint(const Vector& image) const;

    LinearOperator as_operator() const;

private:
    // source index of padded position p along an axis of length n, or -1 (zero pad)
    int fold(int p, int n) const;

    GaussianBlurConfig config_;
    Matrix kernel_;
    std::vector<int> row_src_;
    std::vector<int> col_src_;
};

struct HaarConfig {
    int levels = 4;
    int image_rows = 0;
    int image_cols = 0;
};

/// Multilevel orthonormal 2D Haar transform on row-major images.
///
/// Each level transforms the current approximation block: rows first, then
/// columns, mapping a pair (a, b) to ((a+b)/sqrt2, (a-b)/sqrt2) with
/// approximations in the first half. The coarsest approximation ends up in the
/// top-left (rows >> levels) x (cols >> levels) corner.
class Haar2D {
public:
    explicit Haar2D(const HaarConfig& config);

    const HaarConfig& config() const noexcept { return config_; }
    Index size() const noexcept { return Index{config_.image_rows} * config_.image_cols; }

    Vector forward(const Vector& image) const;
    Vector inverse(const Vector& coeffs) const;

    LinearOperator as_operator() const;

private:
    HaarConfig config_;
};

} // namespace ifb
