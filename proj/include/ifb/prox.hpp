#pragma once

#include "ifb/common.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace ifb {

class LinearOperator;

/// Selection rule used when a scalar proximal map is set-valued.
enum class TieBreak {
    keep_positive, ///< prox of -|.| at 0: pick +gamma
    keep_value,    ///< prox of l0 on the threshold: keep t
    keep_zero,     ///< prox of l0 on the threshold: pick 0
    keep_negative, ///< prox of -|.| at 0: pick -gamma
};

enum class ScalarProxKind { abs, neg_abs, l0 };

/// One coordinate's proximal map. `weight` is gamma for abs/neg_abs and
/// lambda*gamma for l0.
struct ScalarProxSpec {
    ScalarProxKind kind = ScalarProxKind::abs;
    double weight = 1.0;
    TieBreak tie_break = TieBreak::keep_positive;

    static ScalarProxSpec abs(double gamma);
    static ScalarProxSpec neg_abs(double gamma, TieBreak tie = TieBreak::keep_positive);
    static ScalarProxSpec l0(double lambda_gamma, TieBreak tie = TieBreak::keep_zero);
};

/// Soft thresholding: x - sgn(x) min(|x|, gamma).
double prox_abs(double x, double gamma);

/// prox of -gamma|.|: pushes x away from zero by gamma.
double prox_neg_abs(double x, double gamma, TieBreak tie = TieBreak::keep_positive);

/// Hard thresholding with threshold_sq = 2*lambda*gamma; keeps t iff t^2 > threshold_sq.
double prox_l0(double t, double threshold_sq, TieBreak tie = TieBreak::keep_zero);

double prox_scalar(double x, const ScalarProxSpec& spec);

/// Value of the scalar penalty itself (|u|, -|u| or |u|_0), unweighted.
double scalar_penalty(ScalarProxKind kind, double u);

Vector prox_separable(const Vector& x, std::span<const ScalarProxSpec> specs);

/// Applies the same scalar prox to every coordinate.
Vector prox_separable(const Vector& x, const ScalarProxSpec& spec);

using VectorProx = std::function<Vector(const Vector&)>;

/// W^* inner(W x) for an orthogonal W. Throws NotOrthogonal when W^* W x
/// differs from x by more than 1e-8 (relative).
Vector prox_orthogonal_conjugate(const Vector& x, const LinearOperator& w, const VectorProx& inner);

/// Uniform grid with `step` spacing covering [lo, hi].
struct Grid {
    double lo = 0.0;
    double hi = 0.0;
    double step = 1e-4;

    /// The smallest grid that the brute-force oracle accepts for (x, gamma).
    static Grid around(double x, double gamma, double step = 1e-4);
};

/// Reference prox by exhaustive grid search of u -> (u-x)^2/(2 gamma) + f(u).
/// Grid points are integer multiples of `step`, so 0 is sampled exactly when in
/// range. Ties resolve toward the smallest |u| (the positive side on exact
/// mirror ties).
template <class ScalarFn>
double brute_force_prox_oracle(double x, double gamma, ScalarFn&& f_scalar, const Grid& grid)
{
    if (!(grid.step > 0.0) || !(gamma > 0.0))
        throw EmptyGrid("brute_force_prox_oracle: step and gamma must be positive");
    const auto k_lo = static_cast<long long>(std::ceil(grid.lo / grid.step));
    const auto k_hi = static_cast<long long>(std::floor(grid.hi / grid.step));
    if (k_lo > k_hi)
        throw EmptyGrid("brute_force_prox_oracle: grid contains no points");

    const double inv_2gamma = 0.5 / gamma;
    double best_u = 0.0;
    double best_val = std::numeric_limits<double>::infinity();
    auto visit = [&](long long k) {
        const double u = static_cast<double>(k) * grid.step;
        const double d = u - x;
        const double val = d * d * inv_2gamma + f_scalar(u);
        if (val < best_val) {
            best_val = val;
            best_u = u;
        }
    };
    // walk outward from the sample closest to zero
    const long long k0 = std::clamp<long long>(0, k_lo, k_hi);
    visit(k0);
    for (long long r = 1; k0 - r >= k_lo || k0 + r <= k_hi; ++r) {
        if (k0 + r <= k_hi)
            visit(k0 + r);
        if (k0 - r >= k_lo)
            visit(k0 - r);
    }
    return best_u;
}

} // namespace ifb
