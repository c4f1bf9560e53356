#pragma once

#include "ifb/common.hpp"
#include "ifb/operators.hpp"
#include "ifb/prox.hpp"
#include "ifb/solver.hpp"

#include <array>
#include <memory>

namespace ifb {

/// min |x1| - |x2| + x1^2 - log(1 + x1^2) + x2^2 over R^2. Critical points
/// (and global minimisers) are (0, 1/2) and (0, -1/2).
namespace toy {

inline constexpr double lip_grad_g = 9.0 / 4.0;

double g_value(const Vector& x);
Vector g_gradient(const Vector& x);
double f_value(const Vector& x);
double objective(const Vector& x);

/// prox of gamma f: shrinkage on x1, prox of -gamma|.| on x2.
Vector f_prox(const Vector& x, double gamma, TieBreak tie = TieBreak::keep_positive);

/// Tests -grad g(x) in d|.|(x1) x d(-|.|)(x2), where each subdifferential is
/// evaluated by cases and |x_i| <= tol counts as the zero case.
bool critical_point_check(const Vector& x, double tol);

std::array<Vector, 2> critical_points();

Problem make_problem(TieBreak tie = TieBreak::keep_positive);

} // namespace toy

/// g(x) = sum_i log(1 + (Ax - b)_i^2), f(x) = lambda ||W x||_0.
class DeblurProblem {
public:
    DeblurProblem(LinearOperator blur, Vector observed, Haar2D wavelet, double lambda);

    const LinearOperator& blur() const noexcept { return blur_; }
    const Vector& observed() const noexcept { return observed_; }
    const Haar2D& wavelet() const noexcept { return wavelet_; }
    double lambda() const noexcept { return lambda_; }

    double student_t_value(const Vector& x) const;
    /// A^T r with r_i = 2 (Ax-b)_i / (1 + (Ax-b)_i^2)
    Vector student_t_gradient(const Vector& x) const;

    /// lambda times the exact count of nonzero wavelet coefficients
    double l0_wavelet_value(const Vector& x) const;

    /// W^* hard_threshold(W x, 2 lambda gamma), with f evaluated on the
    /// thresholded coefficients.
    ProxResult prox(const Vector& x, double gamma) const;

    /// Oracle bundle; lip_grad_g is the value the step rule is built on
    /// (2 ||A||^2 <= 2 for a normalised blur).
    Problem make_problem(double lip_grad_g = 2.0) const;

private:
    LinearOperator blur_;
    Vector observed_;
    Haar2D wavelet_;
    double lambda_;
};

/// log(1 + t^2) and its first two derivatives.
double student_t_phi(double t);
double student_t_dphi(double t);
double student_t_ddphi(double t);

} // namespace ifb
