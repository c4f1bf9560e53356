#include "ifb/objectives.hpp"

#include <cmath>
#include <utility>

namespace ifb {

namespace toy {

namespace {

void require_2d(const char* where, const Vector& x)
{
    if (x.size() != 2)
        throw DimensionMismatch(where, 2, x.size());
}

double sign(double v)
{
    return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
}

} // namespace

double g_value(const Vector& x)
{
    require_2d("toy::g_value", x);
    return x[0] * x[0] - std::log1p(x[0] * x[0]) + x[1] * x[1];
}

Vector g_gradient(const Vector& x)
{
    require_2d("toy::g_gradient", x);
    Vector g(2);
    g[0] = 2.0 * x[0] - 2.0 * x[0] / (1.0 + x[0] * x[0]);
    g[1] = 2.0 * x[1];
    return g;
}

double f_value(const Vector& x)
{
    require_2d("toy::f_value", x);
    return std::abs(x[0]) - std::abs(x[1]);
}

double objective(const Vector& x)
{
    return f_value(x) + g_value(x);
}

Vector f_prox(const Vector& x, double gamma, TieBreak tie)
{
    require_2d("toy::f_prox", x);
    Vector u(2);
    u[0] = prox_abs(x[0], gamma);
    u[1] = prox_neg_abs(x[1], gamma, tie);
    return u;
}

bool critical_point_check(const Vector& x, double tol)
{
    require_2d("toy::critical_point_check", x);
    const Vector d = -g_gradient(x);
    // d|.|(t): {sgn t} for t != 0, [-1, 1] at 0
    const bool first = std::abs(x[0]) <= tol ? std::abs(d[0]) <= 1.0 + tol : std::abs(d[0] - sign(x[0])) <= tol;
    // d(-|.|)(t): {-sgn t} for t != 0, {-1, 1} at 0
    const bool second =
        std::abs(x[1]) <= tol ? std::abs(std::abs(d[1]) - 1.0) <= tol : std::abs(d[1] + sign(x[1])) <= tol;
    return first && second;
}

std::array<Vector, 2> critical_points()
{
    return {Vector{{0.0, 0.5}}, Vector{{0.0, -0.5}}};
}

Problem make_problem(TieBreak tie)
{
    Problem p;
    p.g_value = g_value;
    p.g_gradient = g_gradient;
    p.lip_grad_g = lip_grad_g;
    p.f_value = f_value;
    p.f_prox = [tie](const Vector& x, double gamma) { return ProxResult{f_prox(x, gamma, tie), std::nullopt}; };
    return p;
}

} // namespace toy

double student_t_phi(double t)
{
    return std::log1p(t * t);
}

double student_t_dphi(double t)
{
    return 2.0 * t / (1.0 + t * t);
}

double student_t_ddphi(double t)
{
    const double q = 1.0 + t * t;
    return 2.0 * (1.0 - t * t) / (q * q);
}

DeblurProblem::DeblurProblem(LinearOperator blur, Vector observed, Haar2D wavelet, double lambda)
    : blur_(std::move(blur)), observed_(std::move(observed)), wavelet_(std::move(wavelet)), lambda_(lambda)
{
    if (blur_.out_dim() != observed_.size())
        throw DimensionMismatch("DeblurProblem (observed)", blur_.out_dim(), observed_.size());
    if (blur_.in_dim() != wavelet_.size())
        throw DimensionMismatch("DeblurProblem (wavelet)", blur_.in_dim(), wavelet_.size());
    if (!(lambda_ >= 0.0))
        throw Error("DeblurProblem: lambda must be nonnegative");
}

double DeblurProblem::student_t_value(const Vector& x) const
{
    const Vector r = blur_.apply(x) - observed_;
    return r.unaryExpr([](double t) { return student_t_phi(t); }).sum();
}

Vector DeblurProblem::student_t_gradient(const Vector& x) const
{
    const Vector r = blur_.apply(x) - observed_;
    return blur_.adjoint(r.unaryExpr([](double t) { return student_t_dphi(t); }));
}

double DeblurProblem::l0_wavelet_value(const Vector& x) const
{
    const Vector c = wavelet_.forward(x);
    return lambda_ * static_cast<double>((c.array() != 0.0).count());
}

ProxResult DeblurProblem::prox(const Vector& x, double gamma) const
{
    Vector c = wavelet_.forward(x);
    const double threshold_sq = 2.0 * lambda_ * gamma;
    Index kept = 0;
    for (Index i = 0; i < c.size(); ++i) {
        c[i] = prox_l0(c[i], threshold_sq);
        kept += c[i] != 0.0;
    }
    return {wavelet_.inverse(c), lambda_ * static_cast<double>(kept)};
}

Problem DeblurProblem::make_problem(double lip_grad_g) const
{
    auto self = std::make_shared<const DeblurProblem>(*this);
    Problem p;
    p.g_value = [self](const Vector& x) { return self->student_t_value(x); };
    p.g_gradient = [self](const Vector& x) { return self->student_t_gradient(x); };
    p.lip_grad_g = lip_grad_g;
    p.f_value = [self](const Vector& x) { return self->l0_wavelet_value(x); };
    p.f_prox = [self](const Vector& x, double gamma) { return self->prox(x, gamma); };
    return p;
}

} // namespace ifb
