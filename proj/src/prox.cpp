#include "ifb/prox.hpp"

#include "ifb/operators.hpp"

#include <algorithm>
#include <cmath>

namespace ifb {

ScalarProxSpec ScalarProxSpec::abs(double gamma)
{
    return {ScalarProxKind::abs, gamma, TieBreak::keep_positive};
}

ScalarProxSpec ScalarProxSpec::neg_abs(double gamma, TieBreak tie)
{
    return {ScalarProxKind::neg_abs, gamma, tie};
}

ScalarProxSpec ScalarProxSpec::l0(double lambda_gamma, TieBreak tie)
{
    return {ScalarProxKind::l0, lambda_gamma, tie};
}

double prox_abs(double x, double gamma)
{
    if (x == 0.0)
        return 0.0;
    return x - std::copysign(std::min(std::abs(x), gamma), x);
}

double prox_neg_abs(double x, double gamma, TieBreak tie)
{
    if (x > 0.0)
        return x + gamma;
    if (x < 0.0)
        return x - gamma;
    // argmin is {-gamma, +gamma}
    return tie == TieBreak::keep_negative ? -gamma : gamma;
}

double prox_l0(double t, double threshold_sq, TieBreak tie)
{
    const double t2 = t * t;
    if (t2 > threshold_sq)
        return t;
    if (t2 < threshold_sq)
        return 0.0;
    // argmin is {0, t}
    return tie == TieBreak::keep_value ? t : 0.0;
}

double prox_scalar(double x, const ScalarProxSpec& spec)
{
    switch (spec.kind) {
    case ScalarProxKind::abs:
        return prox_abs(x, spec.weight);
    case ScalarProxKind::neg_abs:
        return prox_neg_abs(x, spec.weight, spec.tie_break);
    case ScalarProxKind::l0:
        return prox_l0(x, 2.0 * spec.weight, spec.tie_break);
    }
    return x;
}

double scalar_penalty(ScalarProxKind kind, double u)
{
    switch (kind) {
    case ScalarProxKind::abs:
        return std::abs(u);
    case ScalarProxKind::neg_abs:
        return -std::abs(u);
    case ScalarProxKind::l0:
        return u != 0.0 ? 1.0 : 0.0;
    }
    return 0.0;
}

Vector prox_separable(const Vector& x, std::span<const ScalarProxSpec> specs)
{
    if (static_cast<Index>(specs.size()) != x.size())
        throw DimensionMismatch("prox_separable", x.size(), static_cast<Index>(specs.size()));
    Vector out(x.size());
    for (Index i = 0; i < x.size(); ++i)
        out[i] = prox_scalar(x[i], specs[static_cast<std::size_t>(i)]);
    return out;
}

Vector prox_separable(const Vector& x, const ScalarProxSpec& spec)
{
    return x.unaryExpr([&spec](double v) { return prox_scalar(v, spec); });
}

Vector prox_orthogonal_conjugate(const Vector& x, const LinearOperator& w, const VectorProx& inner)
{
    if (w.in_dim() != x.size())
        throw DimensionMismatch("prox_orthogonal_conjugate", w.in_dim(), x.size());
    if (w.in_dim() != w.out_dim())
        throw NotOrthogonal("prox_orthogonal_conjugate: operator is not square");

    const Vector coeffs = w.apply(x);
    const double err = (w.adjoint(coeffs) - x).norm();
    if (err > 1e-8 * (1.0 + x.norm()))
        throw NotOrthogonal("prox_orthogonal_conjugate: adjoint does not invert the operator (error " +
                            std::to_string(err) + ")");
    return w.adjoint(inner(coeffs));
}

Grid Grid::around(double x, double gamma, double step)
{
    const double half = 10.0 * gamma + 10.0;
    return {x - half, x + half, step};
}

} // namespace ifb
