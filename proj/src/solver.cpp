#include "ifb/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <utility>

namespace ifb {

namespace {

template <class Fn>
auto call_oracle(const char* name, Fn&& fn) -> decltype(fn())
{
    try {
        return fn();
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw OracleFailure(std::string(name) + " oracle failed: " + e.what());
    }
}

Vector checked_gradient(const Problem& problem, const Vector& x)
{
    Vector grad = call_oracle("g_gradient", [&] { return problem.g_gradient(x); });
    if (grad.size() != x.size())
        throw OracleFailure("g_gradient oracle returned dimension " + std::to_string(grad.size()) + ", expected " +
                            std::to_string(x.size()));
    return grad;
}

Vector residual_from_gradients(const BregmanGenerator& gen, const Vector& x_prev, const Vector& x_curr,
                               const Vector& x_next, const Vector& grad_curr, const Vector& grad_next,
                               double alpha, double beta)
{
    return (gen.gradient(x_curr) - gen.gradient(x_next)) / alpha + grad_next - grad_curr +
           (beta / alpha) * (x_curr - x_prev);
}

double residual_bound(const Problem& problem, double gap_next, double gap_curr, double alpha, double beta)
{
    const double lip_F = problem.generator.gradient_lipschitz();
    return (lip_F + alpha * problem.lip_grad_g) / alpha * gap_next + (beta / alpha) * gap_curr;
}

void require_finite(const char* name, double v)
{
    if (!std::isfinite(v))
        throw ParamViolation(std::string(name) + " must be finite");
}

} // namespace

BregmanGenerator BregmanGenerator::half_squared_norm()
{
    return {};
}

BregmanGenerator BregmanGenerator::diagonal_quadratic(Vector weights)
{
    if (weights.size() == 0 || !(weights.minCoeff() > 0.0))
        throw Error("diagonal_quadratic: weights must be nonempty and positive");
    BregmanGenerator g;
    g.weights_ = std::move(weights);
    return g;
}

double BregmanGenerator::value(const Vector& x) const
{
    if (is_half_squared_norm())
        return 0.5 * x.squaredNorm();
    require_same_size("BregmanGenerator::value", weights_, x);
    return 0.5 * x.cwiseProduct(weights_).dot(x);
}

Vector BregmanGenerator::gradient(const Vector& x) const
{
    if (is_half_squared_norm())
        return x;
    require_same_size("BregmanGenerator::gradient", weights_, x);
    return weights_.cwiseProduct(x);
}

double BregmanGenerator::modulus() const
{
    return is_half_squared_norm() ? 1.0 : weights_.minCoeff();
}

double BregmanGenerator::gradient_lipschitz() const
{
    return is_half_squared_norm() ? 1.0 : weights_.maxCoeff();
}

double bregman_distance(const BregmanGenerator& generator, const Vector& x, const Vector& y)
{
    require_same_size("bregman_distance", x, y);
    if (generator.is_half_squared_norm())
        return 0.5 * (x - y).squaredNorm();
    return generator.value(x) - generator.value(y) - generator.gradient(y).dot(x - y);
}

SolverParams SolverParams::constant(double alpha, double beta, double lip_grad_g, long max_iters)
{
    SolverParams p;
    p.alpha_lower = alpha;
    p.alpha_upper = alpha;
    p.beta_max = beta;
    p.lip_grad_g = lip_grad_g;
    p.alpha_schedule = [alpha](long) { return alpha; };
    p.beta_schedule = [beta](long) { return beta; };
    p.max_iters = max_iters;
    return p;
}

DecreaseConstants validate_params(const SolverParams& p)
{
    require_finite("alpha_lower", p.alpha_lower);
    require_finite("alpha_upper", p.alpha_upper);
    require_finite("beta_max", p.beta_max);
    require_finite("mu", p.mu);
    require_finite("sigma", p.sigma);
    require_finite("lip_grad_g", p.lip_grad_g);
    require_finite("lip_grad_F", p.lip_grad_F);
    require_finite("gap_tol", p.gap_tol);
    require_finite("residual_tol", p.residual_tol);

    if (!(p.mu > 0.0) || !(p.sigma > 0.0) || !(p.lip_grad_F > 0.0))
        throw ParamViolation("mu, sigma and lip_grad_F must be positive");
    if (!(p.alpha_lower > 0.0) || !(p.alpha_upper > 0.0))
        throw ParamViolation("step bounds must be positive");
    if (p.beta_max < 0.0 || p.lip_grad_g < 0.0 || p.gap_tol < 0.0 || p.residual_tol < 0.0)
        throw ParamViolation("beta_max, lip_grad_g and tolerances must be nonnegative");
    if (p.alpha_lower > p.alpha_upper)
        throw ParamViolation("ordering alpha_lower <= alpha_upper violated");
    if (p.max_iters < 1)
        throw ParamViolation("max_iters must be >= 1");
    if (!p.alpha_schedule || !p.beta_schedule)
        throw ParamViolation("alpha and beta schedules are required");

    // mu (sigma - L_g alpha_lower) > beta (mu^2 + 1)
    const double lhs = p.mu * (p.sigma - p.lip_grad_g * p.alpha_lower);
    const double rhs = p.beta_max * (p.mu * p.mu + 1.0);
    if (!(lhs > rhs))
        throw ParamViolation("step/inertia condition mu(sigma - L_g alpha_lower) > beta(mu^2+1) fails: " +
                             format_real(lhs) + " <= " + format_real(rhs));

    DecreaseConstants c;
    c.m1 = (p.sigma - p.alpha_upper * p.lip_grad_g) / (2.0 * p.alpha_upper) -
           p.mu * p.beta_max / (2.0 * p.alpha_lower);
    c.m2 = p.beta_max / (2.0 * p.mu * p.alpha_lower);
    c.m = c.m1 - c.m2;
    if (!(c.m1 > c.m2))
        throw ParamViolation("M1 > M2 fails: M1 = " + format_real(c.m1) + ", M2 = " + format_real(c.m2) +
                             " (alpha_upper too large for alpha_lower and beta)");

    for (long n = 1; n <= p.max_iters; ++n) {
        const double a = p.alpha_schedule(n);
        const double b = p.beta_schedule(n);
        if (!(a >= p.alpha_lower && a <= p.alpha_upper))
            throw ParamViolation("alpha_n = " + format_real(a) + " outside [alpha_lower, alpha_upper] at n = " +
                                 std::to_string(n));
        if (!(b >= 0.0 && b <= p.beta_max))
            throw ParamViolation("beta_n = " + format_real(b) + " outside [0, beta_max] at n = " +
                                 std::to_string(n));
        c.n_bound = std::max({c.n_bound, p.lip_grad_F / a + p.lip_grad_g + 4.0 * c.m2, b / a});
    }
    return c;
}

SolverState initial_state(const Problem& problem, const Vector& x0, const Vector& x1, double m2)
{
    require_same_size("initial_state", x0, x1);
    SolverState s;
    s.n = 1;
    s.x_prev = x0;
    s.x_curr = x1;
    s.grad_curr = checked_gradient(problem, x1);
    s.obj = call_oracle("f_value", [&] { return problem.f_value(x1); }) +
            call_oracle("g_value", [&] { return problem.g_value(x1); });
    s.gap = (x1 - x0).norm();
    s.lyapunov = s.obj + m2 * s.gap * s.gap;
    s.residual_norm = std::numeric_limits<double>::quiet_NaN();
    s.residual_bound = std::numeric_limits<double>::quiet_NaN();
    return s;
}

SolverState step(const SolverState& state, const Problem& problem, double alpha_n, double beta_n, double m2)
{
    if (!problem.generator.is_half_squared_norm())
        throw Error("step: only the F = ||.||^2/2 generator has a prox-form update");
    require_same_size("step", state.x_curr, state.x_prev);
    if (state.grad_curr.size() != state.x_curr.size())
        throw DimensionMismatch("step (cached gradient)", state.x_curr.size(), state.grad_curr.size());

    const Vector forward = state.x_curr - alpha_n * state.grad_curr + beta_n * (state.x_curr - state.x_prev);
    ProxResult prox = call_oracle("f_prox", [&] { return problem.f_prox(forward, alpha_n); });
    if (prox.point.size() != state.x_curr.size())
        throw OracleFailure("f_prox oracle returned dimension " + std::to_string(prox.point.size()));
    if (!prox.point.allFinite())
        throw NonFiniteIterate(state.n + 1);

    SolverState next;
    next.n = state.n + 1;
    next.x_prev = state.x_curr;
    next.x_curr = std::move(prox.point);
    next.grad_curr = checked_gradient(problem, next.x_curr);
    const double f_next =
        prox.f_value ? *prox.f_value : call_oracle("f_value", [&] { return problem.f_value(next.x_curr); });
    next.obj = f_next + call_oracle("g_value", [&] { return problem.g_value(next.x_curr); });
    next.gap = (next.x_curr - state.x_curr).norm();
    next.lyapunov = next.obj + m2 * next.gap * next.gap;
    next.residual_norm = residual_from_gradients(problem.generator, state.x_prev, state.x_curr, next.x_curr,
                                                 state.grad_curr, next.grad_curr, alpha_n, beta_n)
                             .norm();
    next.residual_bound = residual_bound(problem, next.gap, state.gap, alpha_n, beta_n);
    return next;
}

std::pair<Vector, double> subgradient_residual(const Vector& x_prev, const Vector& x_curr, const Vector& x_next,
                                               const Problem& problem, double alpha_n, double beta_n)
{
    require_same_size("subgradient_residual", x_prev, x_curr);
    require_same_size("subgradient_residual", x_curr, x_next);
    Vector y = residual_from_gradients(problem.generator, x_prev, x_curr, x_next, checked_gradient(problem, x_curr),
                                       checked_gradient(problem, x_next), alpha_n, beta_n);
    const double norm = y.norm();
    return {std::move(y), norm};
}

double lyapunov_value(const Vector& x, const Vector& y, const Problem& problem, double m2)
{
    require_same_size("lyapunov_value", x, y);
    return problem.objective(x) + m2 * (x - y).squaredNorm();
}

IterationRecord to_record(const SolverState& s, double alpha, double beta)
{
    return {s.n, s.obj, s.gap, s.lyapunov, s.residual_norm, s.residual_bound, alpha, beta};
}

std::string_view to_string(StopReason reason)
{
    switch (reason) {
    case StopReason::max_iters:
        return "max_iters";
    case StopReason::gap_tol:
        return "gap_tol";
    case StopReason::residual_tol:
        return "residual_tol";
    }
    return "?";
}

RunResult run(const Problem& problem, const SolverParams& params, const Vector& x0, const Vector& x1,
              const Observer& observer)
{
    RunResult result;
    result.constants = validate_params(params);
    const double m2 = result.constants.m2;

    SolverState state = initial_state(problem, x0, x1, m2);
    result.trace.reserve(static_cast<std::size_t>(params.max_iters) + 1);
    result.trace.push_back(to_record(state, 0.0, 0.0));
    if (observer)
        observer(state);

    for (long k = 1; k <= params.max_iters; ++k) {
        const double alpha = params.alpha_schedule(state.n);
        const double beta = params.beta_schedule(state.n);
        state = step(state, problem, alpha, beta, m2);
        result.trace.push_back(to_record(state, alpha, beta));
        if (observer)
            observer(state);
        if (params.gap_tol > 0.0 && state.gap <= params.gap_tol) {
            result.stop = StopReason::gap_tol;
            break;
        }
        if (params.residual_tol > 0.0 && state.residual_norm <= params.residual_tol) {
            result.stop = StopReason::residual_tol;
            break;
        }
    }
    result.final_state = std::move(state);
    return result;
}

TraceAudit audit_trace(const std::vector<IterationRecord>& trace, const DecreaseConstants& c, double rel_slack)
{
    TraceAudit audit;
    auto check = [&](double lhs, double rhs, double scale, long& counter) {
        const double excess = lhs - rhs - rel_slack * (1.0 + std::abs(scale));
        if (excess > 0.0 || std::isnan(excess)) {
            ++counter;
            audit.worst_excess = std::max(audit.worst_excess, std::isnan(excess) ? std::numeric_limits<double>::infinity() : excess);
        }
    };
    for (std::size_t i = 1; i < trace.size(); ++i) {
        const IterationRecord& prev = trace[i - 1];
        const IterationRecord& cur = trace[i];
        ++audit.steps;
        const double gap2 = cur.gap * cur.gap;
        check(cur.lyapunov, prev.lyapunov, prev.lyapunov, audit.lyapunov_increases);
        check(cur.lyapunov + c.m * gap2, prev.lyapunov, prev.lyapunov, audit.sufficient_decrease_failures);
        check(cur.obj + c.m1 * gap2, prev.obj + c.m2 * prev.gap * prev.gap, prev.obj, audit.certificate_failures);
        check(cur.residual_norm, cur.residual_bound, cur.residual_bound, audit.residual_bound_failures);
    }
    return audit;
}

std::string format_real(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& trace)
{
    out << "n,obj,gap,lyapunov,residual_norm\n";
    for (const IterationRecord& r : trace)
        out << r.n << ',' << format_real(r.obj) << ',' << format_real(r.gap) << ',' << format_real(r.lyapunov) << ','
            << format_real(r.residual_norm) << '\n';
}

} // namespace ifb
