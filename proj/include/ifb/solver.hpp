#pragma once

#include "ifb/common.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace ifb {

/// Strongly convex generator F of the Bregman distance
/// D_F(x, y) = F(x) - F(y) - <grad F(y), x - y>.
///
/// The solver itself only runs with F = ||.||^2 / 2; the diagonal quadratic
/// family exists so that distance bounds can be exercised on a non-trivial F.
class BregmanGenerator {
public:
    static BregmanGenerator half_squared_norm();
    /// F(x) = sum_i w_i x_i^2 / 2 with all w_i > 0.
    static BregmanGenerator diagonal_quadratic(Vector weights);

    double value(const Vector& x) const;
    Vector gradient(const Vector& x) const;
    /// strong-convexity modulus sigma
    double modulus() const;
    /// Lipschitz constant of grad F
    double gradient_lipschitz() const;
    bool is_half_squared_norm() const noexcept { return weights_.size() == 0; }

private:
    Vector weights_;
};

double bregman_distance(const BregmanGenerator& generator, const Vector& x, const Vector& y);

/// Prox output. `f_value` carries f(point) when the oracle knows it more
/// accurately than re-evaluating f would (e.g. an l0 count taken from the
/// thresholded coefficients).
struct ProxResult {
    Vector point;
    std::optional<double> f_value;
};

/// Oracle bundle for min f + g: g smooth with Lipschitz gradient, f proper
/// lsc with a computable proximal map.
struct Problem {
    std::function<double(const Vector&)> g_value;
    std::function<Vector(const Vector&)> g_gradient;
    double lip_grad_g = 0.0;
    /// may return +infinity
    std::function<double(const Vector&)> f_value;
    /// any element of argmin_u ||u - x||^2 / (2 gamma) + f(u)
    std::function<ProxResult(const Vector&, double)> f_prox;
    BregmanGenerator generator = BregmanGenerator::half_squared_norm();

    double objective(const Vector& x) const { return f_value(x) + g_value(x); }
};

struct SolverParams {
    double alpha_lower = 0.0;
    double alpha_upper = 0.0;
    double beta_max = 0.0;
    double mu = 1.0;
    double sigma = 1.0;
    double lip_grad_g = 0.0;
    double lip_grad_F = 1.0;
    std::function<double(long)> alpha_schedule;
    std::function<double(long)> beta_schedule;
    long max_iters = 0;
    /// 0 disables the criterion
    double gap_tol = 0.0;
    /// 0 disables the criterion
    double residual_tol = 0.0;

    /// Constant step alpha and inertia beta, F = ||.||^2/2, mu = 1.
    static SolverParams constant(double alpha, double beta, double lip_grad_g, long max_iters);
};

struct DecreaseConstants {
    double m1 = 0.0;
    double m2 = 0.0;
    /// m1 - m2
    double m = 0.0;
    /// constant of the relative-error bound on the Lyapunov subgradient
    double n_bound = 0.0;
};

/// Checks schedule bounds on n = 1..max_iters and the step/inertia condition
/// mu (sigma - L_g alpha_lower) > beta (mu^2 + 1), then derives M1, M2.
/// Throws ParamViolation naming the failed condition; also fails unless M1 > M2.
DecreaseConstants validate_params(const SolverParams& params);

struct SolverState {
    long n = 1;
    Vector x_curr;
    Vector x_prev;
    double obj = 0.0;
    double gap = 0.0;
    double lyapunov = 0.0;
    /// ||y_n||; NaN for the initial pair, where no y_n exists
    double residual_norm = 0.0;
    /// right-hand side of the a-priori bound on ||y_n||
    double residual_bound = 0.0;
    /// cached grad g(x_curr)
    Vector grad_curr;
};

SolverState initial_state(const Problem& problem, const Vector& x0, const Vector& x1, double m2);

/// One iteration for F = ||.||^2/2:
///   x_{n+1} = prox_{alpha f}(x_n - alpha grad g(x_n) + beta (x_n - x_{n-1})).
SolverState step(const SolverState& state, const Problem& problem, double alpha_n, double beta_n, double m2);

/// y_{n+1} = (grad F(x_n) - grad F(x_{n+1}))/alpha + grad g(x_{n+1}) - grad g(x_n)
///           + (beta/alpha)(x_n - x_{n-1}),
/// an element of the limiting subdifferential of f + g at x_{n+1}.
std::pair<Vector, double> subgradient_residual(const Vector& x_prev, const Vector& x_curr, const Vector& x_next,
                                               const Problem& problem, double alpha_n, double beta_n);

/// H(x, y) = (f + g)(x) + m2 ||x - y||^2
double lyapunov_value(const Vector& x, const Vector& y, const Problem& problem, double m2);

struct IterationRecord {
    long n = 0;
    double obj = 0.0;
    double gap = 0.0;
    double lyapunov = 0.0;
    double residual_norm = 0.0;
    double residual_bound = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
};

IterationRecord to_record(const SolverState& state, double alpha, double beta);

enum class StopReason { max_iters, gap_tol, residual_tol };

std::string_view to_string(StopReason reason);

struct RunResult {
    /// trace[0] is the starting pair (x_1, x_0)
    std::vector<IterationRecord> trace;
    SolverState final_state;
    DecreaseConstants constants;
    StopReason stop = StopReason::max_iters;
};

using Observer = std::function<void(const SolverState&)>;

/// Runs from (x0, x1) until max_iters steps, or a tolerance fires. The
/// observer, if any, sees the initial state and every subsequent state.
RunResult run(const Problem& problem, const SolverParams& params, const Vector& x0, const Vector& x1,
              const Observer& observer = {});

/// Counts of violated descent properties over a trace, each checked with
/// slack rel_slack * (1 + |value|).
struct TraceAudit {
    long steps = 0;
    /// H(x_{n+1}, x_n) <= H(x_n, x_{n-1})
    long lyapunov_increases = 0;
    /// H(x_{n+1}, x_n) + M gap_{n+1}^2 <= H(x_n, x_{n-1})
    long sufficient_decrease_failures = 0;
    /// (f+g)(x_{n+1}) + M1 gap_{n+1}^2 <= (f+g)(x_n) + M2 gap_n^2
    long certificate_failures = 0;
    /// ||y_{n+1}|| <= bound
    long residual_bound_failures = 0;
    double worst_excess = 0.0;

    bool ok() const noexcept
    {
        return lyapunov_increases == 0 && sufficient_decrease_failures == 0 && certificate_failures == 0 &&
               residual_bound_failures == 0;
    }
};

TraceAudit audit_trace(const std::vector<IterationRecord>& trace, const DecreaseConstants& constants,
                       double rel_slack = 1e-10);

/// CSV with header `n,obj,gap,lyapunov,residual_norm`, 17 significant digits.
void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& trace);

/// Fixed-width decimal rendering shared by every CSV writer.
std::string format_real(double v);

} // namespace ifb
