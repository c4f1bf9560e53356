#include "ifb/objectives.hpp"
#include "ifb/solver.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

using namespace ifb;

namespace {

Problem zero_f(std::function<double(const Vector&)> g, std::function<Vector(const Vector&)> grad, double lip)
{
    Problem p;
    p.g_value = std::move(g);
    p.g_gradient = std::move(grad);
    p.lip_grad_g = lip;
    p.f_value = [](const Vector&) { return 0.0; };
    p.f_prox = [](const Vector& x, double) { return ProxResult{x, std::nullopt}; };
    return p;
}

Problem half_squared()
{
    return zero_f([](const Vector& x) { return 0.5 * x.squaredNorm(); }, [](const Vector& x) { return x; }, 1.0);
}

// smooth nonconvex test function: sum_i cos(x_i) + 0.1 x_i^2, gradient Lipschitz 1.2
Problem wavy()
{
    return zero_f([](const Vector& x) { return (x.array().cos() + 0.1 * x.array().square()).sum(); },
                  [](const Vector& x) -> Vector { return -x.array().sin() + 0.2 * x.array(); }, 1.2);
}

} // namespace

TEST_CASE("validate_params")
{
    SUBCASE("toy step rule with beta = 0.199")
    {
        const double beta = 0.199;
        const double alpha = (0.99999 - 2 * beta) / 2.25;
        const DecreaseConstants c = validate_params(SolverParams::constant(alpha, beta, 2.25, 10));
        CHECK(c.m1 - c.m2 == doctest::Approx((1.0 - alpha * 2.25 - 2 * beta) / (2 * alpha)).epsilon(1e-9));
        CHECK(c.m > 0.0);
        CHECK(c.m2 == doctest::Approx(beta / (2 * alpha)));
        // N = max(L_F/alpha + L_g + 4 M2, beta/alpha)
        CHECK(c.n_bound == doctest::Approx(1.0 / alpha + 2.25 + 4 * c.m2));
    }
    SUBCASE("no inertia")
    {
        for (double alpha : {0.01, 0.2, 0.49}) {
            const DecreaseConstants c = validate_params(SolverParams::constant(alpha, 0.0, 2.0, 5));
            CHECK(c.m2 == 0.0);
            CHECK(c.m1 == doctest::Approx((1.0 - 2.0 * alpha) / (2.0 * alpha)));
        }
        CHECK_THROWS_AS(validate_params(SolverParams::constant(0.5, 0.0, 2.0, 5)), ParamViolation);
    }
    SUBCASE("step/inertia condition fails")
    {
        SolverParams p = SolverParams::constant(0.5, 1.0, 1.0, 5);
        try {
            validate_params(p);
            FAIL("expected ParamViolation");
        } catch (const ParamViolation& e) {
            CHECK(std::string(e.what()).find("mu(sigma - L_g alpha_lower)") != std::string::npos);
        }
    }
    SUBCASE("ordering and M1 > M2")
    {
        SolverParams p = SolverParams::constant(0.2, 0.1, 1.0, 5);
        p.alpha_upper = 0.1;
        CHECK_THROWS_WITH_AS(validate_params(p), doctest::Contains("ordering"), ParamViolation);

        // condition holds at alpha_lower but alpha_upper is too long
        p = SolverParams::constant(0.1, 0.1, 1.0, 5);
        p.alpha_upper = 0.9;
        CHECK_THROWS_WITH_AS(validate_params(p), doctest::Contains("M1 > M2"), ParamViolation);

        // the explicit upper limit mu alpha sigma / (L mu alpha + beta (mu^2+1)) is admissible just below
        const double limit = 0.1 / (0.1 + 0.1 * 2.0);
        p.alpha_upper = limit * 0.999;
        CHECK_NOTHROW(validate_params(p));
        p.alpha_upper = limit * 1.001;
        CHECK_THROWS_AS(validate_params(p), ParamViolation);
    }
    SUBCASE("schedules are sampled")
    {
        SolverParams p = SolverParams::constant(0.2, 0.1, 1.0, 20);
        p.alpha_upper = 0.25;
        p.alpha_schedule = [](long n) { return n < 15 ? 0.2 : 0.3; };
        CHECK_THROWS_WITH_AS(validate_params(p), doctest::Contains("n = 15"), ParamViolation);
        p.alpha_schedule = [](long) { return 0.22; };
        p.beta_schedule = [](long n) { return n == 7 ? -0.01 : 0.05; };
        CHECK_THROWS_WITH_AS(validate_params(p), doctest::Contains("beta_n"), ParamViolation);
    }
    SUBCASE("nonfinite and nonpositive fields")
    {
        SolverParams p = SolverParams::constant(0.2, 0.0, 1.0, 5);
        p.mu = 0.0;
        CHECK_THROWS_AS(validate_params(p), ParamViolation);
        p = SolverParams::constant(0.2, 0.0, NAN, 5);
        CHECK_THROWS_AS(validate_params(p), ParamViolation);
        p = SolverParams::constant(0.2, 0.0, 1.0, 0);
        CHECK_THROWS_AS(validate_params(p), ParamViolation);
    }
}

TEST_CASE("bregman_distance")
{
    const BregmanGenerator id = BregmanGenerator::half_squared_norm();
    const Vector x{{1.0, 0.0}};
    CHECK(bregman_distance(id, x, x) == 0.0);
    CHECK(bregman_distance(id, x, Vector::Zero(2)) == 0.5);
    CHECK_THROWS_AS(bregman_distance(id, x, Vector::Zero(3)), DimensionMismatch);

    std::mt19937_64 rng(50);
    const Vector w = oracle::random_vector(rng, 6, 0.5, 3.0);
    const BregmanGenerator quad = BregmanGenerator::diagonal_quadratic(w);
    CHECK(quad.modulus() == w.minCoeff());
    CHECK(quad.gradient_lipschitz() == w.maxCoeff());
    for (const BregmanGenerator* gen : {&id, &quad}) {
        for (int k = 0; k < 1000; ++k) {
            const Vector a = oracle::random_vector(rng, 6, -5.0, 5.0);
            const Vector b = oracle::random_vector(rng, 6, -5.0, 5.0);
            const double d = bregman_distance(*gen, a, b);
            const double n2 = (a - b).squaredNorm();
            CHECK(d >= 0.5 * gen->modulus() * n2 * (1 - 1e-12));
            CHECK(d <= 0.5 * gen->gradient_lipschitz() * n2 * (1 + 1e-12));
        }
    }
    CHECK_THROWS_AS(BregmanGenerator::diagonal_quadratic(Vector{{1.0, 0.0}}), Error);
}

TEST_CASE("step")
{
    SUBCASE("identity prox and zero gradient keep the iterate")
    {
        const Problem p = zero_f([](const Vector&) { return 0.0; }, [](const Vector& x) { return Vector::Zero(x.size()); }, 0.0);
        const Vector x{{1.5, -2.0, 3.0}};
        const SolverState s = initial_state(p, x, x, 0.0);
        const SolverState t = step(s, p, 0.3, 0.0, 0.0);
        CHECK(t.x_curr == x);
        CHECK(t.gap == 0.0);
        CHECK(t.n == 2);
    }
    SUBCASE("heavy-ball reduction with f = 0")
    {
        const Problem p = wavy();
        const Vector x0{{0.3, -1.0}};
        const Vector x1{{0.4, -0.8}};
        const SolverState s = initial_state(p, x0, x1, 0.0);
        const SolverState t = step(s, p, 0.3, 0.2, 0.0);
        const Vector expected = x1 - 0.3 * p.g_gradient(x1) + 0.2 * (x1 - x0);
        CHECK((t.x_curr - expected).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("toy step from (8, 8)")
    {
        const Problem p = toy::make_problem();
        const Vector x{{8.0, 8.0}};
        const double alpha = 0.2676;
        const SolverState t = step(initial_state(p, x, x, 0.0), p, alpha, 0.0, 0.0);
        // grad g(8, 8) = (16 - 16/65, 16)
        const double z1 = 8.0 - alpha * (16.0 - 16.0 / 65.0);
        const double z2 = 8.0 - alpha * 16.0;
        CHECK(t.x_curr[0] == doctest::Approx(z1 - alpha).epsilon(1e-15));
        CHECK(t.x_curr[1] == doctest::Approx(z2 + alpha).epsilon(1e-15));
        // grid-search check of both coordinates
        const double u1 = brute_force_prox_oracle(z1, alpha, [](double u) { return std::abs(u); }, Grid::around(z1, alpha));
        const double u2 = brute_force_prox_oracle(z2, alpha, [](double u) { return -std::abs(u); }, Grid::around(z2, alpha));
        CHECK(std::abs(t.x_curr[0] - u1) <= 1e-4);
        CHECK(std::abs(t.x_curr[1] - u2) <= 1e-4);
        CHECK(t.obj == doctest::Approx(toy::objective(t.x_curr)));
    }
    SUBCASE("failures")
    {
        Problem p = half_squared();
        const Vector x = Vector::Ones(2);
        const SolverState s = initial_state(p, x, x, 0.0);

        Problem nan_prox = p;
        nan_prox.f_prox = [](const Vector& v, double) { return ProxResult{Vector::Constant(v.size(), NAN), {}}; };
        try {
            step(s, nan_prox, 0.5, 0.0, 0.0);
            FAIL("expected NonFiniteIterate");
        } catch (const NonFiniteIterate& e) {
            CHECK(e.iteration() == 2);
        }

        Problem throwing = p;
        throwing.f_prox = [](const Vector&, double) -> ProxResult { throw std::runtime_error("boom"); };
        CHECK_THROWS_WITH_AS(step(s, throwing, 0.5, 0.0, 0.0), doctest::Contains("boom"), OracleFailure);

        Problem bad_grad = p;
        bad_grad.g_gradient = [](const Vector&) { return Vector::Zero(5); };
        CHECK_THROWS_AS(step(s, bad_grad, 0.5, 0.0, 0.0), OracleFailure);

        CHECK_THROWS_AS(initial_state(p, Vector::Zero(2), Vector::Zero(3), 0.0), DimensionMismatch);
    }
}

TEST_CASE("subgradient_residual")
{
    const Problem toy_p = toy::make_problem();
    const Vector x{{0.2, 0.7}};
    const auto [y0, n0] = subgradient_residual(x, x, x, toy_p, 0.3, 0.1);
    CHECK(n0 == 0.0);
    CHECK(y0.isZero(0.0));

    const Problem flat = zero_f([](const Vector&) { return 0.0; }, [](const Vector& v) { return Vector::Zero(v.size()); }, 0.0);
    const Vector a{{1.0, 2.0}};
    const Vector b{{0.5, 1.0}};
    const Vector c{{0.0, 3.0}};
    const auto [y1, n1] = subgradient_residual(a, b, c, flat, 0.25, 0.0);
    CHECK((y1 - (b - c) / 0.25).norm() <= 1e-15);
    CHECK(n1 == doctest::Approx(((b - c) / 0.25).norm()));

    // along a toy run the residual never exceeds its a-priori bound
    const double beta = 0.199;
    const double alpha = (0.99999 - 2 * beta) / 2.25;
    const RunResult r = run(toy_p, SolverParams::constant(alpha, beta, 2.25, 60), Vector{{-8.0, 8.0}}, Vector{{-8.0, 8.0}});
    for (std::size_t i = 1; i < r.trace.size(); ++i)
        CHECK(r.trace[i].residual_norm <= r.trace[i].residual_bound * (1 + 1e-10) + 1e-10);

    CHECK_THROWS_AS(subgradient_residual(a, b, Vector::Zero(3), flat, 0.25, 0.0), DimensionMismatch);
}

TEST_CASE("step residual matches the standalone residual")
{
    const Problem p = toy::make_problem();
    const Vector x0{{5.0, -3.0}};
    const Vector x1{{4.0, -2.5}};
    const SolverState s = initial_state(p, x0, x1, 0.0);
    const SolverState t = step(s, p, 0.2, 0.15, 0.0);
    const auto [y, norm] = subgradient_residual(x0, x1, t.x_curr, p, 0.2, 0.15);
    CHECK(t.residual_norm == doctest::Approx(norm).epsilon(1e-14));
    // y lies in grad g(x_{n+1}) + df(x_{n+1}); here both coordinates are off zero
    const Vector sub = y - toy::g_gradient(t.x_curr);
    CHECK(sub[0] == doctest::Approx(t.x_curr[0] > 0 ? 1.0 : -1.0));
    CHECK(sub[1] == doctest::Approx(t.x_curr[1] > 0 ? -1.0 : 1.0));
}

TEST_CASE("lyapunov_value")
{
    const Problem p = toy::make_problem();
    const Vector x{{0.3, -1.2}};
    const Vector y{{0.1, 0.4}};
    CHECK(lyapunov_value(x, y, p, 0.0) == toy::objective(x));
    CHECK(lyapunov_value(x, x, p, 5.0) == toy::objective(x));
    CHECK(lyapunov_value(x, y, p, 2.0) == doctest::Approx(toy::objective(x) + 2.0 * (x - y).squaredNorm()));
}

TEST_CASE("run on a strongly convex quadratic halves the gap")
{
    const RunResult r = run(half_squared(), SolverParams::constant(0.5, 0.0, 1.0, 30), Vector::Ones(2), Vector::Ones(2));
    REQUIRE(r.trace.size() == 31);
    CHECK(r.trace[1].gap == doctest::Approx(std::sqrt(2.0) / 2));
    for (std::size_t i = 2; i < r.trace.size(); ++i)
        CHECK(r.trace[i].gap == doctest::Approx(0.5 * r.trace[i - 1].gap).epsilon(1e-12));
    CHECK(r.final_state.x_curr.norm() <= 1e-8);
    CHECK(r.stop == StopReason::max_iters);
}

TEST_CASE("run on the toy problem")
{
    const Problem p = toy::make_problem();
    const double alpha = 0.99999 / 2.25;
    const Vector start{{8.0, 8.0}};
    const RunResult r = run(p, SolverParams::constant(alpha, 0.0, 2.25, 100), start, start);
    const Vector& xf = r.final_state.x_curr;
    const double d = std::min((xf - Vector{{0.0, 0.5}}).norm(), (xf - Vector{{0.0, -0.5}}).norm());
    CHECK(d <= 1e-4);
    CHECK(toy::critical_point_check(xf, 1e-3));

    for (double beta : {0.0, 0.199, 0.299}) {
        const double a = (0.99999 - 2 * beta) / 2.25;
        const RunResult rr = run(p, SolverParams::constant(a, beta, 2.25, 100), start, start);
        CHECK(audit_trace(rr.trace, rr.constants).ok());
        // squared gaps are summable: partial sums bounded, increments vanish
        double partial = 0.0;
        for (const auto& rec : rr.trace)
            partial += rec.gap * rec.gap;
        CHECK(partial <= (rr.trace[0].lyapunov - rr.trace.back().lyapunov) / rr.constants.m + 1e-9);
        CHECK(rr.trace.back().gap <= 1e-10);
        for (const auto& rec : rr.trace)
            CHECK(rec.lyapunov == doctest::Approx(rec.obj + rr.constants.m2 * rec.gap * rec.gap).epsilon(1e-14));
    }
}

TEST_CASE("run stopping rules")
{
    SolverParams params = SolverParams::constant(0.5, 0.0, 1.0, 1000);
    params.gap_tol = 1e-6;
    RunResult r = run(half_squared(), params, Vector::Ones(3), Vector::Ones(3));
    CHECK(r.stop == StopReason::gap_tol);
    CHECK(r.trace.back().gap <= 1e-6);
    CHECK(r.trace[r.trace.size() - 2].gap > 1e-6);

    params.gap_tol = 0.0;
    params.residual_tol = 1e-8;
    r = run(half_squared(), params, Vector::Ones(3), Vector::Ones(3));
    CHECK(r.stop == StopReason::residual_tol);
    CHECK(r.trace.back().residual_norm <= 1e-8);

    CHECK_THROWS_AS(run(half_squared(), SolverParams::constant(2.5, 0.0, 1.0, 10), Vector::Ones(3), Vector::Ones(3)),
                    ParamViolation);
}

TEST_CASE("heavy-ball recursion over 50 steps")
{
    const Problem p = wavy();
    std::mt19937_64 rng(60);
    const Vector x0 = oracle::random_vector(rng, 8, -3.0, 3.0);
    const Vector x1 = oracle::random_vector(rng, 8, -3.0, 3.0);
    const double alpha = 0.3;
    const double beta = 0.2;
    std::vector<Vector> iterates;
    run(p, SolverParams::constant(alpha, beta, 1.2, 50), x0, x1, [&](const SolverState& s) { iterates.push_back(s.x_curr); });

    Vector prev = x0;
    Vector cur = x1;
    for (std::size_t k = 1; k < iterates.size(); ++k) {
        Vector next(cur.size());
        for (Index i = 0; i < cur.size(); ++i)
            next[i] = cur[i] - alpha * (-std::sin(cur[i]) + 0.2 * cur[i]) + beta * (cur[i] - prev[i]);
        prev = cur;
        cur = next;
        CHECK((iterates[k] - cur).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("independent runs are reentrant")
{
    const Problem p = toy::make_problem();
    const SolverParams params = SolverParams::constant((0.99999 - 0.398) / 2.25, 0.199, 2.25, 100);
    const Vector s1{{-8.0, 8.0}};
    const Vector s2{{8.0, -8.0}};
    RunResult a;
    RunResult b;
    std::thread ta([&] { a = run(p, params, s1, s1); });
    std::thread tb([&] { b = run(p, params, s2, s2); });
    ta.join();
    tb.join();
    CHECK(a.final_state.x_curr == run(p, params, s1, s1).final_state.x_curr);
    CHECK(b.final_state.x_curr == run(p, params, s2, s2).final_state.x_curr);
}

TEST_CASE("trace CSV")
{
    const RunResult r = run(half_squared(), SolverParams::constant(0.5, 0.0, 1.0, 3), Vector::Ones(2), Vector::Ones(2));
    std::ostringstream out;
    write_trace_csv(out, r.trace);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "n,obj,gap,lyapunov,residual_norm");
    std::getline(in, line);
    CHECK(line.rfind("1,1,0,1,nan", 0) == 0);
    std::getline(in, line);
    CHECK(line == "2,0.25,0.70710678118654757,0.25,0.70710678118654757");
    int rows = 2;
    while (std::getline(in, line))
        ++rows;
    CHECK(rows == 4);
}
