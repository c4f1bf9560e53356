#include "ifb/experiments.hpp"

#include "ifb/objectives.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

namespace ifb {

namespace {

std::string tag(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot write " + path.string());
    return f;
}

} // namespace

double isnr(const Vector& original, const Vector& observed, const Vector& estimate)
{
    require_same_size("isnr", original, observed);
    require_same_size("isnr", original, estimate);
    const double err = (original - estimate).squaredNorm();
    if (err == 0.0)
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10((original - observed).squaredNorm() / err);
}

Vector gaussian_noise(Index dim, std::uint64_t seed, double std_dev)
{
    if (!(std_dev >= 0.0))
        throw Error("gaussian_noise: std must be nonnegative");
    Vector out = Vector::Zero(dim);
    if (std_dev == 0.0)
        return out;
    std::mt19937_64 rng(seed);
    // uniform in (0, 1]: 53 random mantissa bits, shifted off zero
    auto uniform = [&rng] { return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53; };
    for (Index i = 0; i < dim; i += 2) {
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double theta = 2.0 * std::numbers::pi * uniform();
        out[i] = std_dev * r * std::cos(theta);
        if (i + 1 < dim)
            out[i + 1] = std_dev * r * std::sin(theta);
    }
    return out;
}

Image synthetic_test_image(int rows, int cols)
{
    if (rows < 1 || cols < 1)
        throw BadDimensions("synthetic_test_image: dimensions must be positive");
    Image img;
    img.rows = rows;
    img.cols = cols;
    img.pixels.resize(Index{rows} * cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double v = (r + 0.5) / rows;
            const double u = (c + 0.5) / cols;
            double p;
            if (v < 0.55) // sky
                p = 0.55 + 0.25 * u - 0.2 * v;
            else // water
                p = 0.3 + 0.06 * std::sin(60.0 * v + 8.0 * u) + 0.1 * (v - 0.55);
            // hull
            if (v > 0.5 && v < 0.68 && u > 0.18 + 0.4 * (v - 0.5) && u < 0.82 - 0.4 * (v - 0.5))
                p = 0.12;
            // sail
            if (v > 0.12 && v <= 0.5 && u > 0.52 && u < 0.52 + 0.55 * (v - 0.12))
                p = 0.95;
            // mast
            if (v > 0.08 && v <= 0.5 && u > 0.5 && u < 0.52)
                p = 0.05;
            // sun
            const double du = u - 0.2;
            const double dv = v - 0.2;
            if (du * du + dv * dv < 0.01)
                p = 0.9 - 2.0 * (du * du + dv * dv);
            // rope stripes
            if (v > 0.7 && v < 0.9 && u > 0.06 && u < 0.3)
                p = ((c / 3) % 2 == 0) ? 0.7 : 0.2;
            img.pixels[Index{r} * cols + c] = std::clamp(p, 0.0, 1.0);
        }
    }
    return img;
}

double step_for_inertia(double beta, double lip_grad_g, double numerator)
{
    return (numerator - 2.0 * beta) / lip_grad_g;
}

std::vector<ToyRun> run_toy_experiment(const ToyExperimentConfig& config)
{
    const Problem problem = toy::make_problem();
    const auto crit = toy::critical_points();
    std::vector<ToyRun> runs;
    runs.reserve(config.starts.size() * config.betas.size());
    for (const auto& start : config.starts) {
        for (const double beta : config.betas) {
            ToyRun run;
            run.start = start;
            run.beta = beta;
            run.alpha = step_for_inertia(beta, toy::lip_grad_g, config.alpha_numerator);
            const Vector x0{{start[0], start[1]}};
            run.iterates.push_back(x0);
            const SolverParams params =
                SolverParams::constant(run.alpha, beta, toy::lip_grad_g, config.iterations);
            run.result = ifb::run(problem, params, x0, x0, [&run](const SolverState& s) {
                run.iterates.push_back(s.x_curr);
            });
            run.terminal = run.result.final_state.x_curr;
            const double d0 = (run.terminal - crit[0]).norm();
            const double d1 = (run.terminal - crit[1]).norm();
            run.nearest = d0 <= d1 ? 0 : 1;
            run.distance = std::min(d0, d1);
            run.is_critical = toy::critical_point_check(run.terminal, config.critical_tol);
            runs.push_back(std::move(run));
        }
    }
    return runs;
}

void write_toy_outputs(const std::vector<ToyRun>& runs, const std::filesystem::path& out_dir)
{
    std::filesystem::create_directories(out_dir);
    const auto crit = toy::critical_points();
    std::ofstream summary = open_out(out_dir / "toy_summary.csv");
    summary << "beta,start_x,start_y,final_obj,final_gap,critical_point,distance,final_x1,final_x2,is_critical\n";
    for (const ToyRun& run : runs) {
        const std::string stem = "b" + tag(run.beta) + "_s" + tag(run.start[0]) + "_" + tag(run.start[1]);
        {
            std::ofstream traj = open_out(out_dir / ("toy_traj_" + stem + ".csv"));
            traj << "n,x1,x2\n";
            for (std::size_t n = 0; n < run.iterates.size(); ++n)
                traj << n << ',' << format_real(run.iterates[n][0]) << ',' << format_real(run.iterates[n][1]) << '\n';
        }
        {
            std::ofstream trace = open_out(out_dir / ("toy_trace_" + stem + ".csv"));
            write_trace_csv(trace, run.result.trace);
        }
        const SolverState& fin = run.result.final_state;
        const Vector& cp = crit[static_cast<std::size_t>(run.nearest)];
        summary << tag(run.beta) << ',' << tag(run.start[0]) << ',' << tag(run.start[1]) << ','
                << format_real(fin.obj) << ',' << format_real(fin.gap) << ",\"(" << tag(cp[0]) << ';' << tag(cp[1])
                << ")\"," << format_real(run.distance) << ',' << format_real(run.terminal[0]) << ','
                << format_real(run.terminal[1]) << ',' << (run.is_critical ? "true" : "false") << '\n';
    }
}

DeblurExperiment run_deblur_experiment(const DeblurExperimentConfig& config)
{
    DeblurExperiment ex;
    if (config.image_path) {
        ex.original = pgm_read(*config.image_path);
        ex.image_name = config.image_path->filename().string();
    } else {
        ex.original = synthetic_test_image(config.synthetic_size, config.synthetic_size);
        ex.image_name = "synthetic" + std::to_string(config.synthetic_size);
    }
    const Image& img = ex.original;
    // validates divisibility before any work
    const Haar2D wavelet({config.haar_levels, img.rows, img.cols});
    const GaussianBlur blur({config.kernel_size, config.kernel_sigma, config.boundary, img.rows, img.cols});
    const LinearOperator blur_op = blur.as_operator();

    ex.observed = blur.apply(img.pixels) + gaussian_noise(img.pixels.size(), config.noise_seed, config.noise_std);
    ex.blur_norm = operator_norm(blur_op, config.norm_iterations, config.noise_seed);

    const DeblurProblem deblur(blur_op, ex.observed, wavelet, config.lambda);
    const Problem problem = deblur.make_problem(config.lip_grad_g);

    for (const double beta : config.betas) {
        DeblurRun run;
        run.beta = beta;
        run.alpha = step_for_inertia(beta, config.lip_grad_g, config.alpha_numerator);
        const SolverParams params = SolverParams::constant(run.alpha, beta, config.lip_grad_g, config.iterations);
        run.result = ifb::run(problem, params, ex.observed, ex.observed, [&](const SolverState& s) {
            run.isnr_trace.push_back(isnr(img.pixels, ex.observed, s.x_curr));
        });
        run.restored = run.result.final_state.x_curr;
        run.final_isnr = run.isnr_trace.back();
        run.distance = (img.pixels - run.restored).norm();
        ex.runs.push_back(std::move(run));
    }
    return ex;
}

void write_deblur_outputs(const DeblurExperiment& ex, const DeblurExperimentConfig& config,
                          const std::filesystem::path& out_dir)
{
    std::filesystem::create_directories(out_dir);
    const Image& img = ex.original;
    pgm_write(out_dir / "deblur_original.pgm", img);
    pgm_write(out_dir / "deblur_observed.pgm", {img.rows, img.cols, ex.observed});

    std::ofstream summary = open_out(out_dir / "deblur_summary.csv");
    summary << "beta,image,final_obj,final_gap,isnr,distance\n";
    for (const DeblurRun& run : ex.runs) {
        const std::string stem = "b" + tag(run.beta);
        {
            std::ofstream trace = open_out(out_dir / ("deblur_trace_" + stem + ".csv"));
            write_trace_csv(trace, run.result.trace);
        }
        {
            std::ofstream trace = open_out(out_dir / ("deblur_isnr_" + stem + ".csv"));
            trace << "n,isnr\n";
            for (std::size_t i = 0; i < run.isnr_trace.size(); ++i)
                trace << i + 1 << ',' << format_real(run.isnr_trace[i]) << '\n';
        }
        pgm_write(out_dir / ("deblur_restored_" + stem + ".pgm"), {img.rows, img.cols, run.restored});
        const SolverState& fin = run.result.final_state;
        summary << tag(run.beta) << ',' << ex.image_name << ',' << format_real(fin.obj) << ','
                << format_real(fin.gap) << ',' << format_real(run.final_isnr) << ',' << format_real(run.distance)
                << '\n';
    }

    std::ofstream info = open_out(out_dir / "deblur_info.csv");
    info << "key,value\n"
         << "image," << ex.image_name << '\n'
         << "rows," << img.rows << '\n'
         << "cols," << img.cols << '\n'
         << "kernel_size," << config.kernel_size << '\n'
         << "kernel_sigma," << format_real(config.kernel_sigma) << '\n'
         << "boundary," << to_string(config.boundary) << '\n'
         << "noise_std," << format_real(config.noise_std) << '\n'
         << "noise_seed," << config.noise_seed << '\n'
         << "lambda," << format_real(config.lambda) << '\n'
         << "iterations," << config.iterations << '\n'
         << "lip_grad_g," << format_real(config.lip_grad_g) << '\n'
         << "blur_norm," << format_real(ex.blur_norm) << '\n';
}

} // namespace ifb
