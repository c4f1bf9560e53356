#pragma once

#include "ifb/common.hpp"
#include "ifb/operators.hpp"
#include "ifb/pgm.hpp"
#include "ifb/solver.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace ifb {

/// 10 log10(||x - b||^2 / ||x - x_n||^2); +infinity when the estimate is exact.
double isnr(const Vector& original, const Vector& observed, const Vector& estimate);

/// Zero-mean white Gaussian noise: Box-Muller over std::mt19937_64, so the
/// output is identical across standard libraries for a given seed.
Vector gaussian_noise(Index dim, std::uint64_t seed, double std_dev);

/// Deterministic piecewise-smooth grayscale test scene in [0, 1].
Image synthetic_test_image(int rows, int cols);

// ---------------------------------------------------------------------------
// 2D toy problem

struct ToyExperimentConfig {
    std::vector<std::array<double, 2>> starts{{-8.0, -8.0}, {-8.0, 8.0}, {8.0, -8.0}, {8.0, 8.0}};
    std::vector<double> betas{0.0, 0.199, 0.299};
    long iterations = 100;
    double alpha_numerator = 0.99999;
    double critical_tol = 1e-3;
};

/// alpha_n = (numerator - 2 beta) / L_g
double step_for_inertia(double beta, double lip_grad_g, double numerator);

struct ToyRun {
    std::array<double, 2> start{};
    double beta = 0.0;
    double alpha = 0.0;
    RunResult result;
    /// x_0, x_1, ..., x_final
    std::vector<Vector> iterates;
    Vector terminal;
    /// index into toy::critical_points()
    int nearest = 0;
    double distance = 0.0;
    bool is_critical = false;
};

/// One run per (start, beta), starts outermost, x_0 = x_1 = start.
std::vector<ToyRun> run_toy_experiment(const ToyExperimentConfig& config);

/// Writes toy_traj_*.csv (n,x1,x2), toy_trace_*.csv and toy_summary.csv.
void write_toy_outputs(const std::vector<ToyRun>& runs, const std::filesystem::path& out_dir);

// ---------------------------------------------------------------------------
// l0-Haar regularised deblurring

struct DeblurExperimentConfig {
    /// when unset, synthetic_test_image(synthetic_size, synthetic_size)
    std::optional<std::filesystem::path> image_path;
    int synthetic_size = 128;
    int kernel_size = 9;
    double kernel_sigma = 4.0;
    Boundary boundary = Boundary::symmetric;
    int haar_levels = 4;
    double noise_std = 1e-6;
    std::uint64_t noise_seed = 1;
    double lambda = 1e-5;
    std::vector<double> betas{0.4, 0.2, 0.01, 0.0001, 1e-7, 0.0};
    long iterations = 300;
    double lip_grad_g = 2.0;
    double alpha_numerator = 0.999999;
    int norm_iterations = 100;
};

struct DeblurRun {
    double beta = 0.0;
    double alpha = 0.0;
    RunResult result;
    /// ISNR(n) for n = 1..final
    std::vector<double> isnr_trace;
    Vector restored;
    double final_isnr = 0.0;
    /// ||x_true - x_final||
    double distance = 0.0;
};

struct DeblurExperiment {
    std::string image_name;
    Image original;
    Vector observed;
    /// power-iteration estimate of ||A||_2
    double blur_norm = 0.0;
    std::vector<DeblurRun> runs;
};

/// b = A x + noise; every beta runs from x_0 = x_1 = b.
DeblurExperiment run_deblur_experiment(const DeblurExperimentConfig& config);

/// Writes per-beta traces, ISNR traces and restored PGMs, plus the original,
/// the observation, deblur_summary.csv and deblur_info.csv.
void write_deblur_outputs(const DeblurExperiment& experiment, const DeblurExperimentConfig& config,
                          const std::filesystem::path& out_dir);

} // namespace ifb
