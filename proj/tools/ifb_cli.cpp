// Command-line driver for the two experiments: the 2D toy problem and
// l0-Haar regularised deblurring.

#include "ifb/experiments.hpp"
#include "ifb/solver.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

int run_toy(const ifb::ToyExperimentConfig& config, const std::string& out_dir)
{
    const auto runs = ifb::run_toy_experiment(config);
    ifb::write_toy_outputs(runs, out_dir);
    std::printf("%-8s %-12s %-26s %-12s %s\n", "beta", "start", "terminal", "distance", "critical");
    for (const auto& r : runs) {
        char start[32];
        std::snprintf(start, sizeof start, "(%g, %g)", r.start[0], r.start[1]);
        std::printf("%-8g %-12s (% .6f, % .6f)   %-12.3e %s\n", r.beta, start, r.terminal[0], r.terminal[1],
                    r.distance, r.is_critical ? "yes" : "no");
    }
    std::printf("outputs written to %s\n", out_dir.c_str());
    return 0;
}

int run_deblur(const ifb::DeblurExperimentConfig& config, const std::string& out_dir)
{
    const auto ex = ifb::run_deblur_experiment(config);
    ifb::write_deblur_outputs(ex, config, out_dir);
    std::printf("image %s (%dx%d), measured ||A|| = %.12f\n", ex.image_name.c_str(), ex.original.rows,
                ex.original.cols, ex.blur_norm);
    std::printf("%-10s %-10s %s\n", "beta", "alpha", "ISNR(final)");
    for (const auto& r : ex.runs)
        std::printf("%-10g %-10.7f %.6f\n", r.beta, r.alpha, r.final_isnr);
    std::printf("outputs written to %s\n", out_dir.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Inertial forward-backward experiments"};
    app.require_subcommand(1);

    ifb::ToyExperimentConfig toy;
    std::string toy_out = "out/toy";
    auto* toy_cmd = app.add_subcommand("toy", "2D nonsmooth nonconvex problem from the corners (+-8, +-8)");
    toy_cmd->add_option("--beta", toy.betas, "inertial parameters")->capture_default_str();
    toy_cmd->add_option("--iters", toy.iterations, "iterations per run")->capture_default_str();
    toy_cmd->add_option("--out-dir", toy_out, "output directory")->capture_default_str();

    ifb::DeblurExperimentConfig deblur;
    std::string deblur_out = "out/deblur";
    std::string image;
    std::string boundary = "symmetric";
    auto* deblur_cmd = app.add_subcommand("deblur", "l0-Haar regularised deblurring with a Student-t misfit");
    deblur_cmd->add_option("--image", image, "grayscale PGM (P2/P5); default is a synthetic scene");
    deblur_cmd->add_option("--size", deblur.synthetic_size, "size of the synthetic scene")->capture_default_str();
    deblur_cmd->add_option("--beta", deblur.betas, "inertial parameters")->capture_default_str();
    deblur_cmd->add_option("--iters", deblur.iterations, "iterations per run")->capture_default_str();
    deblur_cmd->add_option("--seed", deblur.noise_seed, "noise seed")->capture_default_str();
    deblur_cmd->add_option("--noise-std", deblur.noise_std, "noise standard deviation")->capture_default_str();
    deblur_cmd->add_option("--lambda", deblur.lambda, "l0 regularisation weight")->capture_default_str();
    deblur_cmd->add_option("--boundary", boundary, "blur boundary rule")
        ->check(CLI::IsMember({"symmetric", "zero", "periodic"}))
        ->capture_default_str();
    deblur_cmd->add_option("--out-dir", deblur_out, "output directory")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*toy_cmd)
            return run_toy(toy, toy_out);
        if (!image.empty())
            deblur.image_path = image;
        deblur.boundary = ifb::parse_boundary(boundary);
        return run_deblur(deblur, deblur_out);
    } catch (const ifb::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
