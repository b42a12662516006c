#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace qcreg {

/// Fully connected ReLU network with a linear scalar output, used as the
/// classical baseline regressor.
struct MlpModel {
    std::vector<int> layer_sizes;              // e.g. {7, 100, 100, 1}
    std::vector<std::vector<double>> weights;  // per layer, row-major out x in
    std::vector<std::vector<double>> biases;   // per layer, one per output

    std::size_t parameter_count() const;
};

struct AdamConfig {
    double learning_rate = 0.02;
    int epochs = 10000;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double l2_weight = 0.0;
};

struct MlpGradients {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
};

struct TrainHistory {
    std::vector<double> loss;  // one entry per epoch
};

/// Weights from N(0, sqrt(2 / fan_in)), biases zero, deterministic per seed.
MlpModel init_mlp(const std::vector<int>& layer_sizes, std::uint64_t seed);

/// Scalar network output for one input row.
double forward(const MlpModel& model, std::span<const double> input);

/// Mean squared error plus l2_weight times the sum of squared weights
/// (biases excluded), with gradients by reverse accumulation. Returns the
/// loss; `grads` is resized to match the model.
double loss_and_gradients(const MlpModel& model,
                          const std::vector<std::vector<double>>& features,
                          std::span<const double> targets, double l2_weight,
                          MlpGradients& grads);

/// Full-batch Adam for config.epochs epochs; model is updated in place.
/// The step size follows a cosine decay from learning_rate on the first
/// epoch to near zero on the last. Single-threaded and deterministic given
/// the initial model.
TrainHistory train_mlp(MlpModel& model, const std::vector<std::vector<double>>& features,
                       std::span<const double> targets, const AdamConfig& config);

struct L2Selection {
    double best_weight = 0.0;
    std::vector<double> validation_mse;  // one entry per grid candidate
};

/// Picks the ridge penalty by a seeded 80/20 split of the training rows:
/// trains one model per candidate on the 80% part, scores plain MSE on the
/// 20% part, and returns the winner (ties go to the larger penalty).
/// `threads` > 1 trains the candidates concurrently.
L2Selection select_l2_weight(const std::vector<std::vector<double>>& features,
                             std::span<const double> targets,
                             std::span<const double> grid, std::uint64_t split_seed,
                             const AdamConfig& config, int threads = 1);

std::vector<double> default_l2_grid();

void save_mlp_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_mlp_model(const std::filesystem::path& path);

}  // namespace qcreg
