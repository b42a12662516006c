#include "qcreg/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "qcreg/powell.hpp"  // NumericError

namespace qcreg {

namespace {

void check_model(const MlpModel& m) {
    if (m.layer_sizes.size() < 2) throw std::invalid_argument("network needs at least two layers");
    for (int s : m.layer_sizes) {
        if (s < 1) throw std::invalid_argument("layer sizes must be positive");
    }
    if (m.layer_sizes.back() != 1) throw std::invalid_argument("output layer must have one unit");
    const std::size_t layers = m.layer_sizes.size() - 1;
    if (m.weights.size() != layers || m.biases.size() != layers) {
        throw std::invalid_argument("weight shapes do not match the layer sizes");
    }
    for (std::size_t l = 0; l < layers; ++l) {
        const auto in = static_cast<std::size_t>(m.layer_sizes[l]);
        const auto out = static_cast<std::size_t>(m.layer_sizes[l + 1]);
        if (m.weights[l].size() != in * out || m.biases[l].size() != out) {
            throw std::invalid_argument("weight shapes do not match the layer sizes");
        }
    }
}

// Post-activation values per layer; entry 0 is the input row itself.
using Activations = std::vector<std::vector<double>>;

double forward_cached(const MlpModel& m, std::span<const double> input, Activations& acts) {
    const std::size_t layers = m.layer_sizes.size() - 1;
    acts.resize(layers + 1);
    acts[0].assign(input.begin(), input.end());
    for (std::size_t l = 0; l < layers; ++l) {
        const auto in = static_cast<std::size_t>(m.layer_sizes[l]);
        const auto out = static_cast<std::size_t>(m.layer_sizes[l + 1]);
        const bool hidden = l + 1 < m.layer_sizes.size() - 1;
        auto& y = acts[l + 1];
        y.assign(out, 0.0);
        const auto& x = acts[l];
        const auto& w = m.weights[l];
        for (std::size_t o = 0; o < out; ++o) {
            double sum = m.biases[l][o];
            const double* row = w.data() + o * in;
            for (std::size_t i = 0; i < in; ++i) sum += row[i] * x[i];
            y[o] = hidden ? std::max(0.0, sum) : sum;
        }
    }
    return acts.back()[0];
}

void resize_like(const MlpModel& m, MlpGradients& g) {
    const std::size_t layers = m.layer_sizes.size() - 1;
    g.weights.resize(layers);
    g.biases.resize(layers);
    for (std::size_t l = 0; l < layers; ++l) {
        g.weights[l].assign(m.weights[l].size(), 0.0);
        g.biases[l].assign(m.biases[l].size(), 0.0);
    }
}

}  // namespace

std::size_t MlpModel::parameter_count() const {
    std::size_t count = 0;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        count += static_cast<std::size_t>(layer_sizes[l]) * static_cast<std::size_t>(layer_sizes[l + 1]);
        count += static_cast<std::size_t>(layer_sizes[l + 1]);
    }
    return count;
}

MlpModel init_mlp(const std::vector<int>& layer_sizes, std::uint64_t seed) {
    MlpModel m;
    m.layer_sizes = layer_sizes;
    if (layer_sizes.size() < 2) throw std::invalid_argument("network needs at least two layers");
    for (int s : layer_sizes) {
        if (s < 1) throw std::invalid_argument("layer sizes must be positive");
    }
    if (layer_sizes.back() != 1) throw std::invalid_argument("output layer must have one unit");
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const auto in = static_cast<std::size_t>(layer_sizes[l]);
        const auto out = static_cast<std::size_t>(layer_sizes[l + 1]);
        std::normal_distribution<double> init(0.0, std::sqrt(2.0 / static_cast<double>(in)));
        std::vector<double> w(in * out);
        for (double& v : w) v = init(rng);
        m.weights.push_back(std::move(w));
        m.biases.emplace_back(out, 0.0);
    }
    return m;
}

double forward(const MlpModel& model, std::span<const double> input) {
    check_model(model);
    if (input.size() != static_cast<std::size_t>(model.layer_sizes.front())) {
        throw std::invalid_argument("input row has the wrong width");
    }
    Activations acts;
    return forward_cached(model, input, acts);
}

double loss_and_gradients(const MlpModel& model,
                          const std::vector<std::vector<double>>& features,
                          std::span<const double> targets, double l2_weight,
                          MlpGradients& grads) {
    check_model(model);
    if (features.empty()) throw std::invalid_argument("loss needs at least one sample");
    if (features.size() != targets.size()) throw std::invalid_argument("feature and target counts differ");
    if (l2_weight < 0.0) throw std::invalid_argument("ridge penalty must be non-negative");
    const auto in_width = static_cast<std::size_t>(model.layer_sizes.front());
    const std::size_t layers = model.layer_sizes.size() - 1;
    const double n = static_cast<double>(features.size());
    resize_like(model, grads);
    Activations acts;
    std::vector<double> delta, delta_prev;
    double mse = 0.0;
    for (std::size_t s = 0; s < features.size(); ++s) {
        if (features[s].size() != in_width) throw std::invalid_argument("input row has the wrong width");
        const double pred = forward_cached(model, features[s], acts);
        const double err = pred - targets[s];
        mse += err * err;
        delta.assign(1, 2.0 * err / n);
        for (std::size_t l = layers; l-- > 0;) {
            const auto in = static_cast<std::size_t>(model.layer_sizes[l]);
            const auto out = static_cast<std::size_t>(model.layer_sizes[l + 1]);
            const auto& x = acts[l];
            auto& gw = grads.weights[l];
            for (std::size_t o = 0; o < out; ++o) {
                const double d = delta[o];
                grads.biases[l][o] += d;
                double* grow = gw.data() + o * in;
                for (std::size_t i = 0; i < in; ++i) grow[i] += d * x[i];
            }
            if (l > 0) {
                delta_prev.assign(in, 0.0);
                const auto& w = model.weights[l];
                for (std::size_t o = 0; o < out; ++o) {
                    const double d = delta[o];
                    const double* row = w.data() + o * in;
                    for (std::size_t i = 0; i < in; ++i) delta_prev[i] += d * row[i];
                }
                // ReLU gate: units that were clamped pass no gradient
                for (std::size_t i = 0; i < in; ++i) {
                    if (x[i] <= 0.0) delta_prev[i] = 0.0;
                }
                delta.swap(delta_prev);
            }
        }
    }
    double loss = mse / n;
    if (l2_weight > 0.0) {
        double sq = 0.0;
        for (std::size_t l = 0; l < layers; ++l) {
            for (std::size_t i = 0; i < model.weights[l].size(); ++i) {
                sq += model.weights[l][i] * model.weights[l][i];
                grads.weights[l][i] += 2.0 * l2_weight * model.weights[l][i];
            }
        }
        loss += l2_weight * sq;
    }
    return loss;
}

TrainHistory train_mlp(MlpModel& model, const std::vector<std::vector<double>>& features,
                       std::span<const double> targets, const AdamConfig& config) {
    check_model(model);
    if (config.epochs < 1) throw std::invalid_argument("epoch count must be positive");
    if (!(config.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
    const std::size_t layers = model.layer_sizes.size() - 1;
    MlpGradients grads, m1, m2;
    resize_like(model, m1);
    resize_like(model, m2);
    TrainHistory history;
    history.loss.reserve(static_cast<std::size_t>(config.epochs));
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const double loss = loss_and_gradients(model, features, targets, config.l2_weight, grads);
        if (!std::isfinite(loss)) {
            throw NumericError("training loss became non-finite at epoch " + std::to_string(epoch),
                               static_cast<double>(epoch));
        }
        history.loss.push_back(loss);
        const double bc1 = 1.0 - std::pow(config.beta1, epoch);
        const double bc2 = 1.0 - std::pow(config.beta2, epoch);
        // Cosine-decayed step size: full rate on the first epoch, near zero on
        // the last, so the full-batch updates settle into the minimum instead
        // of orbiting it at a fixed radius.
        const double rate = config.learning_rate * 0.5 *
                            (1.0 + std::cos(M_PI * (epoch - 1) / config.epochs));
        auto step = [&](std::vector<double>& params, std::vector<double>& g,
                        std::vector<double>& mom, std::vector<double>& vel) {
            for (std::size_t i = 0; i < params.size(); ++i) {
                mom[i] = config.beta1 * mom[i] + (1.0 - config.beta1) * g[i];
                vel[i] = config.beta2 * vel[i] + (1.0 - config.beta2) * g[i] * g[i];
                const double mhat = mom[i] / bc1;
                const double vhat = vel[i] / bc2;
                params[i] -= rate * mhat / (std::sqrt(vhat) + config.epsilon);
            }
        };
        for (std::size_t l = 0; l < layers; ++l) {
            step(model.weights[l], grads.weights[l], m1.weights[l], m2.weights[l]);
            step(model.biases[l], grads.biases[l], m1.biases[l], m2.biases[l]);
        }
    }
    return history;
}

std::vector<double> default_l2_grid() { return {1e-5, 1e-4, 1e-3, 1e-2, 1e-1}; }

L2Selection select_l2_weight(const std::vector<std::vector<double>>& features,
                             std::span<const double> targets,
                             std::span<const double> grid, std::uint64_t split_seed,
                             const AdamConfig& config, int threads) {
    if (grid.empty()) throw std::invalid_argument("ridge grid must not be empty");
    for (double g : grid) {
        if (!(g >= 0.0)) throw std::invalid_argument("ridge candidates must be non-negative");
    }
    if (features.size() != targets.size()) throw std::invalid_argument("feature and target counts differ");
    const std::size_t n = features.size();
    const std::size_t n_fit = n * 4 / 5;
    if (n_fit < 1 || n_fit == n) throw std::invalid_argument("too few rows for an 80/20 split");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(split_seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<std::vector<double>> fit_x, val_x;
    std::vector<double> fit_y, val_y;
    for (std::size_t i = 0; i < n; ++i) {
        if (i < n_fit) {
            fit_x.push_back(features[order[i]]);
            fit_y.push_back(targets[order[i]]);
        } else {
            val_x.push_back(features[order[i]]);
            val_y.push_back(targets[order[i]]);
        }
    }

    // Every candidate starts from the same seeded weights so the comparison
    // isolates the penalty.
    const std::uint64_t init_seed = split_seed ^ 0x9e3779b97f4a7c15ULL;
    const auto in_width = static_cast<int>(features.front().size());
    const std::vector<int> layer_sizes{in_width, 100, 100, 1};

    L2Selection sel;
    sel.validation_mse.assign(grid.size(), 0.0);
    if (threads < 1) threads = 1;
    const long candidates = static_cast<long>(grid.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
    for (long c = 0; c < candidates; ++c) {
        MlpModel model = init_mlp(layer_sizes, init_seed);
        AdamConfig cfg = config;
        cfg.l2_weight = grid[static_cast<std::size_t>(c)];
        train_mlp(model, fit_x, fit_y, cfg);
        double mse = 0.0;
        for (std::size_t i = 0; i < val_x.size(); ++i) {
            const double d = forward(model, val_x[i]) - val_y[i];
            mse += d * d;
        }
        sel.validation_mse[static_cast<std::size_t>(c)] = mse / static_cast<double>(val_x.size());
    }

    std::size_t best = 0;
    for (std::size_t c = 1; c < grid.size(); ++c) {
        const bool better = sel.validation_mse[c] < sel.validation_mse[best];
        const bool tie_larger = sel.validation_mse[c] == sel.validation_mse[best] && grid[c] > grid[best];
        if (better || tie_larger) best = c;
    }
    sel.best_weight = grid[best];
    return sel;
}

void save_mlp_model(const MlpModel& model, const std::filesystem::path& path) {
    check_model(model);
    nlohmann::json j;
    j["layer_sizes"] = model.layer_sizes;
    j["weights"] = model.weights;
    j["biases"] = model.biases;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << j.dump() << '\n';
}

MlpModel load_mlp_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    nlohmann::json j = nlohmann::json::parse(in);
    MlpModel m;
    m.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
    m.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    m.biases = j.at("biases").get<std::vector<std::vector<double>>>();
    check_model(m);
    return m;
}

}  // namespace qcreg
