#include "qcreg/qnn.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace qcreg {

namespace {

// Dense real-amplitude circuit evaluation. Arithmetic matches StateVector
// value for value; the low-qubit rotations are fused into one pass over
// contiguous 8-amplitude blocks because strided pair updates vectorize
// poorly.

void ry_pass(double* __restrict a, std::size_t dim, int q, double c, double s) {
    const std::size_t step = std::size_t{1} << q;
    for (std::size_t base = 0; base < dim; base += 2 * step) {
        double* __restrict lo = a + base;
        double* __restrict hi = a + base + step;
        for (std::size_t i = 0; i < step; ++i) {
            const double a0 = lo[i], a1 = hi[i];
            lo[i] = c * a0 - s * a1;
            hi[i] = s * a0 + c * a1;
        }
    }
}

void ry_low3_pass(double* __restrict a, std::size_t dim,
                  double c0, double s0, double c1, double s1, double c2, double s2) {
    for (std::size_t base = 0; base < dim; base += 8) {
        double v0 = a[base], v1 = a[base + 1], v2 = a[base + 2], v3 = a[base + 3];
        double v4 = a[base + 4], v5 = a[base + 5], v6 = a[base + 6], v7 = a[base + 7];
        double t0, t1;
        t0 = v0; t1 = v1; v0 = c0 * t0 - s0 * t1; v1 = s0 * t0 + c0 * t1;
        t0 = v2; t1 = v3; v2 = c0 * t0 - s0 * t1; v3 = s0 * t0 + c0 * t1;
        t0 = v4; t1 = v5; v4 = c0 * t0 - s0 * t1; v5 = s0 * t0 + c0 * t1;
        t0 = v6; t1 = v7; v6 = c0 * t0 - s0 * t1; v7 = s0 * t0 + c0 * t1;
        t0 = v0; t1 = v2; v0 = c1 * t0 - s1 * t1; v2 = s1 * t0 + c1 * t1;
        t0 = v1; t1 = v3; v1 = c1 * t0 - s1 * t1; v3 = s1 * t0 + c1 * t1;
        t0 = v4; t1 = v6; v4 = c1 * t0 - s1 * t1; v6 = s1 * t0 + c1 * t1;
        t0 = v5; t1 = v7; v5 = c1 * t0 - s1 * t1; v7 = s1 * t0 + c1 * t1;
        t0 = v0; t1 = v4; v0 = c2 * t0 - s2 * t1; v4 = s2 * t0 + c2 * t1;
        t0 = v1; t1 = v5; v1 = c2 * t0 - s2 * t1; v5 = s2 * t0 + c2 * t1;
        t0 = v2; t1 = v6; v2 = c2 * t0 - s2 * t1; v6 = s2 * t0 + c2 * t1;
        t0 = v3; t1 = v7; v3 = c2 * t0 - s2 * t1; v7 = s2 * t0 + c2 * t1;
        a[base] = v0; a[base + 1] = v1; a[base + 2] = v2; a[base + 3] = v3;
        a[base + 4] = v4; a[base + 5] = v5; a[base + 6] = v6; a[base + 7] = v7;
    }
}

struct RealSim {
    int n = 0;
    std::vector<double>* amps = nullptr;
    std::vector<double>* scratch = nullptr;

    std::size_t dim() const { return std::size_t{1} << n; }

    // Builds the product state of the encoder directly, doubling the filled
    // prefix once per qubit.
    void encode(const QnnModel& model, std::span<const double> row) {
        auto& a = *amps;
        a.resize(dim());
        a[0] = 1.0;
        std::size_t size = 1;
        for (int k = 0; k < model.n_attributes; ++k) {
            const double theta = encode_angle(row[static_cast<std::size_t>(k)]);
            const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
            for (int j = 0; j < model.width; ++j) {
                for (std::size_t i = 0; i < size; ++i) {
                    const double v = a[i];
                    a[i] = c * v;
                    a[i + size] = s * v;
                }
                size <<= 1;
            }
        }
    }

    void ry_layer(const double* thetas) {
        auto* a = amps->data();
        const std::size_t d = dim();
        int q = 0;
        if (n >= 3) {
            double c[3], s[3];
            for (; q < 3; ++q) {
                c[q] = std::cos(0.5 * thetas[q]);
                s[q] = std::sin(0.5 * thetas[q]);
            }
            ry_low3_pass(a, d, c[0], s[0], c[1], s[1], c[2], s[2]);
        }
        for (; q < n; ++q) {
            ry_pass(a, d, q, std::cos(0.5 * thetas[q]), std::sin(0.5 * thetas[q]));
        }
    }

    // CNOT(0,1), ..., CNOT(n-2,n-1) as one permutation: result bit k is the
    // parity of source bits 0..k, so amplitude j is fetched from j ^ (j << 1).
    void cnot_chain() {
        if (n == 1) return;
        const std::size_t d = dim(), mask = d - 1;
        scratch->resize(d);
        double* __restrict out = scratch->data();
        const double* __restrict in = amps->data();
        for (std::size_t j = 0; j < d; ++j) out[j] = in[(j ^ (j << 1)) & mask];
        amps->swap(*scratch);
    }

    double sum_z() const {
        const auto& a = *amps;
        const std::size_t d = dim();
        double e = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            e += static_cast<double>(n - 2 * std::popcount(i)) * a[i] * a[i];
        }
        return e;
    }
};

void check_model(const QnnModel& model) {
    if (model.n_attributes < 1) throw std::invalid_argument("model needs at least one attribute");
    if (model.width < 1) throw std::invalid_argument("qubit width must be positive");
    if (model.depth < 1) throw std::invalid_argument("circuit depth must be positive");
    if (model.n_qubits() > kMaxQubits) {
        throw std::invalid_argument("the circuit needs " + std::to_string(model.n_qubits()) +
                                    " qubits, more than the supported " +
                                    std::to_string(kMaxQubits));
    }
    const std::size_t expected =
        static_cast<std::size_t>(model.n_qubits()) * static_cast<std::size_t>(model.depth);
    if (model.params.size() != expected) {
        throw std::invalid_argument("parameter vector has " + std::to_string(model.params.size()) +
                                    " entries, expected " + std::to_string(expected));
    }
}

void encode_into(const QnnModel& model, std::span<const double> row, StateVector& state) {
    if (row.size() != static_cast<std::size_t>(model.n_attributes)) {
        throw std::invalid_argument("feature row has " + std::to_string(row.size()) +
                                    " entries, expected " + std::to_string(model.n_attributes));
    }
    for (int k = 0; k < model.n_attributes; ++k) {
        const double theta = encode_angle(row[k]);
        for (int j = 0; j < model.width; ++j) {
            state.apply_ry(k * model.width + j, theta);
        }
    }
}

}  // namespace

double encode_angle(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("cannot encode a non-finite feature value");
    return std::atan(x) + M_PI / 2.0;
}

QnnModel build_model(int n_attributes, int width, int depth, std::uint64_t seed) {
    QnnModel model;
    model.n_attributes = n_attributes;
    model.width = width;
    model.depth = depth;
    if (n_attributes < 1) throw std::invalid_argument("model needs at least one attribute");
    if (width < 1) throw std::invalid_argument("qubit width must be positive");
    if (depth < 1) throw std::invalid_argument("circuit depth must be positive");
    if (model.n_qubits() > kMaxQubits) {
        throw std::invalid_argument("the circuit needs " + std::to_string(model.n_qubits()) +
                                    " qubits, more than the supported " +
                                    std::to_string(kMaxQubits));
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    model.params.resize(static_cast<std::size_t>(model.n_qubits()) * depth);
    for (double& p : model.params) p = angle(rng);
    return model;
}

StateVector apply_encoder(const QnnModel& model, std::span<const double> row) {
    check_model(model);
    StateVector state(model.n_qubits());
    encode_into(model, row, state);
    return state;
}

void apply_ansatz(const QnnModel& model, StateVector& state) {
    check_model(model);
    if (state.n_qubits() != model.n_qubits()) {
        throw std::invalid_argument("state qubit count does not match the model");
    }
    const int nq = model.n_qubits();
    std::size_t p = 0;
    for (int block = 0; block < model.depth; ++block) {
        for (int q = 0; q < nq; ++q) state.apply_ry(q, model.params[p++]);
        state.apply_cnot_chain();
    }
}

double predict(const QnnModel& model, std::span<const double> row) {
    StateVector state = apply_encoder(model, row);
    apply_ansatz(model, state);
    return state.sum_expectation_z();
}

double predict(const QnnModel& model, std::span<const double> row, PredictBuffer& buffer) {
    check_model(model);
    if (row.size() != static_cast<std::size_t>(model.n_attributes)) {
        throw std::invalid_argument("feature row has " + std::to_string(row.size()) +
                                    " entries, expected " + std::to_string(model.n_attributes));
    }
    RealSim sim{model.n_qubits(), &buffer.amps_, &buffer.scratch_};
    sim.encode(model, row);
    const int nq = model.n_qubits();
    const double* thetas = model.params.data();
    for (int block = 0; block < model.depth; ++block) {
        sim.ry_layer(thetas);
        thetas += nq;
        sim.cnot_chain();
    }
    return sim.sum_z();
}

double mse_cost(const QnnModel& model, const std::vector<std::vector<double>>& features,
                std::span<const double> targets, int threads) {
    check_model(model);
    if (features.empty()) throw std::invalid_argument("cost needs at least one sample");
    if (features.size() != targets.size()) {
        throw std::invalid_argument("feature and target counts differ");
    }
    const long n = static_cast<long>(features.size());
    std::vector<double> preds(features.size());
    if (threads < 1) threads = 1;
#ifdef _OPENMP
#pragma omp parallel num_threads(threads)
    {
        PredictBuffer work;
#pragma omp for schedule(static)
        for (long i = 0; i < n; ++i) {
            preds[static_cast<std::size_t>(i)] = predict(model, features[static_cast<std::size_t>(i)], work);
        }
    }
#else
    PredictBuffer work;
    for (long i = 0; i < n; ++i) {
        preds[static_cast<std::size_t>(i)] = predict(model, features[static_cast<std::size_t>(i)], work);
    }
#endif
    double sum = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const double d = preds[i] - targets[i];
        sum += d * d;
    }
    return sum / static_cast<double>(n);
}

void save_qnn_model(const QnnModel& model, const std::filesystem::path& path) {
    check_model(model);
    nlohmann::json j;
    j["n_attributes"] = model.n_attributes;
    j["width_w"] = model.width;
    j["depth_d"] = model.depth;
    j["params"] = model.params;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

QnnModel load_qnn_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    nlohmann::json j = nlohmann::json::parse(in);
    QnnModel model;
    model.n_attributes = j.at("n_attributes").get<int>();
    model.width = j.at("width_w").get<int>();
    model.depth = j.at("depth_d").get<int>();
    model.params = j.at("params").get<std::vector<double>>();
    check_model(model);
    return model;
}

}  // namespace qcreg
