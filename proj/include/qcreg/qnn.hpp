#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "qcreg/statevector.hpp"

namespace qcreg {

/// Variational circuit regressor: an arctan angle encoder, `depth` blocks of
/// per-qubit Ry rotations followed by a CNOT chain, and a summed Pauli-Z
/// readout. Each of the `n_attributes` inputs drives `width` adjacent qubits.
struct QnnModel {
    int n_attributes = 0;
    int width = 0;
    int depth = 0;
    /// Rotation angles, one per qubit per block, block-major.
    std::vector<double> params;

    int n_qubits() const { return n_attributes * width; }
};

/// Maps any finite input to an angle in (0, pi): arctan(x) + pi/2.
double encode_angle(double x);

/// Model with angles drawn uniformly from [0, 2*pi), deterministic per seed.
QnnModel build_model(int n_attributes, int width, int depth, std::uint64_t seed);

/// Encodes one feature row: Ry(encode_angle(row[k])) on each of attribute k's
/// qubits, starting from |00...0>.
StateVector apply_encoder(const QnnModel& model, std::span<const double> row);

/// Applies the variational blocks: a full Ry layer then the CNOT chain, once
/// per block.
void apply_ansatz(const QnnModel& model, StateVector& state);

/// Full circuit evaluation; the output is the sum of per-qubit Z
/// expectations, bounded by the qubit count in absolute value.
double predict(const QnnModel& model, std::span<const double> row);

/// Reusable simulation buffers for tight prediction loops. Ry and CNOT have
/// real matrices and the circuit starts from |00...0>, so the amplitudes stay
/// real; the buffer exploits that and skips the imaginary halves.
class PredictBuffer {
  public:
    PredictBuffer() = default;

  private:
    friend double predict(const QnnModel&, std::span<const double>, PredictBuffer&);
    std::vector<double> amps_, scratch_;
};

/// As above, without allocating; equals the plain overload to rounding.
double predict(const QnnModel& model, std::span<const double> row, PredictBuffer& buffer);

/// Mean squared error of predict() over a sample set. `threads` > 1 evaluates
/// rows concurrently; predictions land in per-row slots and are reduced in
/// row order, so the result is identical for any thread count.
double mse_cost(const QnnModel& model, const std::vector<std::vector<double>>& features,
                std::span<const double> targets, int threads = 1);

void save_qnn_model(const QnnModel& model, const std::filesystem::path& path);
QnnModel load_qnn_model(const std::filesystem::path& path);

}  // namespace qcreg
