#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qcreg {

/// Largest supported register; 2^24 amplitudes keep a dense simulation well
/// inside ordinary memory.
inline constexpr int kMaxQubits = 24;

/// Dense state vector of an n-qubit pure state in little-endian basis order:
/// qubit 0 is the least significant bit of the basis index.
///
/// Gates update the amplitudes in place; no gate ever materializes a
/// 2^n x 2^n matrix. Supported qubit counts are 1 through kMaxQubits.
class StateVector {
  public:
    /// Prepares |00...0>.
    explicit StateVector(int n_qubits);

    /// Returns to |00...0> without reallocating.
    void reset_zero();

    int n_qubits() const { return n_qubits_; }
    std::size_t dim() const { return amps_.size(); }

    std::span<const std::complex<double>> amplitudes() const { return amps_; }
    std::complex<double> amplitude(std::size_t index) const;
    void set_amplitude(std::size_t index, std::complex<double> value);

    /// Ry(theta) = [[cos(theta/2), -sin(theta/2)],
    ///              [sin(theta/2),  cos(theta/2)]] on one qubit.
    void apply_ry(int qubit, double theta);

    /// Flips `target` wherever `control` reads 1.
    void apply_cnot(int control, int target);

    /// The chain CNOT(0,1), CNOT(1,2), ..., CNOT(n-2,n-1), applied as a single
    /// basis permutation pass. No-op on one qubit.
    void apply_cnot_chain();

    /// Pauli-Z expectation of one qubit: each basis state contributes
    /// +|amp|^2 when the qubit's bit is 0 and -|amp|^2 when it is 1.
    double expectation_z(int qubit) const;

    /// Sum of expectation_z over all qubits, computed in one pass.
    double sum_expectation_z() const;

    /// Euclidean norm of the amplitude vector; 1 up to rounding.
    double norm() const;

  private:
    void check_qubit(int qubit) const;

    int n_qubits_;
    std::vector<std::complex<double>> amps_;
    std::vector<std::complex<double>> scratch_;
};

}  // namespace qcreg
