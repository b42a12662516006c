#include "qcreg/statevector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qcreg {

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw std::invalid_argument("qubit count must be between 1 and " +
                                    std::to_string(kMaxQubits) + ", got " +
                                    std::to_string(n_qubits));
    }
    amps_.assign(std::size_t{1} << n_qubits, {0.0, 0.0});
    amps_[0] = {1.0, 0.0};
}

void StateVector::reset_zero() {
    std::fill(amps_.begin(), amps_.end(), std::complex<double>{0.0, 0.0});
    amps_[0] = {1.0, 0.0};
}

std::complex<double> StateVector::amplitude(std::size_t index) const {
    if (index >= amps_.size()) throw std::out_of_range("amplitude index out of range");
    return amps_[index];
}

void StateVector::set_amplitude(std::size_t index, std::complex<double> value) {
    if (index >= amps_.size()) throw std::out_of_range("amplitude index out of range");
    amps_[index] = value;
}

void StateVector::check_qubit(int qubit) const {
    if (qubit < 0 || qubit >= n_qubits_) {
        throw std::out_of_range("qubit " + std::to_string(qubit) +
                                " out of range for " + std::to_string(n_qubits_) +
                                " qubits");
    }
}

void StateVector::apply_ry(int qubit, double theta) {
    check_qubit(qubit);
    if (!std::isfinite(theta)) throw std::invalid_argument("non-finite rotation angle");
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    const std::size_t step = std::size_t{1} << qubit;
    const std::size_t dim = amps_.size();
    for (std::size_t base = 0; base < dim; base += 2 * step) {
        for (std::size_t i = base; i < base + step; ++i) {
            const std::complex<double> a0 = amps_[i];
            const std::complex<double> a1 = amps_[i + step];
            amps_[i] = c * a0 - s * a1;
            amps_[i + step] = s * a0 + c * a1;
        }
    }
}

void StateVector::apply_cnot(int control, int target) {
    check_qubit(control);
    check_qubit(target);
    if (control == target) throw std::invalid_argument("cnot control equals target");
    const std::size_t cmask = std::size_t{1} << control;
    const std::size_t tmask = std::size_t{1} << target;
    const std::size_t dim = amps_.size();
    for (std::size_t i = 0; i < dim; ++i) {
        if ((i & cmask) && !(i & tmask)) {
            std::swap(amps_[i], amps_[i | tmask]);
        }
    }
}

void StateVector::apply_cnot_chain() {
    if (n_qubits_ == 1) return;
    // The chain maps basis bit k to the parity of bits 0..k, so amplitude j of
    // the result comes from source index j ^ (j << 1) masked to n bits.
    const std::size_t dim = amps_.size();
    const std::size_t mask = dim - 1;
    scratch_.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        scratch_[j] = amps_[(j ^ (j << 1)) & mask];
    }
    amps_.swap(scratch_);
}

double StateVector::expectation_z(int qubit) const {
    check_qubit(qubit);
    const std::size_t qmask = std::size_t{1} << qubit;
    const std::size_t dim = amps_.size();
    double value = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double p = std::norm(amps_[i]);
        value += (i & qmask) ? -p : p;
    }
    return value;
}

double StateVector::sum_expectation_z() const {
    // Basis state i contributes (n - 2 * popcount(i)) * |amp|^2: +1 per zero
    // bit and -1 per one bit, summed over qubits.
    const std::size_t dim = amps_.size();
    double value = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        value += static_cast<double>(n_qubits_ - 2 * std::popcount(i)) * std::norm(amps_[i]);
    }
    return value;
}

double StateVector::norm() const {
    double sum = 0.0;
    for (const auto& a : amps_) sum += std::norm(a);
    return std::sqrt(sum);
}

}  // namespace qcreg
