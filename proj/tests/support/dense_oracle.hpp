#pragma once

// Brute-force reference simulator used only by tests. Gates are built as full
// 2^n x 2^n matrices through Kronecker products and applied by dense
// matrix-vector multiplication, so it shares no code path with StateVector.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace oracle {

using Cx = std::complex<double>;
using Matrix = std::vector<std::vector<Cx>>;
using Vector = std::vector<Cx>;

inline Matrix identity(std::size_t n) {
    Matrix m(n, std::vector<Cx>(n, Cx{0.0, 0.0}));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = Cx{1.0, 0.0};
    return m;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    const std::size_t ar = a.size(), ac = a[0].size();
    const std::size_t br = b.size(), bc = b[0].size();
    Matrix m(ar * br, std::vector<Cx>(ac * bc, Cx{0.0, 0.0}));
    for (std::size_t i = 0; i < ar; ++i)
        for (std::size_t j = 0; j < ac; ++j)
            for (std::size_t k = 0; k < br; ++k)
                for (std::size_t l = 0; l < bc; ++l)
                    m[i * br + k][j * bc + l] = a[i][j] * b[k][l];
    return m;
}

inline Matrix ry_2x2(double theta) {
    const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
    return {{Cx{c, 0.0}, Cx{-s, 0.0}}, {Cx{s, 0.0}, Cx{c, 0.0}}};
}

// Little-endian: qubit 0 is the least significant index bit, so the one-qubit
// gate sits between an identity on the high qubits and one on the low qubits.
inline Matrix ry_full(int n_qubits, int qubit, double theta) {
    const auto high = identity(std::size_t{1} << (n_qubits - 1 - qubit));
    const auto low = identity(std::size_t{1} << qubit);
    return kron(kron(high, ry_2x2(theta)), low);
}

inline Matrix cnot_full(int n_qubits, int control, int target) {
    const std::size_t dim = std::size_t{1} << n_qubits;
    const std::size_t cmask = std::size_t{1} << control;
    const std::size_t tmask = std::size_t{1} << target;
    Matrix m(dim, std::vector<Cx>(dim, Cx{0.0, 0.0}));
    for (std::size_t i = 0; i < dim; ++i) {
        const std::size_t j = (i & cmask) ? (i ^ tmask) : i;
        m[j][i] = Cx{1.0, 0.0};
    }
    return m;
}

inline Vector matvec(const Matrix& m, const Vector& v) {
    Vector out(m.size(), Cx{0.0, 0.0});
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j)
            out[i] += m[i][j] * v[j];
    return out;
}

inline Vector zero_state(int n_qubits) {
    Vector v(std::size_t{1} << n_qubits, Cx{0.0, 0.0});
    v[0] = Cx{1.0, 0.0};
    return v;
}

inline double expectation_z(const Vector& v, int qubit) {
    const std::size_t qmask = std::size_t{1} << qubit;
    double e = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        e += ((i & qmask) ? -1.0 : 1.0) * std::norm(v[i]);
    return e;
}

}  // namespace oracle
