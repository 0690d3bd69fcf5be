#ifndef FLUXLATTICE_SPIN_BOSON_HPP
#define FLUXLATTICE_SPIN_BOSON_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fluxlattice/errors.hpp"
#include "fluxlattice/fock.hpp"

namespace fluxlattice {

enum class CouplingParity { Longitudinal, Transverse };

// Two-level qubits and truncated resonators with sigma_z/sigma_x couplings
// g sigma (a^dag + a) and charge-type resonator-resonator couplings
// -g_c (a1^dag - a1)(a2^dag - a2).
struct SpinBosonModel {
    struct Qubit {
        std::string label;
        double delta = 0.0;
    };
    struct Resonator {
        std::string label;
        double omega = 0.0;
    };
    struct QubitCoupling {
        int qubit = 0;
        int resonator = 0;
        double g = 0.0;
        CouplingParity parity = CouplingParity::Longitudinal;
        double transverse_residual = 0.0;  // off-diagonal leak reported by reduction
    };
    struct ResonatorCoupling {
        int r1 = 0;
        int r2 = 0;
        double g_c = 0.0;
    };

    std::vector<Qubit> qubits;
    std::vector<Resonator> resonators;
    std::vector<QubitCoupling> couplings;
    std::vector<ResonatorCoupling> resonator_couplings;

    void check() const {
        for (const auto& r : resonators)
            if (r.omega <= 0.0) throw ModelError("resonator frequency must be positive");
        for (const auto& c : couplings) {
            if (c.qubit < 0 || c.qubit >= static_cast<int>(qubits.size()) ||
                c.resonator < 0 || c.resonator >= static_cast<int>(resonators.size()))
                throw ModelError("coupling references unknown mode");
        }
    }

    // convenience for the single qubit-resonator frames of the analysis ops
    const Qubit& single_qubit() const {
        if (qubits.size() != 1) throw ModelError("expected exactly one qubit");
        return qubits.front();
    }
    const Resonator& single_resonator() const {
        if (resonators.size() != 1) throw ModelError("expected exactly one resonator");
        return resonators.front();
    }
    const QubitCoupling& single_coupling() const {
        if (couplings.size() != 1) throw ModelError("expected exactly one coupling");
        return couplings.front();
    }
};

inline SpinBosonModel make_longitudinal(double delta, double omega, double g) {
    SpinBosonModel m;
    m.qubits.push_back({"q", delta});
    m.resonators.push_back({"r", omega});
    m.couplings.push_back({0, 0, g, CouplingParity::Longitudinal, 0.0});
    return m;
}

inline SpinBosonModel make_rabi(double delta, double omega, double g) {
    SpinBosonModel m = make_longitudinal(delta, omega, g);
    m.couplings.front().parity = CouplingParity::Transverse;
    return m;
}

// Dense Fock representation: qubits are dim-2 modes (index 0 = ground,
// sigma_z = diag(-1, +1)), resonators truncated to n_max levels. Mode
// order: all qubits first, then all resonators.
inline FockOperator spin_boson_fock(const SpinBosonModel& m, int n_max,
                                    const std::vector<int>& resonator_dims = {}) {
    m.check();
    FockOperator H;
    for (const auto& q : m.qubits) {
        H.mode_labels.push_back(q.label);
        H.dims.push_back(2);
    }
    for (std::size_t i = 0; i < m.resonators.size(); ++i) {
        H.mode_labels.push_back(m.resonators[i].label);
        H.dims.push_back(resonator_dims.empty() ? n_max : resonator_dims[i]);
    }
    const int nq = static_cast<int>(m.qubits.size());
    long total = 1;
    for (int d : H.dims) total *= d;
    H.matrix = Eigen::MatrixXcd::Zero(total, total);

    using fock::embed;
    using fock::lowering;
    for (int i = 0; i < nq; ++i)
        H.matrix += 0.5 * m.qubits[i].delta * embed(fock::pauli_z(), i, H.dims);
    for (std::size_t i = 0; i < m.resonators.size(); ++i) {
        const int k = nq + static_cast<int>(i);
        H.matrix += m.resonators[i].omega * embed(fock::number(H.dims[k]), k, H.dims);
    }
    for (const auto& cpl : m.couplings) {
        const int k = nq + cpl.resonator;
        const Eigen::MatrixXcd c = lowering(H.dims[k]);
        const Eigen::MatrixXcd x = c + c.adjoint();
        const Eigen::MatrixXcd pauli = cpl.parity == CouplingParity::Longitudinal
                                           ? fock::pauli_z()
                                           : fock::pauli_x();
        H.matrix += cpl.g * embed(pauli, cpl.qubit, H.dims) * embed(x, k, H.dims);
    }
    for (const auto& rc : m.resonator_couplings) {
        const int k1 = nq + rc.r1, k2 = nq + rc.r2;
        const Eigen::MatrixXcd c1 = lowering(H.dims[k1]), c2 = lowering(H.dims[k2]);
        H.matrix += -rc.g_c * embed(c1.adjoint() - c1, k1, H.dims) *
                    embed(c2.adjoint() - c2, k2, H.dims);
    }
    return H;
}

}  // namespace fluxlattice

#endif
