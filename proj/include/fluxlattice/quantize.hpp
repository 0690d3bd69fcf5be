#ifndef FLUXLATTICE_QUANTIZE_HPP
#define FLUXLATTICE_QUANTIZE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <set>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fluxlattice/errors.hpp"
#include "fluxlattice/fock.hpp"
#include "fluxlattice/lagrangian.hpp"
#include "fluxlattice/netlist.hpp"
#include "fluxlattice/spin_boson.hpp"

namespace fluxlattice {

// Charge-basis form of a circuit model. Kinetic energy reads
// H_kin = 2 n^T charge_form n over the conjugate charges, so a single
// mode with charge_form entry 4 E_C reads 8 E_C n^2.
struct HamiltonianModel {
    std::vector<std::string> labels;
    Eigen::MatrixXd charge_form;
    Eigen::MatrixXd quad_potential;
    std::vector<SinusoidTerm> sinusoids;

    int dim() const { return static_cast<int>(labels.size()); }

    int index_of(const std::string& label) const {
        for (int i = 0; i < dim(); ++i)
            if (labels[i] == label) return i;
        throw ModelError("no variable labeled '" + label + "'");
    }

    // inverse-capacitance form mu with H_kin = 1/2 n^T mu n
    Eigen::MatrixXd inverse_kinetic() const { return 4.0 * charge_form; }

    Eigen::MatrixXd kinetic() const {
        Eigen::MatrixXd m = inverse_kinetic().inverse();
        return 0.5 * (m + m.transpose().eval());
    }
};

inline HamiltonianModel legendre_transform(const LagrangianModel& m) {
    Eigen::LLT<Eigen::MatrixXd> llt(m.kinetic);
    if (llt.info() != Eigen::Success)
        throw ModelError("kinetic form is not positive definite");
    HamiltonianModel h;
    h.labels = m.labels;
    h.charge_form = 0.25 * m.kinetic.inverse();
    h.charge_form = 0.5 * (h.charge_form + h.charge_form.transpose().eval());
    h.quad_potential = m.quad_potential;
    h.sinusoids = m.sinusoids;
    return h;
}

// Full reduction pipeline for a recognized topology: block variable
// change, elimination of cyclic variables if present, Legendre transform.
inline HamiltonianModel reduce_circuit(const Circuit& c) {
    LagrangianModel red = apply_linear_transform(build_lagrangian(c), standard_block_transform(c));
    std::set<std::string> cyclic;
    for (const auto& name : {"phi_cbar", "phi_aux"})
        if (std::find(red.labels.begin(), red.labels.end(), name) != red.labels.end())
            cyclic.insert(name);
    if (!cyclic.empty()) red = cholesky_eliminate(red, cyclic).first;
    return legendre_transform(red);
}

// ---------------------------------------------------------------------------
// Normal-mode basis of the quadratic part, with the curvature of every
// sinusoid at phi = 0 folded into the stiffness. Columns of U satisfy
// U^T M U = I; mode k's phase operator is phi_k = sum_i U(k,i) x_i with
// x_i = (c_i + c_i^dag)/sqrt(2 w_i), and the conjugate charge is
// n_k = sum_i (M U)(k,i) p_i with p_i = i sqrt(w_i/2)(c_i^dag - c_i).

struct ModeBasis {
    std::vector<std::string> var_labels;
    std::vector<std::string> mode_labels;
    Eigen::VectorXd omega;
    Eigen::MatrixXd U;   // variables x modes
    Eigen::MatrixXd MU;  // kinetic * U
};

inline ModeBasis mode_basis(const HamiltonianModel& h) {
    const int n = h.dim();
    const Eigen::MatrixXd M = h.kinetic();
    Eigen::MatrixXd K = h.quad_potential;
    for (const auto& s : h.sinusoids)
        K += (-s.amplitude * std::cos(s.offset)) * s.direction * s.direction.transpose();
    K = 0.5 * (K + K.transpose().eval());

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
    if (es.info() != Eigen::Success)
        throw NumericError("generalized eigenproblem failed on the quadratic forms");
    ModeBasis basis;
    basis.var_labels = h.labels;
    basis.omega.resize(n);
    for (int i = 0; i < n; ++i) {
        const double lam = es.eigenvalues()(i);
        if (lam <= 0.0)
            throw NumericError("zero or unstable mode frequency in the quadratic part");
        basis.omega(i) = std::sqrt(lam);
    }
    basis.U = es.eigenvectors();
    basis.MU = M * basis.U;

    // name each mode after its dominant variable, one to one (greedy on
    // descending participation weight)
    basis.mode_labels.assign(n, "");
    std::vector<bool> var_used(n, false), mode_used(n, false);
    for (int assigned = 0; assigned < n; ++assigned) {
        int bi = -1, bk = -1;
        double best = -1.0;
        for (int i = 0; i < n; ++i) {
            if (mode_used[i]) continue;
            for (int k = 0; k < n; ++k) {
                if (var_used[k]) continue;
                const double w = std::abs(basis.U(k, i));
                if (w > best) {
                    best = w;
                    bi = i;
                    bk = k;
                }
            }
        }
        basis.mode_labels[bi] = basis.var_labels[bk];
        mode_used[bi] = true;
        var_used[bk] = true;
    }
    return basis;
}

namespace detail {

inline bool is_qubit_label(const std::string& label) {
    return label.rfind("phi_q", 0) == 0;
}

inline int truncation_for(const std::map<std::string, int>& dims, const std::string& label) {
    auto it = dims.find(label);
    if (it != dims.end()) {
        if (it->second < 1) throw ModelError("truncation dimension must be >= 1");
        return it->second;
    }
    return is_qubit_label(label) ? 12 : 10;
}

// per-mode dimensionless position and momentum quadratures on the
// product space
inline std::vector<Eigen::MatrixXcd> mode_positions(const ModeBasis& b,
                                                    const std::vector<int>& dims) {
    std::vector<Eigen::MatrixXcd> out;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        const Eigen::MatrixXcd c = fock::lowering(dims[i]);
        out.push_back(fock::embed((c + c.adjoint()) / std::sqrt(2.0 * b.omega(i)),
                                  static_cast<int>(i), dims));
    }
    return out;
}

inline std::vector<Eigen::MatrixXcd> mode_momenta(const ModeBasis& b,
                                                  const std::vector<int>& dims) {
    const std::complex<double> im(0.0, 1.0);
    std::vector<Eigen::MatrixXcd> out;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        const Eigen::MatrixXcd c = fock::lowering(dims[i]);
        out.push_back(fock::embed(im * std::sqrt(b.omega(i) / 2.0) * (c.adjoint() - c),
                                  static_cast<int>(i), dims));
    }
    return out;
}

inline double spectral_norm(const Eigen::MatrixXcd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace detail

// Phase operator of variable k on the truncated product space of `basis`.
inline Eigen::MatrixXcd fock_phase_operator(const ModeBasis& basis,
                                            const std::vector<int>& dims, int var) {
    const auto xs = detail::mode_positions(basis, dims);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(xs[0].rows(), xs[0].cols());
    for (std::size_t i = 0; i < xs.size(); ++i) out += basis.U(var, i) * xs[i];
    return out;
}

// Conjugate charge operator of variable k.
inline Eigen::MatrixXcd fock_charge_operator(const ModeBasis& basis,
                                             const std::vector<int>& dims, int var) {
    const auto ps = detail::mode_momenta(basis, dims);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(ps[0].rows(), ps[0].cols());
    for (std::size_t i = 0; i < ps.size(); ++i) out += basis.MU(var, i) * ps[i];
    return out;
}

// Truncated Fock-space Hamiltonian. Sinusoids are inserted exactly
// through the eigendecomposition of their phase operator, minus the
// quadratic piece already absorbed into the mode frequencies. With
// linearize_coupling set, each sinusoid stays exact in the qubit modes
// but is expanded to first order in the others; the dropped remainder is
// bounded by 1/2 |a| ||theta_rest||^2 per term and accumulated into
// *linearization_residual when given.
inline FockOperator fock_hamiltonian(const HamiltonianModel& h,
                                     const std::map<std::string, int>& truncation = {},
                                     bool linearize_coupling = false,
                                     double* linearization_residual = nullptr,
                                     bool check_truncation = true) {
    const ModeBasis basis = mode_basis(h);
    const int n = h.dim();

    FockOperator H;
    H.mode_labels = basis.mode_labels;
    for (int i = 0; i < n; ++i)
        H.dims.push_back(detail::truncation_for(truncation, basis.mode_labels[i]));
    long total = 1;
    for (int d : H.dims) total *= d;
    H.matrix = Eigen::MatrixXcd::Zero(total, total);
    for (int i = 0; i < n; ++i)
        H.matrix += basis.omega(i) * fock::embed(fock::number(H.dims[i]), i, H.dims);

    const auto xs = detail::mode_positions(basis, H.dims);
    if (linearization_residual) *linearization_residual = 0.0;
    for (const auto& s : h.sinusoids) {
        const Eigen::VectorXd w = basis.U.transpose() * s.direction;  // mode components
        Eigen::MatrixXcd theta_q = Eigen::MatrixXcd::Zero(total, total);
        Eigen::MatrixXcd theta_r = Eigen::MatrixXcd::Zero(total, total);
        for (int i = 0; i < n; ++i) {
            if (detail::is_qubit_label(basis.mode_labels[i]))
                theta_q += w(i) * xs[i];
            else
                theta_r += w(i) * xs[i];
        }
        const double off = s.offset;
        if (!linearize_coupling) {
            const Eigen::MatrixXcd theta = theta_q + theta_r;
            H.matrix += s.amplitude *
                        fock::hermitian_function(theta, [off](double x) { return std::cos(x + off); });
            H.matrix += s.amplitude * std::cos(off) * 0.5 * theta * theta;
        } else {
            const Eigen::MatrixXcd cq =
                fock::hermitian_function(theta_q, [off](double x) { return std::cos(x + off); });
            const Eigen::MatrixXcd sq =
                fock::hermitian_function(theta_q, [off](double x) { return std::sin(x + off); });
            H.matrix += s.amplitude * (cq - sq * theta_r);
            H.matrix += s.amplitude * std::cos(off) * 0.5 * theta_q * theta_q;
            if (linearization_residual)
                *linearization_residual +=
                    0.5 * std::abs(s.amplitude) * std::pow(detail::spectral_norm(theta_r), 2);
        }
    }
    H.matrix = 0.5 * (H.matrix + H.matrix.adjoint().eval());
    if (!H.is_hermitian()) throw NumericError("assembled operator is not Hermitian");

    if (check_truncation) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H.matrix);
        if (es.info() != Eigen::Success) throw NumericError("diagonalization failed");
        const Eigen::VectorXcd gs = es.eigenvectors().col(0);
        std::vector<double> top_pop(n, 0.0);
        for (int idx = 0; idx < total; ++idx) {
            const auto multi = fock::unravel(idx, H.dims);
            const double p = std::norm(gs(idx));
            for (int i = 0; i < n; ++i)
                if (H.dims[i] > 1 && multi[i] == H.dims[i] - 1) top_pop[i] += p;
        }
        for (int i = 0; i < n; ++i)
            if (top_pop[i] > 1e-6)
                throw NumericError("truncation too small for mode " + basis.mode_labels[i]);
    }
    return H;
}

// ---------------------------------------------------------------------------
// Two-level reduction. Works in the bare variables of a reduced block
// model: each phi_q* variable must be kinetically and potentially
// decoupled from everything else (couplings live in the sinusoids), each
// phi_r* variable is treated as a harmonic mode. Every sinusoid is split
// as a cos(l phi_q + off + d_r phi_r) = a cos(l phi_q + off) cos(d_r phi_r)
// - a sin(l phi_q + off) sin(d_r phi_r); the zeroth order in phi_r feeds
// the qubit's own spectrum, the first order gives the coupling operator
// whose two-level matrix elements are reported as longitudinal amplitude
// L = (<1|F|1> - <0|F|0>)/2 (the sigma_z coefficient) and transverse leak
// T = |<0|F|1>|.

struct TwoLevelReduction {
    SpinBosonModel model;
    std::vector<double> anharmonicity;       // per qubit, E2 - 2 E1 + E0
    std::vector<double> mean_displacement;   // per coupling, static force / omega
    double max_transverse_residual = 0.0;
};

inline TwoLevelReduction two_level_reduce(const HamiltonianModel& h,
                                          double gate_factor = 10.0,
                                          int qubit_levels = 40) {
    const int n = h.dim();
    const Eigen::MatrixXd mu = h.inverse_kinetic();
    const Eigen::MatrixXd& K = h.quad_potential;

    std::vector<int> qvars, rvars;
    for (int i = 0; i < n; ++i) {
        if (detail::is_qubit_label(h.labels[i]))
            qvars.push_back(i);
        else if (h.labels[i].rfind("phi_r", 0) == 0)
            rvars.push_back(i);
        else
            throw ModelError("two_level_reduce: unsupported variable " + h.labels[i]);
    }
    if (qvars.empty()) throw ModelError("two_level_reduce: no qubit variable");

    for (int q : qvars)
        for (int j = 0; j < n; ++j) {
            if (j == q) continue;
            const double scale = std::sqrt(std::abs(mu(q, q) * mu(j, j)));
            if (std::abs(mu(q, j)) > 1e-9 * scale)
                throw ModelError("qubit variable " + h.labels[q] + " is kinetically coupled");
            if (std::abs(K(q, j)) > 1e-9 * std::max(1.0, K.cwiseAbs().maxCoeff()))
                throw ModelError("qubit variable " + h.labels[q] + " is potentially coupled");
        }

    TwoLevelReduction out;
    SpinBosonModel& m = out.model;

    // resonator frequencies and zero-point scales from the per-variable
    // diagonal coefficients (cross terms become explicit couplings)
    std::vector<double> r_zpf(rvars.size()), n_zpf(rvars.size());
    for (std::size_t a = 0; a < rvars.size(); ++a) {
        const int r = rvars[a];
        double kappa = K(r, r);
        for (const auto& s : h.sinusoids)
            kappa += (-s.amplitude * std::cos(s.offset)) * s.direction(r) * s.direction(r);
        if (kappa <= 0.0 || mu(r, r) <= 0.0)
            throw ModelError("resonator variable " + h.labels[r] + " is not an oscillator");
        const double omega = std::sqrt(mu(r, r) * kappa);
        m.resonators.push_back({h.labels[r], omega});
        r_zpf[a] = std::sqrt(mu(r, r) / (2.0 * omega));
        n_zpf[a] = std::sqrt(omega / (2.0 * mu(r, r)));
        for (std::size_t b2 = 0; b2 < a; ++b2) {
            const int r2 = rvars[b2];
            if (std::abs(K(r, r2)) > 1e-9 * std::max(1.0, K.cwiseAbs().maxCoeff()))
                throw ModelError("potential coupling between resonators is not supported");
            const double cross = mu(r, r2);
            if (std::abs(cross) > 1e-12 * std::sqrt(mu(r, r) * mu(r2, r2)))
                m.resonator_couplings.push_back(
                    {static_cast<int>(b2), static_cast<int>(a), cross * n_zpf[a] * n_zpf[b2]});
        }
    }

    // per-qubit anharmonic spectrum from its one-variable Hamiltonian
    std::vector<Eigen::VectorXcd> q_ground(qvars.size()), q_excited(qvars.size());
    std::vector<Eigen::MatrixXcd> q_phase(qvars.size());
    for (std::size_t a = 0; a < qvars.size(); ++a) {
        const int q = qvars[a];
        HamiltonianModel hq;
        hq.labels = {h.labels[q]};
        hq.charge_form = Eigen::MatrixXd::Constant(1, 1, 0.25 * mu(q, q));
        hq.quad_potential = Eigen::MatrixXd::Constant(1, 1, K(q, q));
        for (const auto& s : h.sinusoids) {
            if (s.direction(q) == 0.0) continue;
            for (int q2 : qvars)
                if (q2 != q && s.direction(q2) != 0.0)
                    throw ModelError("sinusoid couples two qubit variables");
            SinusoidTerm sq;
            sq.amplitude = s.amplitude;
            sq.offset = s.offset;
            sq.direction = Eigen::VectorXd::Constant(1, s.direction(q));
            hq.sinusoids.push_back(sq);
        }
        FockOperator Hq = fock_hamiltonian(hq, {{h.labels[q], qubit_levels}}, false,
                                           nullptr, false);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Hq.matrix);
        if (es.info() != Eigen::Success) throw NumericError("qubit diagonalization failed");
        const double E0 = es.eigenvalues()(0), E1 = es.eigenvalues()(1), E2 = es.eigenvalues()(2);
        m.qubits.push_back({h.labels[q], E1 - E0});
        out.anharmonicity.push_back(E2 - 2.0 * E1 + E0);
        q_ground[a] = es.eigenvectors().col(0);
        q_excited[a] = es.eigenvectors().col(1);
        const ModeBasis bq = mode_basis(hq);
        q_phase[a] = fock_phase_operator(bq, {qubit_levels}, 0);
    }

    // couplings: first order of each sinusoid in one resonator variable
    double max_coupling = 0.0;
    for (std::size_t a = 0; a < qvars.size(); ++a) {
        const int q = qvars[a];
        for (std::size_t b2 = 0; b2 < rvars.size(); ++b2) {
            const int r = rvars[b2];
            Eigen::MatrixXcd F =
                Eigen::MatrixXcd::Zero(q_phase[a].rows(), q_phase[a].cols());
            bool any = false;
            for (const auto& s : h.sinusoids) {
                if (s.direction(r) == 0.0 || s.direction(q) == 0.0) continue;
                any = true;
                const double l = s.direction(q), off = s.offset;
                F += (-s.amplitude * s.direction(r)) *
                     fock::hermitian_function(l * q_phase[a],
                                              [off](double x) { return std::sin(x + off); });
            }
            if (!any) continue;
            const std::complex<double> F00 = q_ground[a].dot(F * q_ground[a]);
            const std::complex<double> F11 = q_excited[a].dot(F * q_excited[a]);
            const std::complex<double> F01 = q_ground[a].dot(F * q_excited[a]);
            // sigma_z = diag(-1, +1) over (ground, excited), so the
            // sigma_z coefficient of F is (F11 - F00)/2
            const double L = 0.5 * (F11.real() - F00.real()) * r_zpf[b2];
            const double T = std::abs(F01) * r_zpf[b2];
            const double mean = 0.5 * (F00.real() + F11.real()) * r_zpf[b2];
            const double omega = m.resonators[b2].omega;

            SpinBosonModel::QubitCoupling cpl;
            cpl.qubit = static_cast<int>(a);
            cpl.resonator = static_cast<int>(b2);
            if (std::abs(L) >= T) {
                cpl.g = L;
                cpl.parity = CouplingParity::Longitudinal;
                cpl.transverse_residual = T;
            } else {
                cpl.g = T;
                cpl.parity = CouplingParity::Transverse;
                cpl.transverse_residual = std::abs(L);
            }
            m.couplings.push_back(cpl);
            out.mean_displacement.push_back(mean / omega);
            out.max_transverse_residual = std::max(out.max_transverse_residual, cpl.transverse_residual);
            max_coupling = std::max(max_coupling, std::max(std::abs(L), T));
            // the static part of the force displaces the resonator, which
            // feeds back on the qubit gap through the coupling
            if (cpl.parity == CouplingParity::Longitudinal)
                m.qubits[a].delta += -4.0 * mean * L / omega;
        }
    }

    for (std::size_t a = 0; a < qvars.size(); ++a)
        if (std::abs(out.anharmonicity[a]) <
            std::max(gate_factor * max_coupling, 1e-9 * m.qubits[a].delta))
            throw NumericError("two-level approximation invalid: anharmonicity of " +
                               h.labels[qvars[a]] + " is below " +
                               std::to_string(gate_factor) + "x the coupling");
    return out;
}

// ---------------------------------------------------------------------------
// Closed-form block parameters, evaluated from the element values of the
// builtin topologies. All outputs are in canonical units (rad/s).

struct DerivedParameters {
    struct QubitParams {
        std::string label;
        double E_C = 0.0;
        double E_J = 0.0;
        double E_J_star = 0.0;
        double gap = 0.0;           // 4 sqrt(E_J* E_C)
        double anharmonicity = 0.0; // -2 E_C E_J / E_J*
    };
    struct ResonatorParams {
        std::string label;
        double omega = 0.0;
        double mu = 0.0;     // inverse-capacitance coefficient
        double r_zpf = 0.0;
        double n_zpf = 0.0;
    };
    struct PairCoupling {
        std::string qubit;
        std::string resonator;
        double g1 = 0.0;
    };
    struct ConnectionCoupling {
        std::string r1;
        std::string r2;
        double g_c = 0.0;
    };
    std::vector<QubitParams> qubits;
    std::vector<ResonatorParams> resonators;
    std::vector<PairCoupling> pair_couplings;
    std::vector<ConnectionCoupling> connection_couplings;
};

namespace detail {

inline const Branch* find_branch(const Circuit& c, BranchKind kind, const std::string& a,
                                 const std::string& b) {
    for (const auto& br : c.branches) {
        if (br.kind != kind && !(kind == BranchKind::Junction &&
                                 br.kind == BranchKind::JunctionArray))
            continue;
        if ((br.node_a == a && br.node_b == b) || (br.node_a == b && br.node_b == a))
            return &br;
    }
    return nullptr;
}

inline double branch_value(const Circuit& c, BranchKind kind, const std::string& a,
                           const std::string& b) {
    const Branch* br = find_branch(c, kind, a, b);
    if (!br) throw ModelError("missing " + kind_to_string(kind) + " branch " + a + "-" + b);
    return br->value;
}

// qubit matrix element of the coupling operator in the slightly
// anharmonic well: <0|cos(l phi)|0> - <1|cos(l phi)|1>)/2 with the first
// anharmonic correction in eta = delta/gap
inline double coupling_lambda(double sigma, double eta) {
    return std::exp(-0.5 * sigma) *
           (0.5 * sigma + eta * (-sigma + 0.5 * sigma * sigma - sigma * sigma * sigma / 48.0));
}

inline DerivedParameters::QubitParams qubit_closed_forms(const std::string& label,
                                                         double m_qq, double kappa_lin,
                                                         double e_jq) {
    DerivedParameters::QubitParams q;
    q.label = label;
    q.E_C = 1.0 / (16.0 * m_qq);
    q.E_J = e_jq;
    q.E_J_star = e_jq + kappa_lin;
    q.gap = 4.0 * std::sqrt(q.E_J_star * q.E_C);
    q.anharmonicity = q.E_J_star > 0.0 ? -2.0 * q.E_C * q.E_J / q.E_J_star : 0.0;
    return q;
}

inline DerivedParameters::ResonatorParams resonator_closed_forms(const std::string& label,
                                                                 double mu, double kappa) {
    DerivedParameters::ResonatorParams r;
    r.label = label;
    r.mu = mu;
    r.omega = std::sqrt(mu * kappa);
    r.r_zpf = std::sqrt(mu / (2.0 * r.omega));
    r.n_zpf = std::sqrt(r.omega / (2.0 * mu));
    return r;
}

// g1 for one flux-biased arm pair: the first order of the arm potential
// in phi_r couples -(E_J/k) sin(chi) cos(phi_q/(2k)) to phi_r
inline double pair_g1(const DerivedParameters::QubitParams& q, double m_qq,
                      double e_j, int k, double chi, double r_zpf) {
    const double phi_zpf_sq = (1.0 / m_qq) / (2.0 * q.gap);
    const double lambda = 1.0 / (2.0 * k);
    const double sigma = lambda * lambda * phi_zpf_sq;
    const double eta = q.gap > 0.0 ? q.anharmonicity / q.gap : 0.0;
    return (e_j / k) * std::sin(chi) * coupling_lambda(sigma, eta) * r_zpf;
}

// reduced resonator kinetic 2x2 of one capacitive connection: arm
// capacitances c1, c2 on the two sides, per-node ground capacitance cg,
// stray capacitance cs on the shared node (all canonical coefficients)
inline Eigen::Matrix2d connection_kinetic(double c1, double c2, double cg, double cs) {
    Eigen::Matrix2d m;
    const double pool = 4.0 * cg + cs;
    const double diag_extra = pool > 0.0 ? cg * (2.0 * cg + cs) / (2.0 * pool) : 0.0;
    const double off = pool > 0.0 ? -cg * cg / pool : 0.0;
    m << 0.5 * c1 + diag_extra, off, off, 0.5 * c2 + diag_extra;
    return m;
}

}  // namespace detail

inline DerivedParameters derived_parameters(const Circuit& c) {
    using detail::branch_value;
    using detail::find_branch;
    DerivedParameters out;

    auto arm = [&](const std::string& top, const std::string& mid) {
        struct Arm {
            double cap, ind, ej, chi;
            int k;
        } a{};
        a.cap = branch_value(c, BranchKind::Capacitor, top, mid);
        a.ind = branch_value(c, BranchKind::Inductor, top, mid);
        const Branch* jj = find_branch(c, BranchKind::Junction, top, mid);
        if (!jj) throw ModelError("missing junction branch " + top + "-" + mid);
        a.ej = jj->value;
        a.k = jj->array_length;
        a.chi = jj->phase_offset * a.k;  // total bias across the arm
        return a;
    };

    if (c.name == "qubit_resonator" || c.name == "junction_array_coupler" ||
        c.name == "qubit_n_resonators") {
        const double c_q = branch_value(c, BranchKind::Capacitor, "a", "b");
        const double e_jq = branch_value(c, BranchKind::Junction, "a", "b");
        std::vector<std::string> mids;
        for (const auto& node : c.nodes)
            if (node != "a" && node != "b") mids.push_back(node);
        double m_qq = c_q, kappa_lin = 0.0;
        std::vector<decltype(arm("", ""))> arms;
        for (const auto& mid : mids) {
            arms.push_back(arm("a", mid));
            m_qq += 0.5 * arms.back().cap;
            kappa_lin += 0.5 * arms.back().ind;
        }
        auto q = detail::qubit_closed_forms("phi_q", m_qq, kappa_lin, e_jq);
        out.qubits.push_back(q);
        for (std::size_t j = 0; j < mids.size(); ++j) {
            const auto& a = arms[j];
            const std::string rl = mids.size() == 1 ? "phi_r" : "phi_r" + std::to_string(j + 1);
            auto r = detail::resonator_closed_forms(rl, 2.0 / a.cap, 0.5 * a.ind);
            out.resonators.push_back(r);
            out.pair_couplings.push_back(
                {"phi_q", rl, detail::pair_g1(q, m_qq, a.ej, a.k, a.chi, r.r_zpf)});
        }
        return out;
    }

    if (c.name == "two_blocks") {
        const Branch* stray = find_branch(c, BranchKind::Capacitor, "c", "g");
        const double cs = stray ? stray->value : 0.0;
        const double cg = branch_value(c, BranchKind::Capacitor, "a1", "g");
        double arm_cap[2], arm_ind[2];
        DerivedParameters::QubitParams qp[2];
        decltype(arm("", "")) arms[2] = {arm("a1", "c"), arm("a2", "c")};
        double m_qq_store[2];
        for (int i = 0; i < 2; ++i) {
            const std::string si = std::to_string(i + 1);
            const double c_q = branch_value(c, BranchKind::Capacitor, "a" + si, "b" + si);
            const double e_jq = branch_value(c, BranchKind::Junction, "a" + si, "b" + si);
            arm_cap[i] = arms[i].cap;
            arm_ind[i] = arms[i].ind;
            m_qq_store[i] = c_q + arms[i].cap + 0.5 * cg;
            qp[i] = detail::qubit_closed_forms("phi_q" + si, m_qq_store[i],
                                               0.5 * arms[i].ind, e_jq);
            out.qubits.push_back(qp[i]);
        }
        const Eigen::Matrix2d m_r =
            detail::connection_kinetic(arm_cap[0], arm_cap[1], cg, cs);
        const Eigen::Matrix2d mu_r = m_r.inverse();
        DerivedParameters::ResonatorParams rp[2];
        for (int i = 0; i < 2; ++i) {
            const std::string rl = "phi_r" + std::to_string(i + 1);
            rp[i] = detail::resonator_closed_forms(rl, mu_r(i, i), 0.5 * arm_ind[i]);
            out.resonators.push_back(rp[i]);
            out.pair_couplings.push_back(
                {qp[i].label, rl,
                 detail::pair_g1(qp[i], m_qq_store[i], arms[i].ej, arms[i].k, arms[i].chi,
                                 rp[i].r_zpf)});
        }
        out.connection_couplings.push_back(
            {rp[0].label, rp[1].label, mu_r(0, 1) * rp[0].n_zpf * rp[1].n_zpf});
        return out;
    }

    if (c.name == "plaquette") {
        // connection j joins blocks j and j%4+1; each block touches two
        // connections, its qubit mass and stiffness sum over both arms and
        // over the ground capacitances its nodes carry
        auto prev_conn = [](int i) { return i == 1 ? 4 : i - 1; };
        auto ground_cap_on = [&](const std::string& node) {
            double total = 0.0;
            for (const auto& br : c.branches)
                if (br.kind == BranchKind::Capacitor &&
                    ((br.node_a == node && br.node_b == "g") ||
                     (br.node_b == node && br.node_a == "g")))
                    total += br.value;
            return total;
        };
        std::vector<DerivedParameters::QubitParams> qp(5);
        std::vector<double> m_qq_store(5, 0.0);
        for (int i = 1; i <= 4; ++i) {
            const std::string si = std::to_string(i);
            const double c_q = branch_value(c, BranchKind::Capacitor, "a" + si, "b" + si);
            const double e_jq = branch_value(c, BranchKind::Junction, "a" + si, "b" + si);
            double m_qq = c_q + 0.5 * ground_cap_on("a" + si);
            double kappa_lin = 0.0;
            for (int j : {prev_conn(i), i}) {
                const auto a = arm("a" + si, "c" + std::to_string(j));
                m_qq += 0.5 * a.cap;
                kappa_lin += 0.5 * a.ind;
            }
            qp[i] = detail::qubit_closed_forms("phi_q" + si, m_qq, kappa_lin, e_jq);
            m_qq_store[i] = m_qq;
        }
        for (int i = 1; i <= 4; ++i) out.qubits.push_back(qp[i]);

        for (int j = 1; j <= 4; ++j) {
            const std::string sj = std::to_string(j);
            const int i1 = j, i2 = (j % 4) + 1;
            const auto a1 = arm("a" + std::to_string(i1), "c" + sj);
            const auto a2 = arm("a" + std::to_string(i2), "c" + sj);
            // per-connection closed forms see half the ground capacitance
            // of each adjacent node (each node serves two connections)
            const double cg = 0.25 * (ground_cap_on("a" + std::to_string(i1)) +
                                      ground_cap_on("a" + std::to_string(i2)));
            const Eigen::Matrix2d m_r = detail::connection_kinetic(a1.cap, a2.cap, cg, 0.0);
            const Eigen::Matrix2d mu_r = m_r.inverse();
            const std::string rl1 = "phi_r" + std::to_string(i1) + "_" + sj;
            const std::string rl2 = "phi_r" + std::to_string(i2) + "_" + sj;
            auto r1 = detail::resonator_closed_forms(rl1, mu_r(0, 0), 0.5 * a1.ind);
            auto r2 = detail::resonator_closed_forms(rl2, mu_r(1, 1), 0.5 * a2.ind);
            out.resonators.push_back(r1);
            out.resonators.push_back(r2);
            out.pair_couplings.push_back(
                {qp[i1].label, rl1,
                 detail::pair_g1(qp[i1], m_qq_store[i1], a1.ej, a1.k, a1.chi, r1.r_zpf)});
            out.pair_couplings.push_back(
                {qp[i2].label, rl2,
                 detail::pair_g1(qp[i2], m_qq_store[i2], a2.ej, a2.k, a2.chi, r2.r_zpf)});
            out.connection_couplings.push_back(
                {rl1, rl2, mu_r(0, 1) * r1.n_zpf * r2.n_zpf});
        }
        return out;
    }

    throw ModelError("no closed-form parameters for circuit '" + c.name + "'");
}

}  // namespace fluxlattice

#endif
