#ifndef FLUXLATTICE_SPECTRA_HPP
#define FLUXLATTICE_SPECTRA_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fluxlattice/errors.hpp"
#include "fluxlattice/fock.hpp"
#include "fluxlattice/quantize.hpp"
#include "fluxlattice/spin_boson.hpp"

namespace fluxlattice {

// Labeled dense spectrum. Labels are adiabatic: each level is tagged with
// the uncoupled product state it overlaps most, assigned one to one in
// descending overlap order.
struct SpectrumReport {
    struct Level {
        double energy = 0.0;
        std::vector<int> occupation;  // per mode, same order as mode_labels
        double overlap = 0.0;         // squared overlap with the assigned product state
    };
    std::vector<std::string> mode_labels;
    std::vector<int> dims;
    std::vector<Level> levels;  // ascending energy
    Eigen::MatrixXcd eigenvectors;  // columns, only the reported levels

    int find(const std::vector<int>& occupation) const {
        for (std::size_t i = 0; i < levels.size(); ++i)
            if (levels[i].occupation == occupation) return static_cast<int>(i);
        return -1;
    }
    double energy_of(const std::vector<int>& occupation) const {
        const int i = find(occupation);
        if (i < 0) throw NumericError("no level labeled with the requested occupation");
        return levels[i].energy;
    }
};

inline SpectrumReport eigensystem(const FockOperator& H, int k = -1) {
    if (!H.is_hermitian()) throw ModelError("eigensystem requires a Hermitian operator");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H.matrix);
    if (es.info() != Eigen::Success) throw NumericError("diagonalization failed");
    const int dim = H.dim();
    const int count = (k < 0 || k > dim) ? dim : k;

    SpectrumReport rep;
    rep.mode_labels = H.mode_labels;
    rep.dims = H.dims;
    rep.levels.resize(count);
    rep.eigenvectors = es.eigenvectors().leftCols(count);
    for (int i = 0; i < count; ++i) rep.levels[i].energy = es.eigenvalues()(i);

    // greedy maximum-overlap assignment of product-state labels
    struct Cand {
        double w;
        int level, basis;
    };
    std::vector<Cand> cands;
    cands.reserve(static_cast<std::size_t>(count) * dim);
    for (int i = 0; i < count; ++i)
        for (int b = 0; b < dim; ++b)
            cands.push_back({std::norm(rep.eigenvectors(b, i)), i, b});
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Cand& a, const Cand& b) { return a.w > b.w; });
    std::vector<bool> level_done(count, false), basis_used(dim, false);
    int assigned = 0;
    for (const auto& cd : cands) {
        if (assigned == count) break;
        if (level_done[cd.level] || basis_used[cd.basis]) continue;
        rep.levels[cd.level].occupation = fock::unravel(cd.basis, H.dims);
        rep.levels[cd.level].overlap = cd.w;
        level_done[cd.level] = true;
        basis_used[cd.basis] = true;
        ++assigned;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Parity classification of a coupling factor against a one-mode qubit.

struct ParityAmplitudes {
    double longitudinal = 0.0;  // (<0|f|0> - <1|f|1>)/2
    double transverse = 0.0;    // |<0|f|1>|
    std::string tag;            // "longitudinal" | "transverse" | "mixed"
};

inline std::string parity_tag(double L, double T, double mix_threshold = 1e-3) {
    const double lo = std::min(std::abs(L), T), hi = std::max(std::abs(L), T);
    if (hi == 0.0) return "mixed";
    if (lo > mix_threshold * hi) return "mixed";
    return std::abs(L) >= T ? "longitudinal" : "transverse";
}

inline ParityAmplitudes classify_coupling(const FockOperator& qubit_h,
                                          const Eigen::MatrixXcd& f_q) {
    if (qubit_h.n_modes() != 1) throw ModelError("classifier expects a one-mode qubit");
    if (!qubit_h.is_hermitian()) throw ModelError("qubit Hamiltonian is not Hermitian");
    if (qubit_h.dim() < 3) throw NumericError("qubit truncation too small to classify");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(qubit_h.matrix);
    if (es.info() != Eigen::Success) throw NumericError("qubit diagonalization failed");
    const Eigen::VectorXcd v0 = es.eigenvectors().col(0);
    const Eigen::VectorXcd v1 = es.eigenvectors().col(1);
    ParityAmplitudes out;
    out.longitudinal = 0.5 * (v0.dot(f_q * v0).real() - v1.dot(f_q * v1).real());
    out.transverse = std::abs(v0.dot(f_q * v1));
    out.tag = parity_tag(out.longitudinal, out.transverse);
    return out;
}

// Classify the qubit-resonator coupling of a reduced block model: the
// coupling factor is the first order of every shared sinusoid in the
// resonator variable, evaluated on the qubit's own spectrum.
inline ParityAmplitudes classify_block(const HamiltonianModel& h,
                                       const std::string& qubit_label = "phi_q",
                                       const std::string& resonator_label = "phi_r",
                                       int qubit_levels = 40) {
    const int q = h.index_of(qubit_label);
    const int r = h.index_of(resonator_label);
    HamiltonianModel hq;
    hq.labels = {qubit_label};
    hq.charge_form = Eigen::MatrixXd::Constant(1, 1, h.charge_form(q, q));
    hq.quad_potential = Eigen::MatrixXd::Constant(1, 1, h.quad_potential(q, q));
    for (const auto& s : h.sinusoids) {
        if (s.direction(q) == 0.0) continue;
        SinusoidTerm sq;
        sq.amplitude = s.amplitude;
        sq.offset = s.offset;
        sq.direction = Eigen::VectorXd::Constant(1, s.direction(q));
        hq.sinusoids.push_back(sq);
    }
    FockOperator Hq =
        fock_hamiltonian(hq, {{qubit_label, qubit_levels}}, false, nullptr, false);
    const ModeBasis bq = mode_basis(hq);
    const Eigen::MatrixXcd phase = fock_phase_operator(bq, {qubit_levels}, 0);
    Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(qubit_levels, qubit_levels);
    for (const auto& s : h.sinusoids) {
        if (s.direction(r) == 0.0) continue;
        const double l = s.direction(q), off = s.offset;
        f += (-s.amplitude * s.direction(r)) *
             fock::hermitian_function(l * phase,
                                      [off](double x) { return std::sin(x + off); });
    }
    return classify_coupling(Hq, f);
}

// ---------------------------------------------------------------------------
// Perturbative and exact frames of the single qubit-resonator models.

struct SchriefferWolffFrame {
    double gamma = 0.0;      // g/(delta - omega)
    double gamma_bar = 0.0;  // g/(delta + omega)
    double chi = 0.0;        // g (gamma + gamma_bar)/2
    bool perturbative = true;
};

inline SchriefferWolffFrame schrieffer_wolff_frame(const SpinBosonModel& m,
                                                   double warn_threshold = 0.3) {
    const auto& q = m.single_qubit();
    const auto& r = m.single_resonator();
    const auto& c = m.single_coupling();
    if (c.parity != CouplingParity::Transverse)
        throw ModelError("Schrieffer-Wolff frame expects a transverse coupling");
    const double detuning = q.delta - r.omega;
    if (std::abs(detuning) < 1e-12 * std::max(std::abs(q.delta), r.omega))
        throw NumericError("resonant qubit and resonator: frame diverges");
    SchriefferWolffFrame f;
    f.gamma = c.g / detuning;
    f.gamma_bar = c.g / (q.delta + r.omega);
    f.chi = 0.5 * c.g * (f.gamma + f.gamma_bar);
    f.perturbative = std::abs(f.gamma) < warn_threshold;
    return f;
}

namespace detail {

inline Eigen::MatrixXcd unitary_exp(const Eigen::MatrixXcd& hermitian_generator) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian_generator);
    if (es.info() != Eigen::Success) throw NumericError("generator diagonalization failed");
    const std::complex<double> im(0.0, 1.0);
    Eigen::VectorXcd phases =
        es.eigenvalues().unaryExpr([&](double x) { return std::exp(-im * x); });
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

struct LangFirsovFrame {
    double theta = 0.0;          // g/omega
    double energy_offset = 0.0;  // -g^2/omega
    double residual_offdiag = 0.0;
};

// Applies U = exp(-theta sigma_z (a^dag - a)) to the truncated model and
// measures how far the transformed operator is from diagonal, away from
// the truncation edge (states with photon number <= n_max/2).
inline LangFirsovFrame lang_firsov_frame(const SpinBosonModel& m, int n_max = 120) {
    m.single_qubit();
    const auto& r = m.single_resonator();
    const auto& c = m.single_coupling();
    if (c.parity != CouplingParity::Longitudinal)
        throw ModelError("Lang-Firsov frame expects a longitudinal coupling");
    LangFirsovFrame f;
    f.theta = c.g / r.omega;
    f.energy_offset = -c.g * c.g / r.omega;

    const FockOperator H = spin_boson_fock(m, n_max);
    // -theta sigma_z (a^dag - a) = -i K with Hermitian K = -theta sigma_z p,
    // where p = i(a^dag - a) and a^dag - a = -i p
    const std::complex<double> im(0.0, 1.0);
    const Eigen::MatrixXcd low = fock::lowering(n_max);
    const Eigen::MatrixXcd p = im * (low.adjoint() - low);
    const Eigen::MatrixXcd K =
        -f.theta * fock::embed(fock::pauli_z(), 0, H.dims) * fock::embed(p, 1, H.dims);
    const Eigen::MatrixXcd U = detail::unitary_exp(K);
    const Eigen::MatrixXcd Ht = U.adjoint() * H.matrix * U;

    double residual = 0.0;
    for (int i = 0; i < H.dim(); ++i) {
        const auto mi = fock::unravel(i, H.dims);
        if (mi[1] > n_max / 2) continue;
        for (int j = 0; j < H.dim(); ++j) {
            if (i == j) continue;
            const auto mj = fock::unravel(j, H.dims);
            if (mj[1] > n_max / 2) continue;
            residual = std::max(residual, std::abs(Ht(i, j)));
        }
    }
    f.residual_offdiag = residual;
    return f;
}

// Numeric dispersive shift from labeled levels. With the qubit gap
// reading delta sigma_z/2, the double difference
// E(e,1) - E(e,0) - E(g,1) + E(g,0) equals 2 g (gamma + gamma_bar) for
// the transverse model at second order, so a quarter of it matches
// g (gamma + gamma_bar)/2.
inline double dispersive_shift_numeric(const FockOperator& H, int search_levels = 24) {
    SpectrumReport rep = eigensystem(H, std::min(search_levels, H.dim()));
    if (H.n_modes() != 2) throw ModelError("dispersive extraction expects qubit + resonator");
    auto level = [&](int qs, int ph) {
        const int i = rep.find({qs, ph});
        if (i < 0)
            throw NumericError("label ambiguity: state (" + std::to_string(qs) + "," +
                               std::to_string(ph) + ") not found among the lowest levels");
        return rep.levels[i].energy;
    };
    return 0.25 * (level(1, 1) - level(1, 0) - level(0, 1) + level(0, 0));
}

// ---------------------------------------------------------------------------
// Two coupled resonators and junction asymmetry.

struct NormalModePair {
    double omega_plus = 0.0;
    double omega_minus = 0.0;
};

inline NormalModePair normal_mode_frequencies(double w1, double w2, double g_c) {
    const double s = 0.5 * (w1 * w1 + w2 * w2);
    const double d = w1 * w1 - w2 * w2;
    const double root = 0.5 * std::sqrt(d * d + 16.0 * g_c * g_c * w1 * w2);
    const double minus_sq = s - root;
    if (minus_sq <= 0.0)
        throw NumericError("coupler too strong: lower normal mode is unstable");
    return {std::sqrt(s + root), std::sqrt(minus_sq)};
}

// Splits the two-arm junction potential into its parity components:
// E_Jsum sin(phi_r/2) cos(phi_q/2) (longitudinal channel) and
// d E_Jsum cos(phi_r/2) sin(phi_q/2) (parity-breaking channel).
struct AsymmetryDecomposition {
    double E_J_sum = 0.0;
    double d = 0.0;
    double longitudinal_amplitude = 0.0;
    double transverse_amplitude = 0.0;
    bool uncoupled = false;
};

inline AsymmetryDecomposition junction_asymmetry_decompose(double e_j1, double e_j2) {
    if (e_j1 < 0.0 || e_j2 < 0.0) throw ModelError("junction energies must be >= 0");
    AsymmetryDecomposition out;
    out.E_J_sum = e_j1 + e_j2;
    if (out.E_J_sum == 0.0) {
        out.uncoupled = true;
        return out;
    }
    out.d = (e_j2 - e_j1) / out.E_J_sum;
    out.longitudinal_amplitude = out.E_J_sum;
    out.transverse_amplitude = std::abs(out.d) * out.E_J_sum;
    return out;
}

}  // namespace fluxlattice

#endif
