#ifndef FLUXLATTICE_DYNAMICS_HPP
#define FLUXLATTICE_DYNAMICS_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fluxlattice/errors.hpp"
#include "fluxlattice/fock.hpp"
#include "fluxlattice/propagate.hpp"
#include "fluxlattice/quantize.hpp"
#include "fluxlattice/spectra.hpp"
#include "fluxlattice/spin_boson.hpp"

namespace fluxlattice {

enum class DriveKind { Voltage, Flux };
enum class DriveEnvelope { Constant, CosineRamp };

struct DriveSpec {
    std::string target_qubit = "q";
    double amplitude = 0.0;  // angular frequency units
    double frequency = 0.0;
    double phase = 0.0;
    DriveEnvelope envelope = DriveEnvelope::Constant;
    double ramp_time = 0.0;  // cosine-ramp rise time
    double duration = 0.0;
    DriveKind kind = DriveKind::Voltage;

    void check() const {
        if (amplitude < 0.0) throw ModelError("drive amplitude must be >= 0");
        if (duration <= 0.0) throw ModelError("drive duration must be > 0");
    }

    double envelope_value(double t) const {
        if (envelope == DriveEnvelope::Constant || ramp_time <= 0.0) return 1.0;
        if (t >= ramp_time) return 1.0;
        const double s = std::sin(0.5 * std::numbers::pi * t / ramp_time);
        return s * s;
    }
    double value(double t) const {
        return amplitude * std::cos(frequency * t + phase) * envelope_value(t);
    }
};

// Two-level projection of a physical drive on a block's qubit variable: a
// voltage drive couples through the conjugate charge, a flux drive
// through sin(phi_q). Both are odd in phi_q, so for a symmetric qubit the
// diagonal (sigma_z-like) part vanishes.
struct DriveProjection {
    double sigma_x_amplitude = 0.0;
    double longitudinal_residual = 0.0;
};

inline DriveProjection drive_projection(const HamiltonianModel& h,
                                        const std::string& qubit_label, DriveKind kind,
                                        int qubit_levels = 40) {
    const int q = h.index_of(qubit_label);
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
    const FockOperator Hq =
        fock_hamiltonian(hq, {{qubit_label, qubit_levels}}, false, nullptr, false);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Hq.matrix);
    if (es.info() != Eigen::Success) throw NumericError("qubit diagonalization failed");
    const ModeBasis bq = mode_basis(hq);
    Eigen::MatrixXcd op;
    if (kind == DriveKind::Voltage) {
        op = fock_charge_operator(bq, {qubit_levels}, 0);
    } else {
        const Eigen::MatrixXcd phase = fock_phase_operator(bq, {qubit_levels}, 0);
        op = fock::hermitian_function(phase, [](double x) { return std::sin(x); });
    }
    const Eigen::VectorXcd v0 = es.eigenvectors().col(0), v1 = es.eigenvectors().col(1);
    DriveProjection out;
    out.sigma_x_amplitude = std::abs(v0.dot(op * v1));
    out.longitudinal_residual = 0.5 * std::abs(v1.dot(op * v1) - v0.dot(op * v0));
    return out;
}

struct Trajectory {
    std::vector<double> times;
    Eigen::MatrixXd sigma_z;  // qubits x samples
    Eigen::MatrixXd photons;  // resonators x samples
    double norm_drift = 0.0;
    double energy_drift = 0.0;  // relative, meaningful without drive
};

namespace detail {

inline Eigen::VectorXcd basis_state(const std::vector<int>& dims,
                                    const std::vector<int>& occupation) {
    long total = 1;
    for (int d : dims) total *= d;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(total);
    psi(fock::ravel(occupation, dims)) = 1.0;
    return psi;
}

inline void record_expectations(const Eigen::VectorXcd& psi, const std::vector<int>& dims,
                                int n_q, Trajectory& traj, int col) {
    const Eigen::MatrixXcd sz = fock::pauli_z();
    for (int i = 0; i < n_q; ++i) traj.sigma_z(i, col) = expect_one_mode(psi, dims, i, sz);
    for (std::size_t i = n_q; i < dims.size(); ++i)
        traj.photons(static_cast<int>(i) - n_q, col) =
            expect_one_mode(psi, dims, static_cast<int>(i), fock::number(dims[i]));
}

}  // namespace detail

// Dense driven propagation: Strang splitting of exp(-i dt (H0 + f(t) X))
// with the exact exp(-i dt H0) precomputed once and the sigma_x drive
// rotation in closed form; unitary per step by construction.
inline Trajectory evolve(const FockOperator& H0, const SpinBosonModel& m,
                         const DriveSpec& spec, const Eigen::VectorXcd& psi0, double dt,
                         int record_stride = 1, bool enforce_dt_bound = true) {
    spec.check();
    if (!H0.is_hermitian()) throw ModelError("evolve requires a Hermitian Hamiltonian");
    if (std::abs(psi0.norm() - 1.0) > 1e-10)
        throw ModelError("initial state is not normalized");
    int target = -1;
    for (std::size_t i = 0; i < m.qubits.size(); ++i)
        if (m.qubits[i].label == spec.target_qubit) target = static_cast<int>(i);
    if (target < 0) throw ModelError("unknown target qubit '" + spec.target_qubit + "'");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H0.matrix);
    if (es.info() != Eigen::Success) throw NumericError("diagonalization failed");
    const double lam_max = es.eigenvalues().cwiseAbs().maxCoeff();
    if (enforce_dt_bound && dt * lam_max > 0.05)
        throw NumericError("dt too coarse: dt * max|eigenvalue| = " +
                           std::to_string(dt * lam_max) + " > 0.05");
    const std::complex<double> im(0.0, 1.0);
    Eigen::VectorXcd ph =
        es.eigenvalues().unaryExpr([&](double x) { return std::exp(-im * x * dt); });
    const Eigen::MatrixXcd U0 =
        es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();

    const int n_q = static_cast<int>(m.qubits.size());
    const int n_r = static_cast<int>(m.resonators.size());
    const int n_steps = static_cast<int>(std::ceil(spec.duration / dt));
    const int n_rec = n_steps / record_stride + 1;

    Trajectory traj;
    traj.times.resize(n_rec);
    traj.sigma_z.resize(n_q, n_rec);
    traj.photons.resize(n_r, n_rec);

    Eigen::VectorXcd psi = psi0;
    const double E0 = psi.dot(H0.matrix * psi).real();
    const double E_scale = std::max(std::abs(E0), lam_max);
    detail::record_expectations(psi, H0.dims, n_q, traj, 0);
    traj.times[0] = 0.0;

    auto drive_gate = [&](double a) {
        Eigen::MatrixXcd g(2, 2);
        g << std::cos(a), -im * std::sin(a), -im * std::sin(a), std::cos(a);
        return g;
    };

    int col = 1;
    for (int step = 0; step < n_steps; ++step) {
        const double tm = (step + 0.5) * dt;
        const double f = spec.value(tm);
        if (f != 0.0) gates::apply_one_mode_gate(psi, H0.dims, target, drive_gate(0.5 * f * dt));
        psi = U0 * psi;
        if (f != 0.0) gates::apply_one_mode_gate(psi, H0.dims, target, drive_gate(0.5 * f * dt));
        if ((step + 1) % record_stride == 0 && col < n_rec) {
            traj.times[col] = (step + 1) * dt;
            detail::record_expectations(psi, H0.dims, n_q, traj, col);
            traj.norm_drift = std::max(traj.norm_drift, std::abs(psi.norm() - 1.0));
            if (spec.amplitude == 0.0) {
                const double E = psi.dot(H0.matrix * psi).real();
                traj.energy_drift =
                    std::max(traj.energy_drift, std::abs(E - E0) / std::max(E_scale, 1e-300));
            }
            ++col;
        }
    }
    traj.times.resize(col);
    traj.sigma_z.conservativeResize(n_q, col);
    traj.photons.conservativeResize(n_r, col);
    if (traj.norm_drift > 1e-8)
        throw NumericError("norm drift " + std::to_string(traj.norm_drift) + " exceeds 1e-8");
    return traj;
}

// Large-network driven propagation: second-order symmetric splitting with
// exact local gates (diagonal part, per-coupling two-mode gates, drive
// rotation). Unitary per step; accuracy is validated by step halving.
inline Trajectory evolve_network(const SpinBosonModel& m, const DriveSpec& spec,
                                 const std::vector<int>& occupation0, double dt,
                                 int resonator_dim = 4, int record_stride = 1) {
    spec.check();
    m.check();
    const int n_q = static_cast<int>(m.qubits.size());
    const int n_r = static_cast<int>(m.resonators.size());
    std::vector<int> dims(n_q, 2);
    for (int i = 0; i < n_r; ++i) dims.push_back(resonator_dim);
    int target = -1;
    for (int i = 0; i < n_q; ++i)
        if (m.qubits[i].label == spec.target_qubit) target = i;
    if (target < 0) throw ModelError("unknown target qubit '" + spec.target_qubit + "'");

    long total = 1;
    for (int d : dims) total *= d;

    // diagonal part: qubit gaps and resonator numbers
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(total);
    for (long idx = 0; idx < total; ++idx) {
        const auto multi = fock::unravel(static_cast<int>(idx), dims);
        double e = 0.0;
        for (int i = 0; i < n_q; ++i) e += 0.5 * m.qubits[i].delta * (multi[i] == 0 ? -1.0 : 1.0);
        for (int i = 0; i < n_r; ++i) e += m.resonators[i].omega * multi[n_q + i];
        diag(idx) = e;
    }
    const std::complex<double> im(0.0, 1.0);
    const Eigen::VectorXcd diag_full =
        diag.unaryExpr([&](double x) { return std::exp(-im * x * dt); });

    // half-step coupling gates
    struct Gate {
        int k1, k2;
        Eigen::MatrixXcd g;
    };
    std::vector<Gate> half_gates;
    const Eigen::MatrixXcd low = fock::lowering(resonator_dim);
    const Eigen::MatrixXcd x_op = low + low.adjoint();
    const Eigen::MatrixXcd p_op = low.adjoint() - low;  // anti-Hermitian
    for (const auto& c : m.couplings) {
        const Eigen::MatrixXcd pauli =
            c.parity == CouplingParity::Longitudinal ? fock::pauli_z() : fock::pauli_x();
        const Eigen::MatrixXcd h = c.g * fock::kron(pauli, x_op);
        half_gates.push_back({c.qubit, n_q + c.resonator, gates::small_exp(h, 0.5 * dt)});
    }
    for (const auto& rc : m.resonator_couplings) {
        const Eigen::MatrixXcd h = -rc.g_c * fock::kron(p_op, p_op);  // Hermitian product
        const int k1 = n_q + std::min(rc.r1, rc.r2), k2 = n_q + std::max(rc.r1, rc.r2);
        half_gates.push_back({k1, k2, gates::small_exp(h, 0.5 * dt)});
    }

    const int n_steps = static_cast<int>(std::ceil(spec.duration / dt));
    const int n_rec = n_steps / record_stride + 1;
    Trajectory traj;
    traj.times.resize(n_rec);
    traj.sigma_z.resize(n_q, n_rec);
    traj.photons.resize(n_r, n_rec);

    Eigen::VectorXcd psi = detail::basis_state(dims, occupation0);
    detail::record_expectations(psi, dims, n_q, traj, 0);
    traj.times[0] = 0.0;

    auto drive_gate = [&](double a) {
        Eigen::MatrixXcd g(2, 2);
        g << std::cos(a), -im * std::sin(a), -im * std::sin(a), std::cos(a);
        return g;
    };

    int col = 1;
    for (int step = 0; step < n_steps; ++step) {
        const double f = spec.value((step + 0.5) * dt);
        if (f != 0.0) gates::apply_one_mode_gate(psi, dims, target, drive_gate(0.5 * f * dt));
        for (auto it = half_gates.begin(); it != half_gates.end(); ++it)
            gates::apply_two_mode_gate(psi, dims, it->k1, it->k2, it->g);
        gates::apply_diagonal_phase(psi, diag_full);
        for (auto it = half_gates.rbegin(); it != half_gates.rend(); ++it)
            gates::apply_two_mode_gate(psi, dims, it->k1, it->k2, it->g);
        if (f != 0.0) gates::apply_one_mode_gate(psi, dims, target, drive_gate(0.5 * f * dt));
        if ((step + 1) % record_stride == 0 && col < n_rec) {
            traj.times[col] = (step + 1) * dt;
            detail::record_expectations(psi, dims, n_q, traj, col);
            traj.norm_drift = std::max(traj.norm_drift, std::abs(psi.norm() - 1.0));
            ++col;
        }
    }
    traj.times.resize(col);
    traj.sigma_z.conservativeResize(n_q, col);
    traj.photons.conservativeResize(n_r, col);
    if (traj.norm_drift > 1e-8)
        throw NumericError("norm drift " + std::to_string(traj.norm_drift) + " exceeds 1e-8");
    return traj;
}

// ---------------------------------------------------------------------------
// Sideband spectroscopy: sweep the drive frequency, propagate from the
// dressed state with the target qubit excited, and record the peak photon
// transfer into the resonators.

struct ScanPoint {
    double omega = 0.0;
    double transfer = 0.0;
};
struct Resonance {
    double omega = 0.0;
    double height = 0.0;
    double width = 0.0;  // full width at half maximum, grid-interpolated
};
struct ScanResult {
    std::vector<ScanPoint> points;
    std::vector<Resonance> peaks;
};

inline int scan_thread_count() {
    if (const char* env = std::getenv("FLUXLATTICE_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace detail {

inline std::vector<Resonance> extract_peaks(const std::vector<ScanPoint>& pts,
                                            double floor = 1e-6) {
    std::vector<Resonance> out;
    double global_max = 0.0;
    for (const auto& p : pts) global_max = std::max(global_max, p.transfer);
    const double threshold = std::max(floor, 0.2 * global_max);
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
        const double y = pts[i].transfer;
        if (y < threshold || y < pts[i - 1].transfer || y < pts[i + 1].transfer) continue;
        if (y == pts[i - 1].transfer && y == pts[i + 1].transfer) continue;
        Resonance r;
        r.height = y;
        // quadratic vertex through the three points
        const double y0 = pts[i - 1].transfer, y2 = pts[i + 1].transfer;
        const double h = pts[i + 1].omega - pts[i].omega;
        const double denom = y0 - 2.0 * y + y2;
        r.omega = pts[i].omega +
                  (denom != 0.0 ? 0.5 * h * (y0 - y2) / denom : 0.0);
        // half-maximum crossings
        const double half = 0.5 * y;
        double lo = pts.front().omega, hi = pts.back().omega;
        for (std::size_t j = i; j > 0; --j)
            if (pts[j - 1].transfer < half) {
                const double t =
                    (half - pts[j - 1].transfer) / (pts[j].transfer - pts[j - 1].transfer);
                lo = pts[j - 1].omega + t * (pts[j].omega - pts[j - 1].omega);
                break;
            }
        for (std::size_t j = i; j + 1 < pts.size(); ++j)
            if (pts[j + 1].transfer < half) {
                const double t =
                    (half - pts[j + 1].transfer) / (pts[j].transfer - pts[j + 1].transfer);
                hi = pts[j + 1].omega - t * (pts[j + 1].omega - pts[j].omega);
                break;
            }
        r.width = hi - lo;
        out.push_back(r);
    }
    return out;
}

}  // namespace detail

inline ScanResult sideband_scan(const SpinBosonModel& m, const DriveSpec& tmpl,
                                double w_min, double w_max, int steps,
                                int resonator_dim = 5, double dt = 0.0,
                                int record_stride = 4) {
    if (steps < 2) throw ModelError("scan needs at least 2 frequency points");
    const FockOperator H0 = spin_boson_fock(m, resonator_dim);
    const int n_q = static_cast<int>(m.qubits.size());
    const int n_r = static_cast<int>(m.resonators.size());

    // start from the dressed state with the target qubit excited
    int target = -1;
    for (int i = 0; i < n_q; ++i)
        if (m.qubits[i].label == tmpl.target_qubit) target = i;
    if (target < 0) throw ModelError("unknown target qubit '" + tmpl.target_qubit + "'");
    const SpectrumReport rep = eigensystem(H0);
    std::vector<int> occ(n_q + n_r, 0);
    occ[target] = 1;
    const int lvl = rep.find(occ);
    if (lvl < 0) throw NumericError("could not label the initial dressed state");
    const Eigen::VectorXcd psi0 = rep.eigenvectors.col(lvl);
    double photons0 = 0.0;
    for (int i = 0; i < n_r; ++i)
        photons0 += expect_one_mode(psi0, H0.dims, n_q + i, fock::number(H0.dims[n_q + i]));

    if (dt <= 0.0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H0.matrix);
        dt = 0.05 / es.eigenvalues().cwiseAbs().maxCoeff();
    }

    ScanResult result;
    result.points.resize(steps);
    const int n_threads = std::min(scan_thread_count(), steps);
    std::vector<std::thread> pool;
    std::vector<std::string> worker_error(n_threads);
    for (int w = 0; w < n_threads; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (int i = w; i < steps; i += n_threads) {
                    DriveSpec spec = tmpl;
                    spec.frequency = w_min + (w_max - w_min) * i / (steps - 1);
                    const Trajectory traj =
                        evolve(H0, m, spec, psi0, dt, record_stride, false);
                    double peak = 0.0;
                    for (int col = 0; col < traj.photons.cols(); ++col)
                        peak = std::max(peak, traj.photons.col(col).sum() - photons0);
                    result.points[i] = {spec.frequency, peak};
                }
            } catch (const std::exception& e) {
                worker_error[w] = e.what();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& err : worker_error)
        if (!err.empty()) throw NumericError("scan worker failed: " + err);
    result.peaks = detail::extract_peaks(result.points);
    return result;
}

// ---------------------------------------------------------------------------
// Frequency planning: choose one g_c per connection so that all 2n
// dressed frequencies Omega+- are mutually separated by at least the
// guard band. Greedy over a g_c grid, maximizing the minimum gap.

struct FrequencyPlan {
    std::vector<double> bare_omega;   // per connection
    std::vector<double> g_c;          // per connection
    std::vector<double> frequencies;  // Omega+, Omega- per connection
    double min_gap = 0.0;
    double guard_band = 0.0;
};

inline double plan_min_gap(const std::vector<double>& freqs) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < freqs.size(); ++i)
        for (std::size_t j = i + 1; j < freqs.size(); ++j)
            gap = std::min(gap, std::abs(freqs[i] - freqs[j]));
    return gap;
}

inline void verify_frequency_plan(const FrequencyPlan& plan) {
    std::vector<double> freqs;
    for (std::size_t j = 0; j < plan.g_c.size(); ++j) {
        const auto nm =
            normal_mode_frequencies(plan.bare_omega[j], plan.bare_omega[j], plan.g_c[j]);
        freqs.push_back(nm.omega_plus);
        freqs.push_back(nm.omega_minus);
    }
    for (std::size_t i = 0; i < freqs.size(); ++i)
        // plans may have passed through the 12-significant-digit reports
        if (std::abs(freqs[i] - plan.frequencies[i]) > 1e-9 * std::max(1.0, freqs[i]))
            throw NumericError("frequency plan is inconsistent with its couplers");
    if (plan_min_gap(freqs) < plan.guard_band)
        throw NumericError("frequency plan violates its guard band");
}

inline FrequencyPlan frequency_plan(const std::vector<double>& bare_omega,
                                    std::pair<double, double> g_c_range, double guard_band,
                                    int grid = 201) {
    if (guard_band <= 0.0) throw ModelError("guard band must be > 0");
    if (bare_omega.empty()) throw ModelError("no connections to plan");
    if (g_c_range.second <= g_c_range.first) throw ModelError("empty coupler search range");
    FrequencyPlan plan;
    plan.bare_omega = bare_omega;
    plan.guard_band = guard_band;
    for (std::size_t j = 0; j < bare_omega.size(); ++j) {
        double best_gc = 0.0, best_score = -1.0;
        std::vector<double> best_pair;
        for (int i = 0; i < grid; ++i) {
            const double gc =
                g_c_range.first + (g_c_range.second - g_c_range.first) * i / (grid - 1);
            NormalModePair nm;
            try {
                nm = normal_mode_frequencies(bare_omega[j], bare_omega[j], gc);
            } catch (const NumericError&) {
                continue;  // unstable corner of the range
            }
            std::vector<double> trial = plan.frequencies;
            trial.push_back(nm.omega_plus);
            trial.push_back(nm.omega_minus);
            const double score = plan_min_gap(trial);
            if (score > best_score) {
                best_score = score;
                best_gc = gc;
                best_pair = {nm.omega_plus, nm.omega_minus};
            }
        }
        if (best_score < 0.0)
            throw NumericError("no stable coupler value in the search range");
        plan.g_c.push_back(best_gc);
        plan.frequencies.insert(plan.frequencies.end(), best_pair.begin(), best_pair.end());
    }
    plan.min_gap = plan_min_gap(plan.frequencies);
    if (plan.min_gap < guard_band)
        throw NumericError("guard band " + std::to_string(guard_band) +
                           " unreachable: best minimum gap " + std::to_string(plan.min_gap));
    return plan;
}

// ---------------------------------------------------------------------------
// Locality probe: drive one qubit, compare against the undriven run, and
// report the largest change everywhere else.

struct LocalityReport {
    std::vector<std::string> qubit_labels;
    std::vector<std::string> resonator_labels;
    std::vector<double> qubit_disturbance;    // max |delta <sigma_z>|, target entry too
    std::vector<double> resonator_transfer;   // max |delta <n>|
    int target = 0;
};

inline LocalityReport locality_probe(const SpinBosonModel& m, const DriveSpec& spec,
                                     double dt, int resonator_dim = 4,
                                     int record_stride = 4) {
    const int n_q = static_cast<int>(m.qubits.size());
    const int n_r = static_cast<int>(m.resonators.size());
    std::vector<int> occ(n_q + n_r, 0);
    int target = -1;
    for (int i = 0; i < n_q; ++i)
        if (m.qubits[i].label == spec.target_qubit) target = i;
    if (target < 0) throw ModelError("unknown target qubit '" + spec.target_qubit + "'");
    occ[target] = 1;

    const Trajectory driven = evolve_network(m, spec, occ, dt, resonator_dim, record_stride);
    DriveSpec off = spec;
    off.amplitude = 0.0;
    const Trajectory idle = evolve_network(m, off, occ, dt, resonator_dim, record_stride);

    LocalityReport rep;
    rep.target = target;
    for (const auto& q : m.qubits) rep.qubit_labels.push_back(q.label);
    for (const auto& r : m.resonators) rep.resonator_labels.push_back(r.label);
    const int cols = static_cast<int>(std::min(driven.times.size(), idle.times.size()));
    rep.qubit_disturbance.assign(n_q, 0.0);
    rep.resonator_transfer.assign(n_r, 0.0);
    for (int c = 0; c < cols; ++c) {
        for (int i = 0; i < n_q; ++i)
            rep.qubit_disturbance[i] = std::max(
                rep.qubit_disturbance[i], std::abs(driven.sigma_z(i, c) - idle.sigma_z(i, c)));
        for (int i = 0; i < n_r; ++i)
            rep.resonator_transfer[i] = std::max(
                rep.resonator_transfer[i], std::abs(driven.photons(i, c) - idle.photons(i, c)));
    }
    return rep;
}

// Four blocks in a ring: qubit i couples longitudinally to resonators
// (i, j) for its two adjacent connections j; each connection j couples
// its two resonators through g_c[j].
inline SpinBosonModel plaquette_network(const std::array<double, 4>& delta, double omega,
                                        double g, const std::array<double, 4>& g_c) {
    SpinBosonModel m;
    for (int i = 1; i <= 4; ++i) m.qubits.push_back({"q" + std::to_string(i), delta[i - 1]});
    // resonator order: per connection j, first the block-j side then the
    // block-(j%4+1) side
    for (int j = 1; j <= 4; ++j) {
        const int i1 = j, i2 = (j % 4) + 1;
        m.resonators.push_back({"r" + std::to_string(i1) + "_" + std::to_string(j), omega});
        m.resonators.push_back({"r" + std::to_string(i2) + "_" + std::to_string(j), omega});
        const int k1 = 2 * (j - 1), k2 = 2 * (j - 1) + 1;
        m.couplings.push_back({i1 - 1, k1, g, CouplingParity::Longitudinal, 0.0});
        m.couplings.push_back({i2 - 1, k2, g, CouplingParity::Longitudinal, 0.0});
        m.resonator_couplings.push_back({k1, k2, g_c[j - 1]});
    }
    return m;
}

}  // namespace fluxlattice

#endif
