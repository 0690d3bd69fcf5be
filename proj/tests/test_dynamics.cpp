#include <catch2/catch_amalgamated.hpp>

#include "fluxlattice/dynamics.hpp"
#include "fluxlattice/netlist.hpp"
#include "fluxlattice/quantize.hpp"

using namespace fluxlattice;

namespace {

SpinBosonModel two_block_chain() {
    SpinBosonModel m;
    m.qubits = {{"q1", 5.0}, {"q2", 5.3}};
    m.resonators = {{"r1", 1.0}, {"r2", 1.1}};
    m.couplings = {{0, 0, 0.1, CouplingParity::Longitudinal, 0.0},
                   {1, 1, 0.1, CouplingParity::Longitudinal, 0.0}};
    m.resonator_couplings = {{0, 1, 0.05}};
    return m;
}

}  // namespace

TEST_CASE("drive projections on the symmetric block") {
    const HamiltonianModel h = reduce_circuit(builtin_circuit("qubit_resonator"));
    const DriveProjection v = drive_projection(h, "phi_q", DriveKind::Voltage);
    CHECK(v.sigma_x_amplitude > 0.0);
    CHECK(v.longitudinal_residual < 1e-12 * v.sigma_x_amplitude);
    const DriveProjection f = drive_projection(h, "phi_q", DriveKind::Flux);
    CHECK(f.sigma_x_amplitude > 0.0);
    CHECK(f.longitudinal_residual < 1e-12 * f.sigma_x_amplitude);
}

TEST_CASE("drive spec validation") {
    DriveSpec d;
    d.duration = -1.0;
    CHECK_THROWS_AS(d.check(), ModelError);
    d.duration = 1.0;
    d.amplitude = -0.1;
    CHECK_THROWS_AS(d.check(), ModelError);
}

TEST_CASE("undriven eigenstate stays put") {
    const SpinBosonModel m = make_longitudinal(5.0, 1.0, 0.1);
    const FockOperator H = spin_boson_fock(m, 6);
    const SpectrumReport rep = eigensystem(H);
    DriveSpec off;
    off.target_qubit = m.qubits[0].label;
    off.duration = 20.0;
    const Trajectory t =
        evolve(H, m, off, rep.eigenvectors.col(rep.find({1, 0})), 0.004, 10);
    CHECK(t.norm_drift < 1e-8);
    CHECK(t.energy_drift < 1e-8);
    for (std::size_t c = 1; c < t.times.size(); ++c) {
        CHECK(std::abs(t.sigma_z(0, c) - t.sigma_z(0, 0)) < 1e-8);
        CHECK(std::abs(t.photons(0, c) - t.photons(0, 0)) < 1e-8);
    }
}

TEST_CASE("coarse time steps and bad initial states are rejected") {
    const SpinBosonModel m = make_longitudinal(5.0, 1.0, 0.1);
    const FockOperator H = spin_boson_fock(m, 6);
    DriveSpec d;
    d.target_qubit = m.qubits[0].label;
    d.duration = 1.0;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(H.dim());
    psi(0) = 1.0;
    CHECK_THROWS_AS(evolve(H, m, d, psi, 1.0), NumericError);
    psi(0) = 0.5;
    CHECK_THROWS_AS(evolve(H, m, d, psi, 0.004), ModelError);
    d.target_qubit = "nope";
    psi(0) = 1.0;
    CHECK_THROWS_AS(evolve(H, m, d, psi, 0.004), ModelError);
}

TEST_CASE("resonant Rabi period matches the rotating-wave prediction") {
    SpinBosonModel m;
    m.qubits = {{"q", 5.0}};
    const FockOperator H = spin_boson_fock(m, 2);
    DriveSpec d;
    d.target_qubit = "q";
    d.amplitude = 0.1;  // delta/50
    d.frequency = 5.0;
    d.duration = 40.0;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(2);
    psi(0) = 1.0;
    const Trajectory t = evolve(H, m, d, psi, 0.005, 1);
    // <sigma_z> ~ -cos(amplitude t); first rising zero crossing at T/4
    double t_cross = -1.0;
    for (std::size_t c = 1; c < t.times.size(); ++c)
        if (t.sigma_z(0, c - 1) < 0.0 && t.sigma_z(0, c) >= 0.0) {
            const double frac = -t.sigma_z(0, c - 1) / (t.sigma_z(0, c) - t.sigma_z(0, c - 1));
            t_cross = t.times[c - 1] + frac * (t.times[c] - t.times[c - 1]);
            break;
        }
    REQUIRE(t_cross > 0.0);
    const double period = 4.0 * t_cross;
    CHECK(std::abs(period - 2.0 * std::numbers::pi / d.amplitude) <
          0.02 * (2.0 * std::numbers::pi / d.amplitude));
}

TEST_CASE("undriven qubits conserve sigma_z exactly") {
    const SpinBosonModel m = two_block_chain();
    DriveSpec d;
    d.target_qubit = "q1";
    d.amplitude = 0.3;
    d.frequency = 4.0;
    d.duration = 10.0;
    const Trajectory t = evolve_network(m, d, {1, 0, 0, 0}, 0.005, 5, 20);
    for (std::size_t c = 0; c < t.times.size(); ++c)
        CHECK(std::abs(t.sigma_z(1, c) - t.sigma_z(1, 0)) < 1e-8);
    CHECK(t.norm_drift < 1e-8);
}

TEST_CASE("split propagator converges under step halving") {
    const SpinBosonModel m = two_block_chain();
    DriveSpec d;
    d.target_qubit = "q1";
    d.amplitude = 0.3;
    d.frequency = 4.0;
    d.duration = 5.0;
    const Trajectory a = evolve_network(m, d, {1, 0, 0, 0}, 0.001, 4, 500);
    const Trajectory b = evolve_network(m, d, {1, 0, 0, 0}, 0.0005, 4, 1000);
    REQUIRE(a.times.size() == b.times.size());
    for (std::size_t c = 0; c < a.times.size(); ++c) {
        for (int i = 0; i < 2; ++i) {
            CHECK(std::abs(a.sigma_z(i, c) - b.sigma_z(i, c)) < 1e-6);
            CHECK(std::abs(a.photons(i, c) - b.photons(i, c)) < 1e-6);
        }
    }
}

TEST_CASE("scan of an uncoupled model is flat") {
    const SpinBosonModel m = make_longitudinal(5.0, 1.0, 0.0);
    DriveSpec tmpl;
    tmpl.target_qubit = m.qubits[0].label;
    tmpl.amplitude = 0.3;
    tmpl.duration = 40.0;
    const ScanResult res = sideband_scan(m, tmpl, 3.6, 4.4, 9, 5);
    for (const auto& p : res.points) CHECK(p.transfer < 1e-6);
    CHECK(res.peaks.empty());
}

TEST_CASE("single-block scan finds the red sideband") {
    const SpinBosonModel m = make_longitudinal(5.0, 1.0, 0.1);
    DriveSpec tmpl;
    tmpl.target_qubit = m.qubits[0].label;
    tmpl.amplitude = 0.3;
    tmpl.duration = 60.0;
    const ScanResult res = sideband_scan(m, tmpl, 3.5, 4.5, 21, 6);
    REQUIRE(res.peaks.size() == 1);
    // near |delta - omega| = 4 up to the drive-induced shift, which is
    // measured, not assumed
    CHECK(std::abs(res.peaks[0].omega - 4.0) < 0.3);
    CHECK(res.peaks[0].height > 0.1);
    CHECK(res.peaks[0].width > 0.0);
}

TEST_CASE("frequency planning") {
    const FrequencyPlan plan = frequency_plan({1.0, 1.0, 1.0, 1.0}, {0.02, 0.3}, 0.01);
    CHECK(plan.g_c.size() == 4);
    CHECK(plan.frequencies.size() == 8);
    CHECK(plan.min_gap >= 0.01);
    for (std::size_t i = 0; i < plan.g_c.size(); ++i)
        for (std::size_t j = i + 1; j < plan.g_c.size(); ++j)
            CHECK(plan.g_c[i] != plan.g_c[j]);
    verify_frequency_plan(plan);

    const FrequencyPlan one = frequency_plan({1.0}, {0.02, 0.3}, 0.01);
    CHECK(one.frequencies.size() == 2);
    CHECK(one.frequencies[0] != one.frequencies[1]);

    CHECK_THROWS_AS(frequency_plan({1.0, 1.0, 1.0, 1.0}, {0.02, 0.05}, 0.5), NumericError);
}

TEST_CASE("tampered frequency plans fail re-verification") {
    FrequencyPlan plan = frequency_plan({1.0, 1.0}, {0.02, 0.3}, 0.01);
    plan.frequencies[0] += 1e-3;
    CHECK_THROWS_AS(verify_frequency_plan(plan), NumericError);
}

TEST_CASE("locality probe on the two-block chain") {
    const SpinBosonModel m = two_block_chain();
    DriveSpec off;
    off.target_qubit = "q1";
    off.amplitude = 0.0;
    off.frequency = 4.0;
    off.duration = 5.0;
    const LocalityReport idle = locality_probe(m, off, 0.005, 5);
    for (double x : idle.qubit_disturbance) CHECK(x < 1e-10);
    for (double x : idle.resonator_transfer) CHECK(x < 1e-10);

    DriveSpec on = off;
    on.amplitude = 0.3;
    const LocalityReport rep = locality_probe(m, on, 0.005, 5);
    CHECK(rep.qubit_disturbance[1] < 1e-8);
    CHECK(rep.qubit_disturbance[0] > 1e-3);
}

TEST_CASE("plaquette network layout") {
    const SpinBosonModel m =
        plaquette_network({5.0, 5.1, 5.2, 5.3}, 1.0, 0.1, {0.05, 0.07, 0.09, 0.11});
    CHECK(m.qubits.size() == 4);
    CHECK(m.resonators.size() == 8);
    CHECK(m.couplings.size() == 8);
    CHECK(m.resonator_couplings.size() == 4);
    m.check();
    // each qubit touches exactly two resonators
    std::vector<int> touch(4, 0);
    for (const auto& c : m.couplings) {
        ++touch[c.qubit];
        CHECK(c.parity == CouplingParity::Longitudinal);
    }
    for (int t : touch) CHECK(t == 2);
    // qubit 1 is adjacent to connections 4 and 1
    CHECK(m.resonators[0].label == "r1_1");
    CHECK(m.resonators[7].label == "r1_4");
}
