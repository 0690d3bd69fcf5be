#include <catch2/catch_amalgamated.hpp>

#include "fluxlattice/netlist.hpp"
#include "fluxlattice/quantize.hpp"
#include "fluxlattice/spectra.hpp"

using namespace fluxlattice;

namespace {

// One differential qubit mode in dimensionless units: 8 E_C n^2 +
// (kappa/2) phi^2 - E_Jq cos(phi).
HamiltonianModel one_mode_qubit(double e_c, double e_jq, double kappa) {
    HamiltonianModel h;
    h.labels = {"phi_q"};
    h.charge_form = Eigen::MatrixXd::Constant(1, 1, 4.0 * e_c);
    h.quad_potential = Eigen::MatrixXd::Constant(1, 1, kappa);
    SinusoidTerm s;
    s.amplitude = -e_jq;
    s.direction = Eigen::VectorXd::Constant(1, 1.0);
    s.offset = 0.0;
    h.sinusoids.push_back(s);
    return h;
}

Eigen::VectorXd lowest_eigs(const FockOperator& H, int k) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H.matrix);
    REQUIRE(es.info() == Eigen::Success);
    return es.eigenvalues().head(k);
}

}  // namespace

TEST_CASE("closed-form qubit parameters satisfy their defining relations") {
    const Circuit c = builtin_circuit("qubit_resonator");
    const DerivedParameters p = derived_parameters(c);
    REQUIRE(p.qubits.size() == 1);
    const auto& q = p.qubits[0];
    // two arms of L = 10 nH each: the differential variable sees half of
    // one arm's inverse inductance from each side, L_inv/2 in total
    const double e_l_tot = units::inductance_coeff(10e-9);
    CHECK(q.E_J_star == Catch::Approx(q.E_J + 0.5 * e_l_tot).epsilon(1e-12));
    CHECK(q.gap == Catch::Approx(4.0 * std::sqrt(q.E_J_star * q.E_C)).epsilon(1e-12));
    CHECK(q.anharmonicity ==
          Catch::Approx(-2.0 * q.E_C * q.E_J / q.E_J_star).epsilon(1e-12));
    CHECK(q.gap > 0.0);
    CHECK(q.anharmonicity < 0.0);
}

TEST_CASE("closed forms vs the one-mode dense spectrum") {
    // E_C = 0.25, E_Jq = 10, inductive curvature 2 -> E* = 12
    const double e_c = 0.25, e_jq = 10.0, kappa = 2.0;
    const double e_star = e_jq + kappa;
    CHECK(e_star == 12.0);
    const double gap = 4.0 * std::sqrt(e_star * e_c);
    const double delta = -2.0 * e_c * e_jq / e_star;
    CHECK(gap == Catch::Approx(4.0 * std::sqrt(3.0)));
    CHECK(delta == Catch::Approx(-0.41666666666667).epsilon(1e-10));

    const HamiltonianModel h = one_mode_qubit(e_c, e_jq, kappa);
    const FockOperator H = fock_hamiltonian(h, {{"phi_q", 200}});
    const Eigen::VectorXd e = lowest_eigs(H, 3);
    const double delta_num = (e(2) - e(1)) - (e(1) - e(0));
    // next order in the well expansion enters at sqrt(E_C/E*) relative
    // for the anharmonicity and at E_C/E* for the corrected gap
    const double ratio = e_c / e_star;
    CHECK(std::abs(delta_num - delta) < 1.5 * std::sqrt(ratio) * std::abs(delta));
    const double gap_num = (e(1) - e(0)) - delta_num;
    CHECK(std::abs(gap_num - gap) < 2.0 * ratio * gap);
}

TEST_CASE("harmonic limit has zero anharmonicity") {
    const HamiltonianModel h = one_mode_qubit(0.25, 1e-9, 2.0);
    const FockOperator H = fock_hamiltonian(h, {{"phi_q", 120}});
    const Eigen::VectorXd e = lowest_eigs(H, 3);
    CHECK(std::abs((e(2) - e(1)) - (e(1) - e(0))) < 1e-8 * (e(1) - e(0)));
}

TEST_CASE("pure LC mode frequency") {
    LagrangianModel m;
    m.labels = {"phi_r"};
    const double C = units::capacitance_coeff(100e-15);
    const double Linv = units::inductance_coeff(10e-9);
    m.kinetic = Eigen::MatrixXd::Constant(1, 1, C);
    m.quad_potential = Eigen::MatrixXd::Constant(1, 1, Linv);
    const HamiltonianModel h = legendre_transform(m);
    const ModeBasis b = mode_basis(h);
    CHECK(b.omega(0) == Catch::Approx(1.0 / std::sqrt(10e-9 * 100e-15)).epsilon(1e-12));
}

TEST_CASE("degenerate kinetic form is rejected") {
    LagrangianModel m;
    m.labels = {"x", "y"};
    m.kinetic = Eigen::MatrixXd::Zero(2, 2);
    m.kinetic(0, 0) = 1.0;
    m.quad_potential = Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS_AS(legendre_transform(m), ModelError);
}

TEST_CASE("Legendre round trip preserves normal modes") {
    const Circuit c = builtin_circuit("two_blocks");
    const LagrangianModel red = apply_linear_transform(build_lagrangian(c),
                                                       standard_block_transform(c));
    const auto [elim, audit] = cholesky_eliminate(red, {"phi_cbar"});
    LagrangianModel quad = elim;
    quad.sinusoids.clear();
    const Eigen::VectorXd direct =
        quadratic_normal_modes(quad.kinetic, quad.quad_potential);
    const HamiltonianModel h = legendre_transform(quad);
    const ModeBasis b = mode_basis(h);
    REQUIRE(b.omega.size() == direct.size());
    for (Eigen::Index i = 0; i < direct.size(); ++i)
        CHECK(b.omega(i) == Catch::Approx(direct(i)).epsilon(1e-10));
}

TEST_CASE("Fock Hamiltonians are Hermitian and truncation-stable") {
    const HamiltonianModel h = reduce_circuit(builtin_circuit("qubit_resonator"));
    const FockOperator H = fock_hamiltonian(h);
    CHECK(H.is_hermitian());
    CHECK(H.hermiticity_defect() < 1e-12 * H.matrix.norm());

    const FockOperator Hbig = fock_hamiltonian(h, {{"phi_q", 17}, {"phi_r", 15}});
    const Eigen::VectorXd e0 = lowest_eigs(H, 4), e1 = lowest_eigs(Hbig, 4);
    for (int i = 0; i < 4; ++i)
        CHECK(std::abs(e1(i) - e0(i)) < 1e-8 * std::abs(e0(i)));
}

TEST_CASE("truncation failure is reported") {
    const HamiltonianModel h = reduce_circuit(builtin_circuit("qubit_resonator"));
    CHECK_THROWS_AS(fock_hamiltonian(h, {{"phi_q", 3}, {"phi_r", 10}}), NumericError);
}

TEST_CASE("decoupled sectors commute without arm junctions") {
    Circuit c = builtin_circuit("qubit_resonator");
    std::erase_if(c.branches, [](const Branch& b) {
        return b.kind == BranchKind::Junction && b.phase_offset != 0.0;
    });
    const HamiltonianModel h = reduce_circuit(c);
    const FockOperator H = fock_hamiltonian(h);
    // photon number of the resonator mode commutes with H
    const int r = H.mode_index("phi_r");
    const Eigen::MatrixXcd N = fock::embed(fock::number(H.dims[r]), r, H.dims);
    const Eigen::MatrixXcd comm = H.matrix * N - N * H.matrix;
    CHECK(comm.cwiseAbs().maxCoeff() < 1e-14 * H.matrix.cwiseAbs().maxCoeff());
}

TEST_CASE("frozen resonator reduces to the bare qubit") {
    const HamiltonianModel h = reduce_circuit(builtin_circuit("qubit_resonator"));
    const FockOperator frozen =
        fock_hamiltonian(h, {{"phi_q", 30}, {"phi_r", 1}}, false, nullptr, false);
    HamiltonianModel hq;
    const int q = h.index_of("phi_q");
    hq.labels = {"phi_q"};
    hq.charge_form = Eigen::MatrixXd::Constant(1, 1, h.charge_form(q, q));
    hq.quad_potential = Eigen::MatrixXd::Constant(1, 1, h.quad_potential(q, q));
    for (const auto& s : h.sinusoids)
        if (s.direction(h.index_of("phi_r")) == 0.0) {
            SinusoidTerm sq = s;
            sq.direction = Eigen::VectorXd::Constant(1, s.direction(q));
            hq.sinusoids.push_back(sq);
        }
    const FockOperator bare = fock_hamiltonian(hq, {{"phi_q", 30}}, false, nullptr, false);
    const Eigen::VectorXd ef = lowest_eigs(frozen, 3), eb = lowest_eigs(bare, 3);
    // level spacings agree; absolute offsets differ by frozen-mode constants
    CHECK(std::abs((ef(1) - ef(0)) - (eb(1) - eb(0))) < 1e-6 * (eb(1) - eb(0)));
}

TEST_CASE("linearized coupling reports a residual bound") {
    const HamiltonianModel h = reduce_circuit(builtin_circuit("qubit_resonator"));
    double residual = 0.0;
    const FockOperator lin = fock_hamiltonian(h, {}, true, &residual);
    const FockOperator full = fock_hamiltonian(h, {});
    CHECK(residual > 0.0);
    const Eigen::VectorXd el = lowest_eigs(lin, 4), ef = lowest_eigs(full, 4);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(el(i) - ef(i)) <= 2.0 * residual);
}

TEST_CASE("two-level reduction of the symmetric block is purely longitudinal") {
    const HamiltonianModel h = reduce_circuit(builtin_circuit("qubit_resonator"));
    const TwoLevelReduction red = two_level_reduce(h);
    REQUIRE(red.model.couplings.size() == 1);
    const auto& cpl = red.model.couplings[0];
    CHECK(cpl.parity == CouplingParity::Longitudinal);
    CHECK(cpl.g != 0.0);
    CHECK(red.max_transverse_residual < 1e-12 * std::abs(cpl.g));
}

TEST_CASE("harmonic qubit refuses the two-level reduction") {
    HamiltonianModel h;
    h.labels = {"phi_q", "phi_r"};
    h.charge_form = Eigen::MatrixXd::Identity(2, 2);
    h.quad_potential = Eigen::MatrixXd::Identity(2, 2) * 2.0;
    CHECK_THROWS_WITH(two_level_reduce(h),
                      Catch::Matchers::ContainsSubstring("two-level approximation invalid"));
}

TEST_CASE("reduced block spectrum matches the full Fock model") {
    const HamiltonianModel h = reduce_circuit(builtin_circuit("qubit_resonator"));
    const TwoLevelReduction red = two_level_reduce(h);
    const FockOperator Hred = spin_boson_fock(red.model, 10);
    const SpectrumReport rep_red = eigensystem(Hred);

    const FockOperator Hfull = fock_hamiltonian(h, {{"phi_q", 14}, {"phi_r", 12}});
    const SpectrumReport rep_full = eigensystem(Hfull, 24);
    const int q = rep_full.mode_labels[0] == "phi_q" ? 0 : 1;
    const double ground = rep_full.levels[0].energy;
    // match levels by adiabatic labels within the two-level manifold
    for (const auto& lvl : rep_red.levels) {
        if (lvl.occupation[1] > 2) continue;
        std::vector<int> occ_full(2);
        occ_full[q] = lvl.occupation[0];
        occ_full[1 - q] = lvl.occupation[1];
        const int match = rep_full.find(occ_full);
        if (match < 0) continue;
        const double e_full = rep_full.levels[match].energy - ground;
        const double e_red = lvl.energy - rep_red.levels[0].energy;
        if (e_full == 0.0) continue;
        CHECK(std::abs(e_red - e_full) < 1e-3 * std::abs(e_full));
    }
}

TEST_CASE("two-block derived couplers match the quadratic oracle") {
    const Circuit c = builtin_circuit("two_blocks");
    const DerivedParameters p = derived_parameters(c);
    REQUIRE(p.resonators.size() == 2);
    REQUIRE(p.connection_couplings.size() == 1);
    const double w1 = p.resonators[0].omega, w2 = p.resonators[1].omega;
    const double gc = p.connection_couplings[0].g_c;

    const LagrangianModel red = apply_linear_transform(build_lagrangian(c),
                                                       standard_block_transform(c));
    const auto [elim, audit] = cholesky_eliminate(red, {"phi_cbar"});
    const int r1 = elim.index_of("phi_r1"), r2 = elim.index_of("phi_r2");
    Eigen::MatrixXd M(2, 2), K(2, 2);
    M << elim.kinetic(r1, r1), elim.kinetic(r1, r2), elim.kinetic(r2, r1),
        elim.kinetic(r2, r2);
    K << elim.quad_potential(r1, r1), elim.quad_potential(r1, r2),
        elim.quad_potential(r2, r1), elim.quad_potential(r2, r2);
    const Eigen::VectorXd oracle = quadratic_normal_modes(M, K);
    const NormalModePair nm = normal_mode_frequencies(w1, w2, gc);
    CHECK(nm.omega_minus == Catch::Approx(oracle(0)).epsilon(1e-9));
    CHECK(nm.omega_plus == Catch::Approx(oracle(1)).epsilon(1e-9));
}
