#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fluxlattice/lagrangian.hpp"
#include "fluxlattice/netlist.hpp"

using namespace fluxlattice;

namespace {

LagrangianModel reduced_block(const std::string& name, const ParamTable& p = {}) {
    const Circuit c = builtin_circuit(name, p);
    return apply_linear_transform(build_lagrangian(c), standard_block_transform(c));
}

}  // namespace

TEST_CASE("node-basis kinetic form of the single block") {
    const Circuit c = builtin_circuit("qubit_resonator");
    const LagrangianModel m = build_lagrangian(c);
    REQUIRE(m.labels == std::vector<std::string>{"phi_a", "phi_b"});
    const double cC = units::capacitance_coeff(100e-15);
    const double cCq = units::capacitance_coeff(500e-15);
    CHECK(m.kinetic(0, 0) == Catch::Approx(cC + cCq));
    CHECK(m.kinetic(1, 1) == Catch::Approx(cC + cCq));
    CHECK(m.kinetic(0, 1) == Catch::Approx(-cCq));
    CHECK(m.kinetic == m.kinetic.transpose());
}

TEST_CASE("arm junctions removed leaves only the qubit sinusoid") {
    Circuit c = builtin_circuit("qubit_resonator");
    std::erase_if(c.branches, [](const Branch& b) {
        return b.kind == BranchKind::Junction && b.phase_offset != 0.0;
    });
    const LagrangianModel m = build_lagrangian(c);
    REQUIRE(m.sinusoids.size() == 1);
    CHECK(m.sinusoids[0].amplitude == Catch::Approx(-units::josephson_energy(20.0)));
}

TEST_CASE("block transform decouples the quadratic part") {
    const LagrangianModel m = reduced_block("qubit_resonator");
    const int q = m.index_of("phi_q"), r = m.index_of("phi_r");
    CHECK(std::abs(m.kinetic(q, r)) < 1e-14 * m.kinetic.norm());
    CHECK(std::abs(m.quad_potential(q, r)) < 1e-14 * m.quad_potential.norm());
}

TEST_CASE("reduced block coupling is even in phi_q and odd in phi_r") {
    const LagrangianModel m = reduced_block("qubit_resonator");
    const int q = m.index_of("phi_q"), r = m.index_of("phi_r");
    auto coupling = [&](double pq, double pr) {
        Eigen::VectorXd phi = Eigen::VectorXd::Zero(m.dim());
        phi(q) = pq;
        phi(r) = pr;
        double f = 0.0;
        for (const auto& s : m.sinusoids)
            if (s.direction(r) != 0.0) f += s.value(phi);
        return f;
    };
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double pq = dist(rng), pr = dist(rng);
        const double f = coupling(pq, pr);
        const double scale = std::max(1.0, std::abs(f));
        CHECK(std::abs(coupling(-pq, pr) - f) < 1e-10 * scale);
        CHECK(std::abs(coupling(pq, -pr) + f) < 1e-10 * scale);
    }
}

TEST_CASE("identity transform is a no-op") {
    const Circuit c = builtin_circuit("qubit_resonator");
    const LagrangianModel m = build_lagrangian(c);
    LinearTransform id;
    id.map = Eigen::MatrixXd::Identity(m.dim(), m.dim());
    id.labels = m.labels;
    const LagrangianModel same = apply_linear_transform(m, id);
    CHECK(same.kinetic == m.kinetic);
    CHECK(same.quad_potential == m.quad_potential);
    REQUIRE(same.sinusoids.size() == m.sinusoids.size());
    for (std::size_t i = 0; i < m.sinusoids.size(); ++i)
        CHECK(same.sinusoids[i].direction == m.sinusoids[i].direction);
}

TEST_CASE("singular transform is rejected") {
    const Circuit c = builtin_circuit("qubit_resonator");
    const LagrangianModel m = build_lagrangian(c);
    LinearTransform bad;
    bad.map = Eigen::MatrixXd::Zero(m.dim(), m.dim());
    bad.map(0, 0) = 1.0;
    bad.map(1, 0) = 1.0;
    bad.labels = m.labels;
    CHECK_THROWS_AS(apply_linear_transform(m, bad), ModelError);
}

TEST_CASE("transforms preserve normal modes and Lagrangian values") {
    const Circuit c = builtin_circuit("two_blocks");
    const LagrangianModel m = build_lagrangian(c);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    LinearTransform t;
    t.map = Eigen::MatrixXd::Identity(m.dim(), m.dim());
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) t.map(i, j) += 0.2 * dist(rng);
    for (int i = 0; i < m.dim(); ++i) t.labels.push_back("x" + std::to_string(i));
    const LagrangianModel mt = apply_linear_transform(m, t);

    const Eigen::VectorXd w0 = quadratic_normal_modes(m.kinetic, m.quad_potential);
    const Eigen::VectorXd w1 = quadratic_normal_modes(mt.kinetic, mt.quad_potential);
    REQUIRE(w0.size() == w1.size());
    // zero modes of the ungrounded model survive only to roundoff of the
    // largest frequency
    const double floor = 1e-7 * w0.maxCoeff();
    for (Eigen::Index i = 0; i < w0.size(); ++i)
        CHECK(w1(i) == Catch::Approx(w0(i)).epsilon(1e-10).margin(floor));

    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd phi(m.dim()), phidot(m.dim());
        for (int i = 0; i < m.dim(); ++i) {
            phi(i) = dist(rng);
            phidot(i) = dist(rng);
        }
        const double l0 = m.lagrangian_value(phi, phidot);
        const double l1 = mt.lagrangian_value(t.map * phi, t.map * phidot);
        CHECK(std::abs(l1 - l0) < 1e-10 * std::max(1.0, std::abs(l0)));
    }
}

TEST_CASE("connection variable elimination, no stray capacitance") {
    const LagrangianModel m = reduced_block("two_blocks");
    const auto [elim, audit] = cholesky_eliminate(m, {"phi_cbar"});
    const int r1 = elim.index_of("phi_r1"), r2 = elim.index_of("phi_r2");
    const double cCg = units::capacitance_coeff(10e-15);
    // lambda (rdot1 - rdot2)^2 shows up as off-diagonal -2 lambda
    CHECK(elim.kinetic(r1, r2) == Catch::Approx(-2.0 * cCg / 8.0).epsilon(1e-14));

    // the decoupled variable has exactly zero cross terms
    const LagrangianModel full = apply_linear_transform(m, audit);
    const int star = full.index_of("phi_cbar*");
    for (int i = 0; i < full.dim(); ++i) {
        if (i == star) continue;
        CHECK(std::abs(full.kinetic(star, i)) <
              1e-14 * full.kinetic.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("connection variable elimination with stray capacitance") {
    const LagrangianModel m = reduced_block("two_blocks", {{"C_s", 5.0}});
    const auto [elim, audit] = cholesky_eliminate(m, {"phi_cbar"});
    const int r1 = elim.index_of("phi_r1"), r2 = elim.index_of("phi_r2");
    const double cCg = units::capacitance_coeff(10e-15);
    const double cCs = units::capacitance_coeff(5e-15);
    const double coeff = cCg * cCg / (2.0 * (4.0 * cCg + cCs));
    CHECK(elim.kinetic(r1, r2) == Catch::Approx(-2.0 * coeff).epsilon(1e-14));
}

TEST_CASE("eliminating a potential-carrying variable is refused") {
    const LagrangianModel m = reduced_block("two_blocks");
    CHECK_THROWS_AS(cholesky_eliminate(m, {"phi_q1"}), ModelError);
}

TEST_CASE("plaquette ring constraint: eight arm combinations, rank seven") {
    const Circuit c = builtin_circuit("plaquette");
    const LagrangianModel node = build_lagrangian(c);
    auto var = [&](const std::string& n) { return node.index_of("phi_" + n); };
    Eigen::MatrixXd combos(8, node.dim());
    combos.setZero();
    int row = 0;
    for (int j = 1; j <= 4; ++j) {
        for (int i : {j, j % 4 + 1}) {
            combos(row, var("a" + std::to_string(i))) = 1.0;
            combos(row, var("b" + std::to_string(i))) = 1.0;
            combos(row, var("c" + std::to_string(j))) -= 2.0;
            ++row;
        }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(combos);
    lu.setThreshold(1e-10);
    CHECK(lu.rank() == 7);
    // the kernel of the transpose is the alternating ring sum
    Eigen::VectorXd signs(8);
    signs << 1, -1, 1, -1, 1, -1, 1, -1;
    CHECK((signs.transpose() * combos).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("plaquette qubit variables decouple kinetically") {
    const LagrangianModel m = reduced_block("plaquette");
    const auto [elim, audit] = cholesky_eliminate(m, {"phi_aux"});
    const double scale = elim.kinetic.cwiseAbs().maxCoeff();
    for (int i = 0; i < elim.dim(); ++i) {
        if (elim.labels[i].rfind("phi_q", 0) != 0) continue;
        for (int j = 0; j < elim.dim(); ++j)
            if (j != i) CHECK(std::abs(elim.kinetic(i, j)) < 1e-12 * scale);
    }
}

TEST_CASE("plaquette same-connection coupling dominates the charge form") {
    // The ring constraint leaves residual cross-connection charge
    // coupling in minimal coordinates; same-connection pairs must still
    // dominate.
    const LagrangianModel m = reduced_block("plaquette");
    const auto [elim, audit] = cholesky_eliminate(m, {"phi_aux"});
    const Eigen::MatrixXd mu = elim.kinetic.inverse();
    auto idx = [&](const std::string& l) { return elim.index_of(l); };
    const double adjacent = std::abs(mu(idx("phi_r1_1"), idx("phi_r2_1")));
    const std::pair<std::string, std::string> separated[] = {
        {"phi_r1_1", "phi_r2_2"}, {"phi_r1_1", "phi_r3_3"}, {"phi_r2_2", "phi_r4_3"}};
    for (const auto& [x, y] : separated)
        CHECK(std::abs(mu(idx(x), idx(y))) < adjacent);
}

TEST_CASE("grounding removes one variable") {
    const Circuit c = builtin_circuit("two_blocks");
    const LagrangianModel m = build_lagrangian(c);
    CHECK(m.dim() == static_cast<int>(c.nodes.size()) - 1);
    for (const auto& l : m.labels) CHECK(l != "phi_g");
}
