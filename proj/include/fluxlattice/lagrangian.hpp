#ifndef FLUXLATTICE_LAGRANGIAN_HPP
#define FLUXLATTICE_LAGRANGIAN_HPP

#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fluxlattice/errors.hpp"
#include "fluxlattice/netlist.hpp"

namespace fluxlattice {

// amplitude * cos(direction . phi + offset), stored in U-convention: a
// junction of energy E_J contributes amplitude -E_J to the potential.
struct SinusoidTerm {
    double amplitude = 0.0;
    Eigen::VectorXd direction;
    double offset = 0.0;

    double value(const Eigen::VectorXd& phi) const {
        return amplitude * std::cos(direction.dot(phi) + offset);
    }
};

// Invertible map x_new = map * phi_old.
struct LinearTransform {
    Eigen::MatrixXd map;
    std::vector<std::string> labels;
};

// T = 1/2 phidot^T kinetic phidot ;  U = 1/2 phi^T quad_potential phi + sinusoids.
struct LagrangianModel {
    std::vector<std::string> labels;
    Eigen::MatrixXd kinetic;
    Eigen::MatrixXd quad_potential;
    std::vector<SinusoidTerm> sinusoids;

    int dim() const { return static_cast<int>(labels.size()); }

    int index_of(const std::string& label) const {
        for (int i = 0; i < dim(); ++i)
            if (labels[i] == label) return i;
        throw ModelError("no variable labeled '" + label + "'");
    }

    double lagrangian_value(const Eigen::VectorXd& phi, const Eigen::VectorXd& phidot) const {
        double L = 0.5 * phidot.dot(kinetic * phidot) - 0.5 * phi.dot(quad_potential * phi);
        for (const auto& s : sinusoids) L -= s.value(phi);
        return L;
    }
};

namespace detail {

inline double reciprocal_condition(const Eigen::MatrixXd& a) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0.0;
    return sv(sv.size() - 1) / sv(0);
}

inline void snap_small(Eigen::MatrixXd& m, double rel_tol = 1e-12) {
    const double tol = rel_tol * m.cwiseAbs().maxCoeff();
    m = m.unaryExpr([tol](double v) { return std::abs(v) < tol ? 0.0 : v; });
}

inline void snap_small(Eigen::VectorXd& v, double rel_tol = 1e-12) {
    const double tol = rel_tol * v.cwiseAbs().maxCoeff();
    v = v.unaryExpr([tol](double x) { return std::abs(x) < tol ? 0.0 : x; });
}

}  // namespace detail

// Assemble the node-phase Lagrangian with the reference node phase fixed
// to zero. Retained variables are the remaining nodes in document order,
// labeled "phi_<node>".
inline LagrangianModel build_lagrangian(const Circuit& c) {
    {
        auto report = validate_circuit(c);
        if (!report.empty()) throw ModelError("invalid circuit: " + report.front());
    }
    const std::string ref = c.reference_node();
    LagrangianModel m;
    std::vector<int> var_of_node(c.nodes.size(), -1);
    for (std::size_t i = 0; i < c.nodes.size(); ++i) {
        if (c.nodes[i] == ref) continue;
        var_of_node[i] = m.dim();
        m.labels.push_back("phi_" + c.nodes[i]);
    }
    const int n = m.dim();
    m.kinetic = Eigen::MatrixXd::Zero(n, n);
    m.quad_potential = Eigen::MatrixXd::Zero(n, n);

    auto incidence = [&](const Branch& b) {
        Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
        int ia = var_of_node[c.node_index(b.node_a)];
        int ib = var_of_node[c.node_index(b.node_b)];
        if (ia >= 0) d(ia) += 1.0;
        if (ib >= 0) d(ib) -= 1.0;
        return d;
    };

    for (const auto& b : c.branches) {
        const Eigen::VectorXd d = incidence(b);
        switch (b.kind) {
            case BranchKind::Capacitor:
                m.kinetic += b.value * d * d.transpose();
                break;
            case BranchKind::Inductor:
                m.quad_potential += b.value * d * d.transpose();
                break;
            case BranchKind::Junction:
            case BranchKind::JunctionArray: {
                SinusoidTerm s;
                s.amplitude = -b.value;
                s.direction = d / static_cast<double>(b.array_length);
                s.offset = -b.phase_offset;
                m.sinusoids.push_back(s);
                break;
            }
        }
    }
    // every retained variable needs a kinetic path for the later Legendre
    // transform; a zero row means the capacitance network is singular
    for (int i = 0; i < n; ++i)
        if (m.kinetic.row(i).cwiseAbs().maxCoeff() == 0.0)
            throw ModelError("variable " + m.labels[i] + " has no kinetic term");
    return m;
}

inline LagrangianModel apply_linear_transform(const LagrangianModel& m,
                                              const LinearTransform& t) {
    const int n = m.dim();
    if (t.map.rows() != n || t.map.cols() != n ||
        static_cast<int>(t.labels.size()) != n)
        throw ModelError("transform dimension mismatch");
    if (detail::reciprocal_condition(t.map) < 1e-12)
        throw ModelError("transform is singular or badly conditioned");
    const Eigen::MatrixXd inv = t.map.inverse();
    LagrangianModel out;
    out.labels = t.labels;
    out.kinetic = inv.transpose() * m.kinetic * inv;
    out.quad_potential = inv.transpose() * m.quad_potential * inv;
    out.kinetic = 0.5 * (out.kinetic + out.kinetic.transpose().eval());
    out.quad_potential = 0.5 * (out.quad_potential + out.quad_potential.transpose().eval());
    detail::snap_small(out.kinetic);
    if (out.quad_potential.cwiseAbs().maxCoeff() > 0.0) detail::snap_small(out.quad_potential);
    for (const auto& s : m.sinusoids) {
        SinusoidTerm sn = s;
        sn.direction = inv.transpose() * s.direction;
        detail::snap_small(sn.direction);
        out.sinusoids.push_back(sn);
    }
    return out;
}

// The per-block variable change of the reduced description: per qubit
// block phi_q = phi_a - phi_b, phi_r = phi_a + phi_b - 2 phi_c; connection
// node phases stay as auxiliary variables for the subsequent elimination.
inline LinearTransform standard_block_transform(const Circuit& c) {
    LagrangianModel probe = build_lagrangian(c);  // for variable order/labels
    const int n = probe.dim();
    LinearTransform t;
    t.map = Eigen::MatrixXd::Zero(n, n);
    int row = 0;
    auto var = [&](const std::string& node) { return probe.index_of("phi_" + node); };
    auto add_row = [&](const std::string& label,
                       std::vector<std::pair<std::string, double>> combo) {
        for (const auto& [node, w] : combo)
            if (node != c.reference_node()) t.map(row, var(node)) = w;
        t.labels.push_back(label);
        ++row;
    };

    if (c.name == "qubit_resonator" || c.name == "junction_array_coupler") {
        add_row("phi_q", {{"a", 1.0}, {"b", -1.0}});
        add_row("phi_r", {{"a", 1.0}, {"b", 1.0}, {"c", -2.0}});
    } else if (c.name == "qubit_n_resonators") {
        const int arms = (n - 2) + 1;  // nodes a, b, c1..c_arms with c_arms as reference
        add_row("phi_q", {{"a", 1.0}, {"b", -1.0}});
        for (int j = 1; j <= arms; ++j)
            add_row("phi_r" + std::to_string(j),
                    {{"a", 1.0}, {"b", 1.0}, {"c" + std::to_string(j), -2.0}});
    } else if (c.name == "two_blocks") {
        for (int i = 1; i <= 2; ++i) {
            const std::string si = std::to_string(i);
            add_row("phi_q" + si, {{"a" + si, 1.0}, {"b" + si, -1.0}});
            add_row("phi_r" + si, {{"a" + si, 1.0}, {"b" + si, 1.0}, {"c", -2.0}});
        }
        add_row("phi_cbar", {{"c", 1.0}});
    } else if (c.name == "plaquette") {
        for (int i = 1; i <= 4; ++i) {
            const std::string si = std::to_string(i);
            add_row("phi_q" + si, {{"a" + si, 1.0}, {"b" + si, -1.0}});
        }
        // Around the ring the eight resonator combinations satisfy one
        // linear relation, so only seven are independent coordinates; the
        // pair (block 1, connection 4) is the dependent one. One auxiliary
        // coordinate (c1) completes the basis and carries the cyclic
        // direction.
        const int pairs[7][2] = {{1, 1}, {2, 1}, {2, 2}, {3, 2}, {3, 3}, {4, 3}, {4, 4}};
        for (const auto& pr : pairs) {
            const std::string si = std::to_string(pr[0]), sj = std::to_string(pr[1]);
            add_row("phi_r" + si + "_" + sj,
                    {{"a" + si, 1.0}, {"b" + si, 1.0}, {"c" + sj, -2.0}});
        }
        add_row("phi_aux", {{"c1", 1.0}});
    } else {
        throw ModelError("no standard block transform for circuit '" + c.name + "'");
    }
    if (row != n) throw ModelError("standard transform does not cover all variables");
    return t;
}

// Decouple cyclic variables (absent from the potential) from the kinetic
// form using the rescaled leading Cholesky rows, then drop them. Retained
// variables are left unchanged; the full transform is returned for audit,
// with eliminated variables relabeled "<name>*".
inline std::pair<LagrangianModel, LinearTransform> cholesky_eliminate(
    const LagrangianModel& m, const std::set<std::string>& cyclic) {
    const int n = m.dim();
    std::vector<int> cyc, ret;
    for (int i = 0; i < n; ++i) {
        if (cyclic.count(m.labels[i]))
            cyc.push_back(i);
        else
            ret.push_back(i);
    }
    if (static_cast<int>(cyc.size()) != static_cast<int>(cyclic.size()))
        throw ModelError("cholesky_eliminate: unknown variable in cyclic set");
    const int p = static_cast<int>(cyc.size());
    const int r = static_cast<int>(ret.size());
    if (p == 0) throw ModelError("cholesky_eliminate: empty cyclic set");

    const double pot_tol = 1e-9 * std::max(1.0, m.quad_potential.cwiseAbs().maxCoeff());
    for (int i : cyc) {
        if (m.quad_potential.row(i).cwiseAbs().maxCoeff() > pot_tol)
            throw ModelError("variable " + m.labels[i] + " appears in the quadratic potential");
        for (const auto& s : m.sinusoids) {
            const double dir_tol = 1e-9 * s.direction.cwiseAbs().maxCoeff();
            if (std::abs(s.direction(i)) > dir_tol)
                throw ModelError("variable " + m.labels[i] + " appears in a sinusoid");
        }
    }

    Eigen::MatrixXd A(p, p), B(p, r), D(r, r);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) A(i, j) = m.kinetic(cyc[i], cyc[j]);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < r; ++j) B(i, j) = m.kinetic(cyc[i], ret[j]);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) D(i, j) = m.kinetic(ret[i], ret[j]);

    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success)
        throw ModelError("cyclic kinetic block is not positive definite");
    const Eigen::MatrixXd X = llt.solve(B);  // A^{-1} B, the rescaled Cholesky rows

    LinearTransform full;
    full.map = Eigen::MatrixXd::Identity(n, n);
    full.labels = m.labels;
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < r; ++j) full.map(cyc[i], ret[j]) = X(i, j);
        full.labels[cyc[i]] = m.labels[cyc[i]] + "*";
    }

    LagrangianModel out;
    for (int j = 0; j < r; ++j) out.labels.push_back(m.labels[ret[j]]);
    out.kinetic = D - B.transpose() * X;
    out.kinetic = 0.5 * (out.kinetic + out.kinetic.transpose().eval());
    out.quad_potential.resize(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) out.quad_potential(i, j) = m.quad_potential(ret[i], ret[j]);
    for (const auto& s : m.sinusoids) {
        SinusoidTerm sn;
        sn.amplitude = s.amplitude;
        sn.offset = s.offset;
        sn.direction.resize(r);
        for (int j = 0; j < r; ++j) sn.direction(j) = s.direction(ret[j]);
        out.sinusoids.push_back(sn);
    }
    return {out, full};
}

// Undamped normal-mode angular frequencies of the quadratic part,
// ascending. Kinetic form must be positive definite.
inline Eigen::VectorXd quadratic_normal_modes(const Eigen::MatrixXd& kinetic,
                                              const Eigen::MatrixXd& quad_potential) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(quad_potential, kinetic);
    if (es.info() != Eigen::Success)
        throw ModelError("generalized eigenproblem failed (kinetic form not SPD?)");
    Eigen::VectorXd w = es.eigenvalues();
    return w.unaryExpr([](double v) { return v > 0.0 ? std::sqrt(v) : 0.0; });
}

}  // namespace fluxlattice

#endif
