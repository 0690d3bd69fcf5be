#ifndef FLUXLATTICE_NETLIST_HPP
#define FLUXLATTICE_NETLIST_HPP

#include <algorithm>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fluxlattice/constants.hpp"
#include "fluxlattice/errors.hpp"

namespace fluxlattice {

enum class BranchKind { Capacitor, Inductor, Junction, JunctionArray };

// One circuit element between two nodes. `value` is stored in canonical
// units (see constants.hpp); `raw_value`/`unit` keep the document form so
// serialization round-trips bit-exactly.
struct Branch {
    BranchKind kind = BranchKind::Capacitor;
    std::string node_a;
    std::string node_b;
    double value = 0.0;      // canonical units
    double raw_value = 0.0;  // as written in the document
    std::string unit;        // "fF" | "nH" | "GHz"
    double phase_offset = 0.0;  // radians, junctions only
    int array_length = 1;       // JunctionArray only
};

struct Circuit {
    std::string name;
    std::vector<std::string> nodes;
    std::optional<std::string> ground;
    std::vector<Branch> branches;

    int node_index(const std::string& n) const {
        auto it = std::find(nodes.begin(), nodes.end(), n);
        return it == nodes.end() ? -1 : static_cast<int>(it - nodes.begin());
    }
    // The phase reference: the flagged ground node, else the last node.
    std::string reference_node() const {
        if (ground) return *ground;
        if (nodes.empty()) throw ModelError("circuit has no nodes");
        return nodes.back();
    }
};

using ValidationReport = std::vector<std::string>;

namespace detail {

inline double canonical_value(BranchKind kind, double raw, const std::string& unit) {
    if (kind == BranchKind::Capacitor) {
        if (unit != "fF") throw ParseError("capacitor value must be given in fF");
        return units::capacitance_coeff(units::femtofarad(raw));
    }
    if (kind == BranchKind::Inductor) {
        if (unit != "nH") throw ParseError("inductor value must be given in nH");
        return units::inductance_coeff(units::nanohenry(raw));
    }
    if (unit != "GHz") throw ParseError("junction energy must be given in GHz");
    return units::josephson_energy(raw);
}

inline BranchKind kind_from_string(const std::string& s) {
    if (s == "C") return BranchKind::Capacitor;
    if (s == "L") return BranchKind::Inductor;
    if (s == "JJ") return BranchKind::Junction;
    if (s == "JJ_ARRAY") return BranchKind::JunctionArray;
    throw ParseError("unknown branch kind '" + s + "'");
}

inline std::string kind_to_string(BranchKind k) {
    switch (k) {
        case BranchKind::Capacitor: return "C";
        case BranchKind::Inductor: return "L";
        case BranchKind::Junction: return "JJ";
        case BranchKind::JunctionArray: return "JJ_ARRAY";
    }
    return "?";
}

}  // namespace detail

// Flux offsets are stored per junction branch as a phase offset in
// [0, 2pi), accumulated along the branch taken in its (node_a -> node_b)
// document orientation; the implied spanning-tree convention is that all
// offsets sit on the junction branches, never on capacitors or inductors.
inline Circuit parse_netlist(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("netlist syntax error: ") + e.what());
    }
    Circuit c;
    try {
        c.name = doc.value("name", "");
        for (const auto& n : doc.at("nodes")) c.nodes.push_back(n.get<std::string>());
        if (doc.contains("ground") && !doc["ground"].is_null())
            c.ground = doc["ground"].get<std::string>();
        for (const auto& jb : doc.at("branches")) {
            Branch b;
            b.kind = detail::kind_from_string(jb.at("kind").get<std::string>());
            b.node_a = jb.at("nodes").at(0).get<std::string>();
            b.node_b = jb.at("nodes").at(1).get<std::string>();
            b.raw_value = jb.at("value").get<double>();
            b.unit = jb.at("unit").get<std::string>();
            if (b.raw_value <= 0.0)
                throw ParseError("non-positive element value on branch " + b.node_a + "-" + b.node_b);
            b.value = detail::canonical_value(b.kind, b.raw_value, b.unit);
            if (jb.contains("phase_offset")) b.phase_offset = jb["phase_offset"].get<double>();
            if (jb.contains("k")) b.array_length = jb["k"].get<int>();
            if (b.array_length < 1) throw ParseError("junction array length k must be >= 1");
            if (c.node_index(b.node_a) < 0)
                throw ParseError("branch references undeclared node '" + b.node_a + "'");
            if (c.node_index(b.node_b) < 0)
                throw ParseError("branch references undeclared node '" + b.node_b + "'");
            c.branches.push_back(b);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("netlist schema error: ") + e.what());
    }
    return c;
}

inline std::string serialize_netlist(const Circuit& c) {
    nlohmann::json doc;
    doc["name"] = c.name;
    doc["nodes"] = c.nodes;
    doc["ground"] = c.ground ? nlohmann::json(*c.ground) : nlohmann::json(nullptr);
    auto& br = doc["branches"] = nlohmann::json::array();
    for (const auto& b : c.branches) {
        nlohmann::json jb;
        jb["kind"] = detail::kind_to_string(b.kind);
        jb["nodes"] = {b.node_a, b.node_b};
        jb["value"] = b.raw_value;
        jb["unit"] = b.unit;
        if (b.kind == BranchKind::Junction || b.kind == BranchKind::JunctionArray)
            jb["phase_offset"] = b.phase_offset;
        if (b.kind == BranchKind::JunctionArray) jb["k"] = b.array_length;
        br.push_back(jb);
    }
    return doc.dump(2);
}

inline ValidationReport validate_circuit(const Circuit& c) {
    ValidationReport report;
    if (c.nodes.empty()) report.push_back("circuit declares no nodes");
    for (std::size_t i = 0; i < c.nodes.size(); ++i)
        for (std::size_t j = i + 1; j < c.nodes.size(); ++j)
            if (c.nodes[i] == c.nodes[j])
                report.push_back("duplicate node '" + c.nodes[i] + "'");
    if (c.ground && c.node_index(*c.ground) < 0)
        report.push_back("ground node '" + *c.ground + "' is not declared");
    for (const auto& b : c.branches) {
        if (c.node_index(b.node_a) < 0)
            report.push_back("branch references undeclared node '" + b.node_a + "'");
        if (c.node_index(b.node_b) < 0)
            report.push_back("branch references undeclared node '" + b.node_b + "'");
        if (b.node_a == b.node_b)
            report.push_back("branch endpoints coincide at node '" + b.node_a + "'");
        if (b.raw_value <= 0.0)
            report.push_back("non-positive value on branch " + b.node_a + "-" + b.node_b);
        if (b.phase_offset < 0.0 || b.phase_offset >= units::two_pi)
            report.push_back("phase offset outside [0, 2pi) on branch " + b.node_a + "-" + b.node_b);
        if (b.array_length < 1)
            report.push_back("array length k < 1 on branch " + b.node_a + "-" + b.node_b);
    }
    // connectivity over declared nodes
    if (!c.nodes.empty()) {
        std::vector<int> comp(c.nodes.size(), -1);
        std::vector<int> stack{0};
        comp[0] = 0;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (const auto& b : c.branches) {
                int ia = c.node_index(b.node_a), ib = c.node_index(b.node_b);
                if (ia < 0 || ib < 0) continue;
                int v = -1;
                if (ia == u) v = ib;
                if (ib == u) v = ia;
                if (v >= 0 && comp[v] < 0) {
                    comp[v] = 0;
                    stack.push_back(v);
                }
            }
        }
        if (std::any_of(comp.begin(), comp.end(), [](int x) { return x < 0; }))
            report.push_back("disconnected: some nodes are unreachable from '" + c.nodes[0] + "'");
    }
    return report;
}

// ---------------------------------------------------------------------------
// Built-in circuit generators, one per studied topology. Parameter values
// are configuration defaults, not physics claims. Capacitances in fF,
// inductances in nH, Josephson energies in h*GHz.

using ParamTable = std::map<std::string, double>;

namespace detail {

inline double param(const ParamTable& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

inline Branch make_branch(BranchKind kind, const std::string& a, const std::string& b,
                          double raw, const std::string& unit, double offset = 0.0,
                          int k = 1) {
    Branch br;
    br.kind = kind;
    br.node_a = a;
    br.node_b = b;
    br.raw_value = raw;
    br.unit = unit;
    br.value = canonical_value(kind, raw, unit);
    br.phase_offset = offset;
    br.array_length = k;
    return br;
}

// One resonator arm pair: C, L and a flux-biased junction from each qubit
// node to the common c node. Junction offset pi/2 realizes the
// quarter-flux-quantum bias per loop; for an array of k junctions the
// per-junction offset is pi/(2k).
inline void add_resonator_arms(Circuit& c, const std::string& na, const std::string& nb,
                               const std::string& nc, double C, double L, double EJ,
                               int k = 1) {
    const double offset = std::numbers::pi / (2.0 * k);
    for (const auto& top : {na, nb}) {
        c.branches.push_back(make_branch(BranchKind::Capacitor, top, nc, C, "fF"));
        c.branches.push_back(make_branch(BranchKind::Inductor, top, nc, L, "nH"));
        if (k == 1)
            c.branches.push_back(make_branch(BranchKind::Junction, top, nc, EJ, "GHz", offset));
        else
            c.branches.push_back(
                make_branch(BranchKind::JunctionArray, top, nc, EJ, "GHz", offset, k));
    }
}

inline void add_qubit(Circuit& c, const std::string& na, const std::string& nb, double Cq,
                      double EJq) {
    c.branches.push_back(make_branch(BranchKind::Capacitor, na, nb, Cq, "fF"));
    c.branches.push_back(make_branch(BranchKind::Junction, na, nb, EJq, "GHz"));
}

}  // namespace detail

inline Circuit builtin_circuit(const std::string& name, const ParamTable& p = {}) {
    using detail::add_qubit;
    using detail::add_resonator_arms;
    using detail::make_branch;
    using detail::param;
    Circuit c;
    c.name = name;
    const double Cq = param(p, "C_q", 500.0);
    const double C = param(p, "C", 100.0);
    const double L = param(p, "L", 10.0);
    const double EJq = param(p, "E_Jq", 20.0);
    const double EJ = param(p, "E_J", 0.5);
    const double Cg = param(p, "C_g", 10.0);

    if (name == "qubit_resonator") {
        c.nodes = {"a", "b", "c"};
        add_qubit(c, "a", "b", Cq, EJq);
        add_resonator_arms(c, "a", "b", "c", C, L, EJ);
        return c;
    }
    if (name == "junction_array_coupler") {
        const int k = static_cast<int>(param(p, "k", 3.0));
        if (k < 1) throw ModelError("junction_array_coupler requires k >= 1");
        c.nodes = {"a", "b", "c"};
        add_qubit(c, "a", "b", Cq, EJq);
        add_resonator_arms(c, "a", "b", "c", C, L, EJ, k);
        return c;
    }
    if (name == "qubit_n_resonators") {
        const int n = static_cast<int>(param(p, "n", 2.0));
        if (n < 1) throw ModelError("qubit_n_resonators requires n >= 1");
        c.nodes = {"a", "b"};
        for (int j = 1; j <= n; ++j) c.nodes.push_back("c" + std::to_string(j));
        add_qubit(c, "a", "b", Cq, EJq);
        for (int j = 1; j <= n; ++j) {
            const std::string sj = std::to_string(j);
            add_resonator_arms(c, "a", "b", "c" + sj, param(p, "C_" + sj, C),
                               param(p, "L_" + sj, L), param(p, "E_J_" + sj, EJ));
        }
        return c;
    }
    if (name == "two_blocks") {
        const double Cs = param(p, "C_s", 0.0);
        c.nodes = {"a1", "b1", "a2", "b2", "c", "g"};
        c.ground = "g";
        for (int i = 1; i <= 2; ++i) {
            const std::string si = std::to_string(i);
            const std::string na = "a" + si, nb = "b" + si;
            add_qubit(c, na, nb, param(p, "C_q" + si, Cq), param(p, "E_Jq" + si, EJq));
            add_resonator_arms(c, na, nb, "c", param(p, "C_" + si, C), param(p, "L_" + si, L),
                               param(p, "E_J_" + si, EJ));
            // one ground capacitance per qubit node for the single connection
            c.branches.push_back(make_branch(BranchKind::Capacitor, na, "g", Cg, "fF"));
            c.branches.push_back(make_branch(BranchKind::Capacitor, nb, "g", Cg, "fF"));
        }
        if (Cs > 0.0)
            c.branches.push_back(make_branch(BranchKind::Capacitor, "c", "g", Cs, "fF"));
        return c;
    }
    if (name == "plaquette") {
        // Four qubit blocks in a ring; connection j joins blocks j and j+1
        // at node cj. Each qubit node carries one ground capacitance per
        // connection its block participates in.
        c.nodes = {"a1", "b1", "a2", "b2", "a3", "b3", "a4", "b4",
                   "c1", "c2", "c3", "c4", "g"};
        c.ground = "g";
        for (int i = 1; i <= 4; ++i) {
            const std::string si = std::to_string(i);
            add_qubit(c, "a" + si, "b" + si, param(p, "C_q" + si, Cq),
                      param(p, "E_Jq" + si, EJq));
        }
        for (int j = 1; j <= 4; ++j) {
            const std::string sj = std::to_string(j);
            const int i1 = j, i2 = (j % 4) + 1;
            const double Cgj = param(p, "C_g" + sj, Cg);
            for (int i : {i1, i2}) {
                const std::string si = std::to_string(i);
                add_resonator_arms(c, "a" + si, "b" + si, "c" + sj,
                                   param(p, "C_" + si + "_" + sj, C),
                                   param(p, "L_" + si + "_" + sj, L),
                                   param(p, "E_J_" + si + "_" + sj, EJ));
                c.branches.push_back(
                    make_branch(BranchKind::Capacitor, "a" + si, "g", Cgj, "fF"));
                c.branches.push_back(
                    make_branch(BranchKind::Capacitor, "b" + si, "g", Cgj, "fF"));
            }
        }
        return c;
    }
    throw ModelError("unknown builtin circuit '" + name + "'");
}

}  // namespace fluxlattice

#endif
