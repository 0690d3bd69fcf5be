#include <catch2/catch_amalgamated.hpp>

#include "fluxlattice/netlist.hpp"

using namespace fluxlattice;

static const char* minimal_doc = R"({
  "name": "minimal",
  "nodes": ["a", "b"],
  "ground": null,
  "branches": [
    {"kind": "C", "nodes": ["a", "b"], "value": 100.0, "unit": "fF"}
  ]
})";

TEST_CASE("minimal capacitor document parses") {
    const Circuit c = parse_netlist(minimal_doc);
    CHECK(c.nodes.size() == 2);
    REQUIRE(c.branches.size() == 1);
    CHECK(c.branches[0].kind == BranchKind::Capacitor);
    CHECK(c.branches[0].raw_value == 100.0);
    CHECK(c.branches[0].value == Catch::Approx(units::capacitance_coeff(100e-15)));
    CHECK(validate_circuit(c).empty());
}

TEST_CASE("parse failures") {
    CHECK_THROWS_AS(parse_netlist("not json"), ParseError);
    CHECK_THROWS_AS(
        parse_netlist(R"({"nodes":["a","b"],"branches":[
            {"kind":"C","nodes":["a","z"],"value":1.0,"unit":"fF"}]})"),
        ParseError);
    CHECK_THROWS_AS(
        parse_netlist(R"({"nodes":["a","b"],"branches":[
            {"kind":"C","nodes":["a","b"],"value":-1.0,"unit":"fF"}]})"),
        ParseError);
    CHECK_THROWS_AS(
        parse_netlist(R"({"nodes":["a","b"],"branches":[
            {"kind":"X","nodes":["a","b"],"value":1.0,"unit":"fF"}]})"),
        ParseError);
}

TEST_CASE("serialize then parse is the identity") {
    for (const char* name : {"qubit_resonator", "two_blocks", "plaquette"}) {
        const Circuit c = builtin_circuit(name);
        const std::string text = serialize_netlist(c);
        const Circuit back = parse_netlist(text);
        CHECK(serialize_netlist(back) == text);
        REQUIRE(back.branches.size() == c.branches.size());
        for (std::size_t i = 0; i < c.branches.size(); ++i) {
            CHECK(back.branches[i].value == c.branches[i].value);
            CHECK(back.branches[i].phase_offset == c.branches[i].phase_offset);
        }
    }
}

TEST_CASE("every builtin validates clean") {
    for (const char* name : {"qubit_resonator", "junction_array_coupler",
                             "qubit_n_resonators", "two_blocks", "plaquette"}) {
        const Circuit c = builtin_circuit(name);
        INFO(name);
        CHECK(validate_circuit(c).empty());
    }
    CHECK_THROWS_AS(builtin_circuit("no_such_topology"), ModelError);
}

TEST_CASE("single-block topology") {
    const Circuit c = builtin_circuit("qubit_resonator");
    CHECK(c.nodes == std::vector<std::string>{"a", "b", "c"});
    // C_q + E_Jq across a-b, then {C, L, JJ} per arm
    CHECK(c.branches.size() == 8);
    int biased = 0;
    for (const auto& b : c.branches)
        if (b.phase_offset != 0.0) {
            ++biased;
            CHECK(b.phase_offset == Catch::Approx(std::numbers::pi / 2.0));
        }
    CHECK(biased == 2);
}

TEST_CASE("junction array splits the flux bias per junction") {
    const Circuit c = builtin_circuit("junction_array_coupler", {{"k", 5.0}});
    int arrays = 0;
    for (const auto& b : c.branches)
        if (b.kind == BranchKind::JunctionArray) {
            ++arrays;
            CHECK(b.array_length == 5);
            CHECK(b.phase_offset == Catch::Approx(std::numbers::pi / 10.0));
        }
    CHECK(arrays == 2);
}

TEST_CASE("two_blocks stray capacitance is optional") {
    const Circuit plain = builtin_circuit("two_blocks");
    const Circuit stray = builtin_circuit("two_blocks", {{"C_s", 5.0}});
    auto has_cg_branch = [](const Circuit& c) {
        for (const auto& b : c.branches)
            if (b.kind == BranchKind::Capacitor &&
                ((b.node_a == "c" && b.node_b == "g") || (b.node_a == "g" && b.node_b == "c")))
                return true;
        return false;
    };
    CHECK_FALSE(has_cg_branch(plain));
    CHECK(has_cg_branch(stray));
    CHECK(stray.ground.has_value());
    CHECK(*stray.ground == "g");
}

TEST_CASE("validation reports are data, not exceptions") {
    Circuit c = builtin_circuit("qubit_resonator");
    c.nodes.push_back("orphan");
    const ValidationReport rep = validate_circuit(c);
    REQUIRE_FALSE(rep.empty());
    bool found = false;
    for (const auto& v : rep)
        if (v.find("disconnected") != std::string::npos) found = true;
    CHECK(found);

    Circuit dup = builtin_circuit("qubit_resonator");
    dup.nodes.push_back("a");
    bool dup_found = false;
    for (const auto& v : validate_circuit(dup))
        if (v.find("duplicate") != std::string::npos) dup_found = true;
    CHECK(dup_found);

    Circuit selfloop = builtin_circuit("qubit_resonator");
    selfloop.branches[0].node_b = selfloop.branches[0].node_a;
    CHECK_FALSE(validate_circuit(selfloop).empty());
}

TEST_CASE("qubit_n_resonators grows with n") {
    const Circuit c = builtin_circuit("qubit_n_resonators", {{"n", 3.0}});
    CHECK(c.nodes.size() == 5);
    // qubit pair + 3 arms x 6 branches
    CHECK(c.branches.size() == 2 + 3 * 6);
    CHECK(validate_circuit(c).empty());
}
