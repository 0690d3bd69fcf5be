#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fluxlattice/dynamics.hpp"
#include "fluxlattice/netlist.hpp"
#include "fluxlattice/quantize.hpp"
#include "fluxlattice/report.hpp"
#include "fluxlattice/spectra.hpp"

namespace fl = fluxlattice;

namespace {

struct InputOpts {
    std::string input_path;
    std::string builtin;
    std::vector<std::string> params;
};

void add_input_opts(CLI::App* cmd, InputOpts& in) {
    auto* path = cmd->add_option("--input", in.input_path, "netlist JSON file");
    auto* name = cmd->add_option("--builtin", in.builtin,
                                 "built-in circuit name (qubit_resonator, "
                                 "junction_array_coupler, qubit_n_resonators, two_blocks, "
                                 "plaquette)");
    path->excludes(name);
    cmd->add_option("--param", in.params, "builtin parameter override key=value")
        ->expected(-1);
}

fl::Circuit load_circuit(const InputOpts& in) {
    if (!in.input_path.empty()) {
        std::ifstream f(in.input_path);
        if (!f) throw fl::ParseError("cannot open '" + in.input_path + "'");
        std::stringstream ss;
        ss << f.rdbuf();
        return fl::parse_netlist(ss.str());
    }
    if (in.builtin.empty()) throw fl::ParseError("need --input or --builtin");
    fl::ParamTable table;
    for (const auto& kv : in.params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw fl::ParseError("bad --param '" + kv + "'");
        table[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    }
    return fl::builtin_circuit(in.builtin, table);
}

void emit(const std::string& text, const std::string& output_path) {
    if (output_path.empty())
        std::cout << text;
    else
        fl::write_file(output_path, text);
}

// Scale the two flux-biased arm junctions by (1 -+ d) to introduce a
// controlled asymmetry.
void apply_asymmetry(fl::Circuit& c, double d) {
    int seen = 0;
    for (auto& b : c.branches) {
        const bool arm = (b.kind == fl::BranchKind::Junction ||
                          b.kind == fl::BranchKind::JunctionArray) &&
                         b.phase_offset != 0.0;
        if (!arm) continue;
        const double factor = seen % 2 == 0 ? 1.0 - d : 1.0 + d;
        b.value *= factor;
        b.raw_value *= factor;
        ++seen;
    }
    if (seen == 0) throw fl::ModelError("circuit has no flux-biased arm junctions");
}

fl::SpinBosonModel model_from_json(const nlohmann::json& j) {
    fl::SpinBosonModel m;
    for (const auto& q : j.at("qubits"))
        m.qubits.push_back({q.at("label").get<std::string>(), q.at("delta").get<double>()});
    for (const auto& r : j.at("resonators"))
        m.resonators.push_back(
            {r.at("label").get<std::string>(), r.at("omega").get<double>()});
    // mode references may be integer indices or labels
    auto qubit_ref = [&](const nlohmann::json& v) {
        if (v.is_number_integer()) return v.get<int>();
        const std::string label = v.get<std::string>();
        for (std::size_t i = 0; i < m.qubits.size(); ++i)
            if (m.qubits[i].label == label) return static_cast<int>(i);
        throw fl::ModelError("unknown qubit '" + label + "'");
    };
    auto resonator_ref = [&](const nlohmann::json& v) {
        if (v.is_number_integer()) return v.get<int>();
        const std::string label = v.get<std::string>();
        for (std::size_t i = 0; i < m.resonators.size(); ++i)
            if (m.resonators[i].label == label) return static_cast<int>(i);
        throw fl::ModelError("unknown resonator '" + label + "'");
    };
    for (const auto& c : j.value("couplings", nlohmann::json::array())) {
        const std::string parity = c.value("parity", "longitudinal");
        m.couplings.push_back({qubit_ref(c.at("qubit")), resonator_ref(c.at("resonator")),
                               c.at("g").get<double>(),
                               parity == "transverse" ? fl::CouplingParity::Transverse
                                                      : fl::CouplingParity::Longitudinal,
                               0.0});
    }
    for (const auto& c : j.value("resonator_couplings", nlohmann::json::array()))
        m.resonator_couplings.push_back({resonator_ref(c.at("r1")),
                                         resonator_ref(c.at("r2")),
                                         c.at("g_c").get<double>()});
    m.check();
    return m;
}

fl::DriveSpec drive_from_json(const nlohmann::json& j) {
    fl::DriveSpec d;
    d.target_qubit = j.at("target").get<std::string>();
    d.amplitude = j.at("amplitude").get<double>();
    d.phase = j.value("phase", 0.0);
    d.ramp_time = j.value("ramp_time", 0.0);
    d.envelope = j.value("envelope", std::string("constant")) == "cosine-ramp"
                     ? fl::DriveEnvelope::CosineRamp
                     : fl::DriveEnvelope::Constant;
    d.duration = j.at("duration").get<double>();
    d.kind = j.value("kind", std::string("voltage")) == "flux" ? fl::DriveKind::Flux
                                                               : fl::DriveKind::Voltage;
    return d;
}

int run(int argc, char** argv) {
    CLI::App app{"circuit quantization and longitudinal-coupling toolkit"};
    app.require_subcommand(1);
    long seed = 0;
    app.add_option("--seed", seed, "seed for sampling checks (determinism contract)");

    InputOpts in;
    std::string output_path, format = "json", config_path, points_path, omega_list;
    int levels = 16, truncation = 10, grid = 201;
    double asymmetry = 0.0, gc_min = 0.02, gc_max = 0.3, guard = 0.01;

    auto* validate = app.add_subcommand("validate", "check a netlist");
    add_input_opts(validate, in);

    auto* reduce = app.add_subcommand("reduce", "dump the reduced Lagrangian");
    add_input_opts(reduce, in);
    reduce->add_option("--output", output_path);

    auto* params = app.add_subcommand("params", "derived circuit parameters");
    add_input_opts(params, in);
    params->add_option("--output", output_path);

    auto* spectrum = app.add_subcommand("spectrum", "lowest levels of the reduced model");
    add_input_opts(spectrum, in);
    spectrum->add_option("--output", output_path);
    spectrum->add_option("--levels", levels, "levels to report");
    spectrum->add_option("--truncation", truncation, "resonator Fock levels");
    spectrum->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

    auto* classify = app.add_subcommand("classify", "coupling parity of a block");
    add_input_opts(classify, in);
    classify->add_option("--output", output_path);
    classify->add_option("--asymmetry", asymmetry, "junction asymmetry d");

    auto* scan = app.add_subcommand("scan", "sideband scan from a JSON config");
    scan->add_option("--config", config_path, "scan config JSON")->required();
    scan->add_option("--output", output_path);
    scan->add_option("--points", points_path, "also write the raw scan points CSV");

    auto* plan = app.add_subcommand("plan", "grid coupler frequency plan");
    plan->add_option("--omega", omega_list, "comma-separated bare frequencies per connection")
        ->required();
    plan->add_option("--gc-min", gc_min);
    plan->add_option("--gc-max", gc_max);
    plan->add_option("--guard", guard);
    plan->add_option("--grid", grid);
    plan->add_option("--output", output_path);

    CLI11_PARSE(app, argc, argv);

    if (validate->parsed()) {
        const fl::Circuit c = load_circuit(in);
        const fl::ValidationReport report = fl::validate_circuit(c);
        if (!report.empty()) {
            for (const auto& v : report) std::cerr << v << '\n';
            return 1;
        }
        std::cout << "ok: " << c.name << " (" << c.nodes.size() << " nodes, "
                  << c.branches.size() << " branches)\n";
        return 0;
    }
    if (reduce->parsed()) {
        const fl::Circuit c = load_circuit(in);
        fl::LagrangianModel red = fl::apply_linear_transform(
            fl::build_lagrangian(c), fl::standard_block_transform(c));
        fl::ordered_json j;
        j["transformed"] = fl::lagrangian_json(red);
        std::set<std::string> cyclic;
        for (const auto& name : {"phi_cbar", "phi_aux"})
            if (std::find(red.labels.begin(), red.labels.end(), name) != red.labels.end())
                cyclic.insert(name);
        if (!cyclic.empty()) {
            const auto [elim, audit] = fl::cholesky_eliminate(red, cyclic);
            j["eliminated"] = fl::lagrangian_json(elim);
            j["elimination_variables"] = audit.labels;
        }
        emit(j.dump(2) + "\n", output_path);
        return 0;
    }
    if (params->parsed()) {
        const fl::Circuit c = load_circuit(in);
        emit(fl::derived_parameters_json(fl::derived_parameters(c)).dump(2) + "\n",
             output_path);
        return 0;
    }
    if (spectrum->parsed()) {
        const fl::Circuit c = load_circuit(in);
        const fl::HamiltonianModel h = fl::reduce_circuit(c);
        const fl::TwoLevelReduction red = fl::two_level_reduce(h);
        const fl::FockOperator H = fl::spin_boson_fock(red.model, truncation);
        const fl::SpectrumReport rep = fl::eigensystem(H, levels);
        emit(format == "csv" ? fl::spectrum_csv(rep, levels)
                             : fl::spectrum_json(rep, levels).dump(2) + "\n",
             output_path);
        return 0;
    }
    if (classify->parsed()) {
        fl::Circuit c = load_circuit(in);
        if (asymmetry != 0.0) apply_asymmetry(c, asymmetry);
        const fl::HamiltonianModel h = fl::reduce_circuit(c);
        const fl::ParityAmplitudes amp = fl::classify_block(h);
        emit(fl::classify_json(amp).dump(2) + "\n", output_path);
        return 0;
    }
    if (scan->parsed()) {
        std::ifstream f(config_path);
        if (!f) throw fl::ParseError("cannot open '" + config_path + "'");
        nlohmann::json cfg;
        f >> cfg;
        const fl::SpinBosonModel m = model_from_json(cfg.at("model"));
        const fl::DriveSpec d = drive_from_json(cfg.at("drive"));
        const auto& sc = cfg.at("scan");
        const fl::ScanResult res = fl::sideband_scan(
            m, d, sc.at("omega_min").get<double>(), sc.at("omega_max").get<double>(),
            sc.at("steps").get<int>(), sc.value("resonator_dim", 5), sc.value("dt", 0.0),
            sc.value("record_stride", 4));
        emit(fl::resonance_csv(res), output_path);
        if (!points_path.empty()) fl::write_file(points_path, fl::scan_points_csv(res));
        return 0;
    }
    if (plan->parsed()) {
        std::vector<double> omega;
        std::stringstream ss(omega_list);
        std::string tok;
        while (std::getline(ss, tok, ',')) omega.push_back(std::stod(tok));
        const fl::FrequencyPlan p = fl::frequency_plan(omega, {gc_min, gc_max}, guard, grid);
        fl::verify_frequency_plan(p);
        emit(fl::frequency_plan_json(p).dump(2) + "\n", output_path);
        return 0;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const fl::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 2;
    } catch (const fl::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
