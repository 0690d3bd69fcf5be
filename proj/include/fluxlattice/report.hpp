#ifndef FLUXLATTICE_REPORT_HPP
#define FLUXLATTICE_REPORT_HPP

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fluxlattice/constants.hpp"
#include "fluxlattice/dynamics.hpp"
#include "fluxlattice/errors.hpp"
#include "fluxlattice/lagrangian.hpp"
#include "fluxlattice/quantize.hpp"
#include "fluxlattice/spectra.hpp"

namespace fluxlattice {

using ordered_json = nlohmann::ordered_json;

// Deterministic float formatting: 12 significant digits everywhere.
inline std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

// Round through the 12-digit form so JSON dumps are byte-stable too.
inline double json_number(double x) { return std::strtod(format_number(x).c_str(), nullptr); }

inline ordered_json json_vector(const std::vector<double>& v) {
    ordered_json a = ordered_json::array();
    for (double x : v) a.push_back(json_number(x));
    return a;
}

inline ordered_json json_matrix(const Eigen::MatrixXd& m) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(json_number(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

namespace detail {

inline bool qubit_mode_label(const std::string& label) {
    return label.rfind("phi_q", 0) == 0 || (!label.empty() && label[0] == 'q');
}

}  // namespace detail

inline std::string spectrum_csv(const SpectrumReport& rep, int max_levels = -1) {
    std::ostringstream out;
    out << "index,energy,qubit_label,photon_label\n";
    const int n = max_levels < 0
                      ? static_cast<int>(rep.levels.size())
                      : std::min<int>(max_levels, static_cast<int>(rep.levels.size()));
    for (int i = 0; i < n; ++i) {
        std::string qlab, plab;
        for (std::size_t k = 0; k < rep.mode_labels.size(); ++k) {
            const int occ = rep.levels[i].occupation[k];
            if (detail::qubit_mode_label(rep.mode_labels[k]) && rep.dims[k] == 2) {
                qlab += occ == 0 ? 'g' : 'e';
            } else {
                if (!plab.empty()) plab += ':';
                plab += std::to_string(occ);
            }
        }
        out << i << ',' << format_number(rep.levels[i].energy) << ',' << qlab << ',' << plab
            << '\n';
    }
    return out.str();
}

inline ordered_json spectrum_json(const SpectrumReport& rep, int max_levels = -1) {
    ordered_json j;
    j["mode_labels"] = rep.mode_labels;
    j["dims"] = rep.dims;
    ordered_json levels = ordered_json::array();
    const int n = max_levels < 0
                      ? static_cast<int>(rep.levels.size())
                      : std::min<int>(max_levels, static_cast<int>(rep.levels.size()));
    for (int i = 0; i < n; ++i) {
        ordered_json lvl;
        lvl["index"] = i;
        lvl["energy"] = json_number(rep.levels[i].energy);
        lvl["occupation"] = rep.levels[i].occupation;
        lvl["overlap"] = json_number(rep.levels[i].overlap);
        levels.push_back(lvl);
    }
    j["levels"] = levels;
    return j;
}

inline ordered_json derived_parameters_json(const DerivedParameters& p) {
    const double to_ghz = 1.0 / (units::two_pi * 1e9);
    ordered_json j;
    ordered_json qubits = ordered_json::array();
    for (const auto& q : p.qubits) {
        ordered_json jq;
        jq["label"] = q.label;
        jq["E_C_GHz"] = json_number(q.E_C * to_ghz);
        jq["E_J_GHz"] = json_number(q.E_J * to_ghz);
        jq["E_J_star_GHz"] = json_number(q.E_J_star * to_ghz);
        jq["gap_GHz"] = json_number(q.gap * to_ghz);
        jq["anharmonicity_GHz"] = json_number(q.anharmonicity * to_ghz);
        qubits.push_back(jq);
    }
    j["qubits"] = qubits;
    ordered_json resonators = ordered_json::array();
    for (const auto& r : p.resonators) {
        ordered_json jr;
        jr["label"] = r.label;
        jr["frequency_GHz"] = json_number(r.omega * to_ghz);
        jr["zero_point_phase"] = json_number(r.r_zpf);
        jr["zero_point_charge"] = json_number(r.n_zpf);
        resonators.push_back(jr);
    }
    j["resonators"] = resonators;
    ordered_json pairs = ordered_json::array();
    for (const auto& c : p.pair_couplings) {
        ordered_json jc;
        jc["qubit"] = c.qubit;
        jc["resonator"] = c.resonator;
        jc["g1_GHz"] = json_number(c.g1 * to_ghz);
        pairs.push_back(jc);
    }
    j["longitudinal_couplings"] = pairs;
    ordered_json conns = ordered_json::array();
    for (const auto& c : p.connection_couplings) {
        ordered_json jc;
        jc["resonator_1"] = c.r1;
        jc["resonator_2"] = c.r2;
        jc["g_c_GHz"] = json_number(c.g_c * to_ghz);
        conns.push_back(jc);
    }
    j["connection_couplings"] = conns;
    return j;
}

inline ordered_json lagrangian_json(const LagrangianModel& lag) {
    ordered_json j;
    j["variables"] = lag.labels;
    j["kinetic_form"] = json_matrix(lag.kinetic);
    j["quadratic_potential"] = json_matrix(lag.quad_potential);
    ordered_json terms = ordered_json::array();
    for (const auto& s : lag.sinusoids) {
        ordered_json jt;
        jt["amplitude"] = json_number(s.amplitude);
        std::vector<double> d(s.direction.data(), s.direction.data() + s.direction.size());
        jt["direction"] = json_vector(d);
        jt["offset"] = json_number(s.offset);
        terms.push_back(jt);
    }
    j["sinusoids"] = terms;
    return j;
}

inline ordered_json classify_json(const ParityAmplitudes& p) {
    ordered_json j;
    j["longitudinal"] = json_number(p.longitudinal);
    j["transverse"] = json_number(p.transverse);
    j["tag"] = p.tag;
    if (std::abs(p.longitudinal) > 0.0)
        j["transverse_to_longitudinal"] =
            json_number(p.transverse / std::abs(p.longitudinal));
    return j;
}

inline std::string scan_points_csv(const ScanResult& res) {
    std::ostringstream out;
    out << "omega,transfer\n";
    for (const auto& p : res.points)
        out << format_number(p.omega) << ',' << format_number(p.transfer) << '\n';
    return out.str();
}

inline std::string resonance_csv(const ScanResult& res) {
    std::ostringstream out;
    out << "omega,height,width\n";
    for (const auto& p : res.peaks)
        out << format_number(p.omega) << ',' << format_number(p.height) << ','
            << format_number(p.width) << '\n';
    return out.str();
}

inline std::string trajectory_csv(const Trajectory& traj,
                                  const std::vector<std::string>& qubit_labels,
                                  const std::vector<std::string>& resonator_labels) {
    std::ostringstream out;
    out << "time";
    for (const auto& l : qubit_labels) out << ",sigma_z_" << l;
    for (const auto& l : resonator_labels) out << ",photons_" << l;
    out << '\n';
    for (std::size_t c = 0; c < traj.times.size(); ++c) {
        out << format_number(traj.times[c]);
        for (Eigen::Index i = 0; i < traj.sigma_z.rows(); ++i)
            out << ',' << format_number(traj.sigma_z(i, c));
        for (Eigen::Index i = 0; i < traj.photons.rows(); ++i)
            out << ',' << format_number(traj.photons(i, c));
        out << '\n';
    }
    return out.str();
}

inline ordered_json frequency_plan_json(const FrequencyPlan& plan) {
    ordered_json j;
    j["bare_omega"] = json_vector(plan.bare_omega);
    j["g_c"] = json_vector(plan.g_c);
    j["frequencies"] = json_vector(plan.frequencies);
    j["min_gap"] = json_number(plan.min_gap);
    j["guard_band"] = json_number(plan.guard_band);
    return j;
}

inline FrequencyPlan frequency_plan_from_json(const ordered_json& j) {
    FrequencyPlan plan;
    plan.bare_omega = j.at("bare_omega").get<std::vector<double>>();
    plan.g_c = j.at("g_c").get<std::vector<double>>();
    plan.frequencies = j.at("frequencies").get<std::vector<double>>();
    plan.min_gap = j.at("min_gap").get<double>();
    plan.guard_band = j.at("guard_band").get<double>();
    return plan;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace fluxlattice

#endif
