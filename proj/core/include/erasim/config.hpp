#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "erasim/erasure.hpp"
#include "erasim/rb.hpp"

namespace erasim {

// Configuration failure carrying the offending field (CLI exit code 2).
struct ConfigError : std::runtime_error {
    ConfigError(std::string field_name, const std::string& what)
        : std::runtime_error(field_name + ": " + what), field(std::move(field_name)) {}
    std::string field;
};

enum class ExperimentKind {
    relax,
    ramsey,
    cpmg,
    rb,
    classify,
    tomo_state,
    tomo_process,
    dephasing_scan,
    rate_eq,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(const std::string& name);

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::relax;
    std::uint64_t seed = 1;
    long shots = 0;  // 0 selects the deterministic path where one exists
    std::string output_dir;
    int threads = 1;

    ErasureQubitConfig qubit;  // params, tau, T_cycle, detection, flags

    // idling experiments
    int M_max = 100;

    // rb
    std::vector<int> lengths = {1, 4, 7, 10, 14, 18, 22, 26, 31, 36, 42, 48};
    double p_erasure_per_gate = 0.0;
    double residual_error_per_gate = 0.0;
    double gate_duration = 1.2e-6;
    bool include_idling_loss = false;
    std::optional<double> fix_offset = 0.5;
    int bootstrap_resamples = 2000;

    // classify
    std::vector<int> prepared_states = {0, 1, 2, 3};
    bool midcircuit_check = true;
    double readout_error = 0.0;  // symmetric flip per cascaded readout

    // tomo_state
    std::string state = "+x";
    int subspace_dim = 2;
    std::string samples_csv;

    // tomo_process
    double leakage_per_gate = 0.0;
    double erasure_phase = 0.0;  // stray phase applied to |1> by the gate

    // dephasing_scan
    std::vector<int> M_list = {0, 2, 4, 8, 12, 16, 24, 32};
    double tau_tot = 150e-6;

    // rate_eq
    QutritRates rates = QutritRates::reference();
    double t_max = 2e-3;
    int n_points = 60;
    double noise_sigma = 0.0;

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_file(const std::string& path);
    nlohmann::json to_json() const;  // resolved echo; re-validates round-trip
    void validate() const;           // throws ConfigError naming the field
};

// Quantity parsing: plain numbers are SI; strings carry a unit suffix
// ("11.9 us", "1.69 MHz", "0.22 %", "1/244 us").
double parse_time(const nlohmann::json& v, const std::string& field);
double parse_frequency(const nlohmann::json& v, const std::string& field);
double parse_probability(const nlohmann::json& v, const std::string& field);
double parse_rate(const nlohmann::json& v, const std::string& field);

// Machine-readable description of the accepted config keys.
std::string config_schema();

}  // namespace erasim
