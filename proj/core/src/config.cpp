#include "erasim/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace erasim {

using nlohmann::json;

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::relax: return "relax";
        case ExperimentKind::ramsey: return "ramsey";
        case ExperimentKind::cpmg: return "cpmg";
        case ExperimentKind::rb: return "rb";
        case ExperimentKind::classify: return "classify";
        case ExperimentKind::tomo_state: return "tomo_state";
        case ExperimentKind::tomo_process: return "tomo_process";
        case ExperimentKind::dephasing_scan: return "dephasing_scan";
        case ExperimentKind::rate_eq: return "rate_eq";
    }
    return "unknown";
}

ExperimentKind experiment_from_string(const std::string& name) {
    static const std::map<std::string, ExperimentKind> kinds = {
        {"relax", ExperimentKind::relax},
        {"ramsey", ExperimentKind::ramsey},
        {"cpmg", ExperimentKind::cpmg},
        {"rb", ExperimentKind::rb},
        {"classify", ExperimentKind::classify},
        {"tomo_state", ExperimentKind::tomo_state},
        {"tomo_process", ExperimentKind::tomo_process},
        {"dephasing_scan", ExperimentKind::dephasing_scan},
        {"rate_eq", ExperimentKind::rate_eq},
    };
    auto it = kinds.find(name);
    if (it == kinds.end()) throw ConfigError("experiment", "unknown experiment '" + name + "'");
    return it->second;
}

namespace {

// splits "11.9 us" into value and suffix
bool split_quantity(const std::string& s, double& value, std::string& unit) {
    std::istringstream ss(s);
    if (!(ss >> value)) return false;
    ss >> unit;
    std::string extra;
    if (ss >> extra) return false;
    return true;
}

double scaled(const json& v, const std::string& field,
              const std::map<std::string, double>& scales, const char* kind) {
    if (v.is_number()) return v.get<double>();
    if (!v.is_string())
        throw ConfigError(field, std::string("expected a number or a '<value> <unit>' ") + kind);
    double value;
    std::string unit;
    if (!split_quantity(v.get<std::string>(), value, unit))
        throw ConfigError(field, "cannot parse quantity '" + v.get<std::string>() + "'");
    auto it = scales.find(unit);
    if (it == scales.end()) throw ConfigError(field, "unknown unit '" + unit + "'");
    return value * it->second;
}

const std::map<std::string, double>& time_scales() {
    static const std::map<std::string, double> s = {
        {"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"\xc2\xb5s", 1e-6}, {"ns", 1e-9}};
    return s;
}

}  // namespace

double parse_time(const json& v, const std::string& field) {
    return scaled(v, field, time_scales(), "time");
}

double parse_frequency(const json& v, const std::string& field) {
    static const std::map<std::string, double> scales = {
        {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
    return scaled(v, field, scales, "frequency");
}

double parse_probability(const json& v, const std::string& field) {
    static const std::map<std::string, double> scales = {{"%", 1e-2}};
    const double p = scaled(v, field, scales, "probability");
    if (p < 0.0 || p > 1.0) throw ConfigError(field, "probability outside [0, 1]");
    return p;
}

double parse_rate(const json& v, const std::string& field) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s.rfind("1/", 0) == 0) {
            const double t = parse_time(json(s.substr(2)), field);
            if (t <= 0.0) throw ConfigError(field, "inverse time must be positive");
            return 1.0 / t;
        }
    }
    throw ConfigError(field, "expected a rate in 1/s or an inverse time '1/<value> <unit>'");
}

namespace {

const std::set<std::string>& common_keys() {
    static const std::set<std::string> keys = {
        "experiment", "seed",    "shots",   "output_dir", "threads",
        "params",     "detection_errors",   "dim",        "max_jumps",
        "tau",        "T_cycle", "include_thermal",       "include_dephasing",
        "include_detection_errors",         "postselect_final_parity",
    };
    return keys;
}

const std::set<std::string>& keys_for(ExperimentKind kind) {
    static const std::map<ExperimentKind, std::set<std::string>> extra = {
        {ExperimentKind::relax, {"M_max"}},
        {ExperimentKind::ramsey, {"M_max"}},
        {ExperimentKind::cpmg, {"M_max"}},
        {ExperimentKind::rb,
         {"lengths", "p_erasure_per_gate", "residual_error_per_gate", "gate_duration",
          "include_idling_loss", "fix_offset", "bootstrap_resamples"}},
        {ExperimentKind::classify, {"prepared_states", "midcircuit_check", "readout_error"}},
        {ExperimentKind::tomo_state, {"state", "subspace_dim", "samples_csv"}},
        {ExperimentKind::tomo_process, {"leakage_per_gate", "erasure_phase"}},
        {ExperimentKind::dephasing_scan, {"M_list", "tau_tot"}},
        {ExperimentKind::rate_eq, {"rates", "t_max", "n_points", "noise_sigma", "M_max"}},
    };
    return extra.at(kind);
}

void parse_params(const json& j, SystemParams& p) {
    for (const auto& [key, value] : j.items()) {
        const std::string field = "params." + key;
        if (key == "omega_q") p.omega_q = parse_frequency(value, field);
        else if (key == "omega_c") p.omega_c = parse_frequency(value, field);
        else if (key == "omega_r") p.omega_r = parse_frequency(value, field);
        else if (key == "K_q") p.K_q = parse_frequency(value, field);
        else if (key == "K_c") p.K_c = parse_frequency(value, field);
        else if (key == "chi_qc") p.chi_qc = parse_frequency(value, field);
        else if (key == "chi_qr") p.chi_qr = parse_frequency(value, field);
        else if (key == "chi_qc_2") p.chi_qc_2 = parse_frequency(value, field);
        else if (key == "kappa_r") p.kappa_r = parse_frequency(value, field);
        else if (key == "T1_c") p.T1_c = parse_time(value, field);
        else if (key == "T2R_c") p.T2R_c = parse_time(value, field);
        else if (key == "Tphi_c") p.Tphi_c = parse_time(value, field);
        else if (key == "T1_q") p.T1_q = parse_time(value, field);
        else if (key == "T2R_q") p.T2R_q = parse_time(value, field);
        else if (key == "Tphi_q") p.Tphi_q = parse_time(value, field);
        else if (key == "nth_c") p.nth_c = parse_probability(value, field);
        else if (key == "nth_q") p.nth_q = parse_probability(value, field);
        else if (key == "kerr_sign") p.kerr_sign = value.get<double>();
        else throw ConfigError(field, "unknown parameter");
    }
}

void parse_detection(const json& j, DetectionErrorModel& d) {
    double p_fp = d.p_false_positive, p_fn = d.p_false_negative, p_id = d.p_induced_dephasing;
    for (const auto& [key, value] : j.items()) {
        const std::string field = "detection_errors." + key;
        if (key == "p_false_positive") p_fp = parse_probability(value, field);
        else if (key == "p_false_negative") p_fn = parse_probability(value, field);
        else if (key == "p_induced_dephasing") p_id = parse_probability(value, field);
        else throw ConfigError(field, "unknown parameter");
    }
    d = DetectionErrorModel::from_rates(p_fp, p_fn, p_id);
}

template <typename T>
std::vector<T> parse_int_list(const json& v, const std::string& field) {
    if (!v.is_array()) throw ConfigError(field, "expected an array of integers");
    std::vector<T> out;
    for (const auto& e : v) {
        if (!e.is_number_integer()) throw ConfigError(field, "expected integers");
        out.push_back(e.get<T>());
    }
    return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config", "top level must be an object");
    if (!j.contains("experiment")) throw ConfigError("experiment", "required field missing");

    ExperimentConfig c;
    c.experiment = experiment_from_string(j.at("experiment").get<std::string>());

    // reject unknown keys before reading anything else
    const auto& allowed_extra = keys_for(c.experiment);
    for (const auto& [key, value] : j.items()) {
        if (!common_keys().count(key) && !allowed_extra.count(key))
            throw ConfigError(key, "unknown key for experiment '" + to_string(c.experiment) + "'");
    }

    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("shots")) c.shots = j.at("shots").get<long>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();

    if (j.contains("params")) parse_params(j.at("params"), c.qubit.params);
    if (j.contains("detection_errors")) parse_detection(j.at("detection_errors"), c.qubit.detection);
    if (j.contains("tau")) c.qubit.tau = parse_time(j.at("tau"), "tau");
    if (j.contains("T_cycle")) c.qubit.T_cycle = parse_time(j.at("T_cycle"), "T_cycle");
    if (j.contains("dim")) c.qubit.dim = j.at("dim").get<int>();
    if (j.contains("max_jumps")) c.qubit.max_jumps = j.at("max_jumps").get<int>();
    if (j.contains("include_thermal")) c.qubit.include_thermal = j.at("include_thermal").get<bool>();
    if (j.contains("include_dephasing"))
        c.qubit.include_dephasing = j.at("include_dephasing").get<bool>();
    if (j.contains("include_detection_errors"))
        c.qubit.include_detection_errors = j.at("include_detection_errors").get<bool>();
    if (j.contains("postselect_final_parity"))
        c.qubit.postselect_final_parity = j.at("postselect_final_parity").get<bool>();

    if (j.contains("M_max")) c.M_max = j.at("M_max").get<int>();
    if (j.contains("lengths")) c.lengths = parse_int_list<int>(j.at("lengths"), "lengths");
    if (j.contains("p_erasure_per_gate"))
        c.p_erasure_per_gate = parse_probability(j.at("p_erasure_per_gate"), "p_erasure_per_gate");
    if (j.contains("residual_error_per_gate"))
        c.residual_error_per_gate =
            parse_probability(j.at("residual_error_per_gate"), "residual_error_per_gate");
    if (j.contains("gate_duration")) c.gate_duration = parse_time(j.at("gate_duration"), "gate_duration");
    if (j.contains("include_idling_loss"))
        c.include_idling_loss = j.at("include_idling_loss").get<bool>();
    if (j.contains("fix_offset")) {
        if (j.at("fix_offset").is_null())
            c.fix_offset.reset();
        else
            c.fix_offset = j.at("fix_offset").get<double>();
    }
    if (j.contains("bootstrap_resamples"))
        c.bootstrap_resamples = j.at("bootstrap_resamples").get<int>();

    if (j.contains("prepared_states"))
        c.prepared_states = parse_int_list<int>(j.at("prepared_states"), "prepared_states");
    if (j.contains("midcircuit_check")) c.midcircuit_check = j.at("midcircuit_check").get<bool>();
    if (j.contains("readout_error"))
        c.readout_error = parse_probability(j.at("readout_error"), "readout_error");

    if (j.contains("state")) c.state = j.at("state").get<std::string>();
    if (j.contains("subspace_dim")) c.subspace_dim = j.at("subspace_dim").get<int>();
    if (j.contains("samples_csv")) c.samples_csv = j.at("samples_csv").get<std::string>();
    if (j.contains("leakage_per_gate"))
        c.leakage_per_gate = parse_probability(j.at("leakage_per_gate"), "leakage_per_gate");
    if (j.contains("erasure_phase")) c.erasure_phase = j.at("erasure_phase").get<double>();

    if (j.contains("M_list")) c.M_list = parse_int_list<int>(j.at("M_list"), "M_list");
    if (j.contains("tau_tot")) c.tau_tot = parse_time(j.at("tau_tot"), "tau_tot");

    if (j.contains("rates")) {
        const json& r = j.at("rates");
        for (const auto& [key, value] : r.items()) {
            const std::string field = "rates." + key;
            if (key == "gamma_21") c.rates.gamma_21 = parse_rate(value, field);
            else if (key == "gamma_12") c.rates.gamma_12 = parse_rate(value, field);
            else if (key == "gamma_10") c.rates.gamma_10 = parse_rate(value, field);
            else if (key == "gamma_01") c.rates.gamma_01 = parse_rate(value, field);
            else throw ConfigError(field, "unknown rate");
        }
    }
    if (j.contains("t_max")) c.t_max = parse_time(j.at("t_max"), "t_max");
    if (j.contains("n_points")) c.n_points = j.at("n_points").get<int>();
    if (j.contains("noise_sigma")) c.noise_sigma = j.at("noise_sigma").get<double>();

    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("JSON parse failure: ") + e.what());
    }
    return from_json(j);
}

void ExperimentConfig::validate() const {
    try {
        qubit.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("config", e.what());
    }
    if (shots < 0) throw ConfigError("shots", "must be >= 0");
    if (threads < 1) throw ConfigError("threads", "must be >= 1");
    if (M_max < 1) throw ConfigError("M_max", "must be >= 1");
    if (bootstrap_resamples < 1) throw ConfigError("bootstrap_resamples", "must be >= 1");
    switch (experiment) {
        case ExperimentKind::rb:
            if (lengths.empty()) throw ConfigError("lengths", "must not be empty");
            for (int m : lengths)
                if (m < 0) throw ConfigError("lengths", "entries must be >= 0");
            if (shots == 0) throw ConfigError("shots", "rb requires shots > 0");
            break;
        case ExperimentKind::classify:
            if (shots == 0) throw ConfigError("shots", "classify requires shots > 0");
            for (int s : prepared_states)
                if (s < 0 || s >= qubit.dim)
                    throw ConfigError("prepared_states", "entries must be Fock indices < dim");
            break;
        case ExperimentKind::tomo_state:
            if (subspace_dim != 2 && subspace_dim != 3)
                throw ConfigError("subspace_dim", "must be 2 or 3");
            break;
        case ExperimentKind::dephasing_scan:
            if (tau_tot <= 0) throw ConfigError("tau_tot", "must be positive");
            for (int m : M_list)
                if (m < 0 || (m != 0 && m % 2 != 0))
                    throw ConfigError("M_list", "entries must be even (or 0)");
            break;
        case ExperimentKind::rate_eq:
            if (n_points < 4) throw ConfigError("n_points", "must be >= 4");
            if (t_max <= 0) throw ConfigError("t_max", "must be positive");
            try {
                rates.validate();
            } catch (const std::invalid_argument& e) {
                throw ConfigError("rates", e.what());
            }
            break;
        default:
            break;
    }
}

json ExperimentConfig::to_json() const {
    json j;
    j["experiment"] = to_string(experiment);
    j["seed"] = seed;
    j["shots"] = shots;
    if (!output_dir.empty()) j["output_dir"] = output_dir;
    j["threads"] = threads;

    json p;
    const SystemParams& sp = qubit.params;
    p["omega_q"] = sp.omega_q;
    p["omega_c"] = sp.omega_c;
    p["omega_r"] = sp.omega_r;
    p["K_q"] = sp.K_q;
    p["K_c"] = sp.K_c;
    p["chi_qc"] = sp.chi_qc;
    p["chi_qr"] = sp.chi_qr;
    p["chi_qc_2"] = sp.chi_qc_2;
    p["kappa_r"] = sp.kappa_r;
    p["T1_c"] = sp.T1_c;
    p["T2R_c"] = sp.T2R_c;
    p["Tphi_c"] = sp.Tphi_c;
    p["T1_q"] = sp.T1_q;
    p["T2R_q"] = sp.T2R_q;
    p["Tphi_q"] = sp.Tphi_q;
    p["nth_c"] = sp.nth_c;
    p["nth_q"] = sp.nth_q;
    p["kerr_sign"] = sp.kerr_sign;
    j["params"] = p;

    json d;
    d["p_false_positive"] = qubit.detection.p_false_positive;
    d["p_false_negative"] = qubit.detection.p_false_negative;
    d["p_induced_dephasing"] = qubit.detection.p_induced_dephasing;
    j["detection_errors"] = d;

    j["tau"] = qubit.tau;
    j["T_cycle"] = qubit.T_cycle;
    j["dim"] = qubit.dim;
    j["max_jumps"] = qubit.max_jumps;
    j["include_thermal"] = qubit.include_thermal;
    j["include_dephasing"] = qubit.include_dephasing;
    j["include_detection_errors"] = qubit.include_detection_errors;
    j["postselect_final_parity"] = qubit.postselect_final_parity;

    switch (experiment) {
        case ExperimentKind::relax:
        case ExperimentKind::ramsey:
        case ExperimentKind::cpmg:
            j["M_max"] = M_max;
            break;
        case ExperimentKind::rb:
            j["lengths"] = lengths;
            j["p_erasure_per_gate"] = p_erasure_per_gate;
            j["residual_error_per_gate"] = residual_error_per_gate;
            j["gate_duration"] = gate_duration;
            j["include_idling_loss"] = include_idling_loss;
            if (fix_offset)
                j["fix_offset"] = *fix_offset;
            else
                j["fix_offset"] = nullptr;
            j["bootstrap_resamples"] = bootstrap_resamples;
            break;
        case ExperimentKind::classify:
            j["prepared_states"] = prepared_states;
            j["midcircuit_check"] = midcircuit_check;
            j["readout_error"] = readout_error;
            break;
        case ExperimentKind::tomo_state:
            j["state"] = state;
            j["subspace_dim"] = subspace_dim;
            if (!samples_csv.empty()) j["samples_csv"] = samples_csv;
            break;
        case ExperimentKind::tomo_process:
            j["leakage_per_gate"] = leakage_per_gate;
            j["erasure_phase"] = erasure_phase;
            break;
        case ExperimentKind::dephasing_scan:
            j["M_list"] = M_list;
            j["tau_tot"] = tau_tot;
            break;
        case ExperimentKind::rate_eq:
            j["rates"] = {{"gamma_21", rates.gamma_21},
                          {"gamma_12", rates.gamma_12},
                          {"gamma_10", rates.gamma_10},
                          {"gamma_01", rates.gamma_01}};
            j["t_max"] = t_max;
            j["n_points"] = n_points;
            j["noise_sigma"] = noise_sigma;
            break;
    }
    return j;
}

std::string config_schema() {
    json schema;
    schema["description"] =
        "erasim experiment configuration. Quantities accept plain SI numbers or "
        "'<value> <unit>' strings with units s/ms/us/ns, Hz/kHz/MHz/GHz, %, and "
        "rates as 1/s numbers or '1/<time>' strings.";
    schema["common"] = {
        {"experiment",
         "one of relax|ramsey|cpmg|rb|classify|tomo_state|tomo_process|dephasing_scan|rate_eq"},
        {"seed", "RNG seed (unsigned integer, default 1)"},
        {"shots", "Monte Carlo shots; 0 selects the deterministic path (default 0)"},
        {"output_dir", "result directory (default $ERASIM_OUTPUT_DIR or '.')"},
        {"threads", "worker cap for shot loops (default 1)"},
        {"params", "device parameter overrides (defaults: reference device table)"},
        {"detection_errors",
         "p_false_positive / p_false_negative / p_induced_dephasing per check"},
        {"tau", "idle interval between checks (default 11.9 us)"},
        {"T_cycle", "full cycle duration (default 13.0 us)"},
        {"dim", "Fock truncation for the cycle model (default 4)"},
        {"max_jumps", "loss-channel jump orders; -1 = full (default)"},
        {"include_thermal", "thermal excitation in free evolution (default false)"},
        {"include_dephasing", "cavity pure dephasing in free evolution (default false)"},
        {"include_detection_errors", "dress checks with detection_errors (default false)"},
        {"postselect_final_parity", "final tomography also postselects parity (default true)"},
    };
    schema["params_keys"] = {"omega_q", "omega_c", "omega_r", "K_q",    "K_c",
                             "chi_qc",  "chi_qr",  "chi_qc_2", "kappa_r", "T1_c",
                             "T2R_c",   "Tphi_c",  "T1_q",    "T2R_q",  "Tphi_q",
                             "nth_c",   "nth_q",   "kerr_sign"};
    schema["relax|ramsey|cpmg"] = {{"M_max", "number of detection cycles (default 100)"}};
    schema["rb"] = {
        {"lengths", "Clifford sequence lengths"},
        {"p_erasure_per_gate", "injected leakage per X_L/2 pulse"},
        {"residual_error_per_gate", "average depolarizing error per X_L/2 pulse"},
        {"gate_duration", "X_L/2 duration (default 1.2 us)"},
        {"include_idling_loss", "cavity loss during gates (default false)"},
        {"fix_offset", "fixed B of the p0L fit, or null to float it (default 0.5)"},
        {"bootstrap_resamples", "bootstrap resamples for the fit CI (default 2000)"},
    };
    schema["classify"] = {
        {"prepared_states", "Fock states to prepare (default [0,1,2,3])"},
        {"midcircuit_check", "insert an erasure check before readout (default true)"},
        {"readout_error", "symmetric flip probability per cascaded readout"},
    };
    schema["tomo_state"] = {
        {"state", "0L|1L|+x|-x|+y|-y"},
        {"subspace_dim", "2 (code space) or 3 (qutrit)"},
        {"samples_csv", "optional input CSV re_alpha,im_alpha,parity_expectation,shots"},
    };
    schema["tomo_process"] = {{"leakage_per_gate", "leakage admixture of the X_L/2 gate"},
                              {"erasure_phase", "stray phase (rad) the gate puts on |1>"}};
    schema["dephasing_scan"] = {{"M_list", "even check counts"},
                                {"tau_tot", "fixed total duration (default 150 us)"}};
    schema["rate_eq"] = {
        {"rates", "gamma_21/gamma_12/gamma_10/gamma_01"},
        {"t_max", "last sample time (default 2 ms)"},
        {"n_points", "sample count (default 60)"},
        {"noise_sigma", "gaussian noise added to synthetic curves (default 0)"},
    };
    return schema.dump(2);
}

}  // namespace erasim
