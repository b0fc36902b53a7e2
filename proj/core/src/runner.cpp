#include "erasim/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "erasim/measure.hpp"
#include "erasim/tomography.hpp"

namespace erasim {

using nlohmann::json;

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string idling_csv(const IdlingResult& r) {
    std::string out = "time,p1L,survival,x_expect\n";
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        out += num(r.times[i]) + ',' + num(r.p1L[i]) + ',' + num(r.survival[i]) + ',' +
               num(r.x_expect[i]) + '\n';
    }
    return out;
}

Eigen::VectorXd to_vec(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Runs fn(i) for i in [0, n) on up to `threads` workers. Units must be
// independent; the first exception wins.
void parallel_for_each(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::atomic<std::size_t> next{0};
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

void require_converged(const FitResult& fit, const std::string& what) {
    if (!fit.converged)
        throw NumericalError(what + " fit did not converge: " + fit.message);
}

}  // namespace

json fit_to_json(const FitResult& fit) {
    json j;
    j["model"] = fit.model;
    json params, errors;
    for (std::size_t i = 0; i < fit.names.size(); ++i) {
        params[fit.names[i]] = fit.values(static_cast<Eigen::Index>(i));
        errors[fit.names[i]] = fit.standard_errors(static_cast<Eigen::Index>(i));
    }
    j["params"] = params;
    j["standard_errors"] = errors;
    j["fixed_params"] = fit.fixed_params;
    j["residual_norm"] = fit.residual_norm;
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["message"] = fit.message;
    if (fit.seed != 0) j["seed"] = fit.seed;
    return j;
}

json idling_to_json(const IdlingResult& series) {
    return json{{"times", series.times},
                {"p1L", series.p1L},
                {"survival", series.survival},
                {"x_expect", series.x_expect}};
}

namespace {

// ---------------------------------------------------------------------------
// per-experiment runners
// ---------------------------------------------------------------------------

void run_idling(const ExperimentConfig& config, ResultBundle& bundle) {
    const auto kind = config.experiment;
    IdlingResult series;
    if (config.shots > 0) {
        auto mc = kind == ExperimentKind::relax    ? simulate_relaxation_mc
                  : kind == ExperimentKind::ramsey ? simulate_ramsey_mc
                                                   : simulate_cpmg_mc;
        series = mc(config.qubit, config.M_max, config.shots, config.seed, {});
    } else {
        auto det = kind == ExperimentKind::relax    ? simulate_relaxation
                   : kind == ExperimentKind::ramsey ? simulate_ramsey
                                                    : simulate_cpmg;
        series = det(config.qubit, config.M_max);
    }

    json results;
    results["series"] = idling_to_json(series);
    bundle.csv_files["series.csv"] = idling_csv(series);
    json metrics;

    const Eigen::VectorXd t = to_vec(series.times);
    FitResult survival_fit = fit_exponential(t, to_vec(series.survival), 0.0);
    if (config.shots > 0) survival_fit.seed = config.seed;
    require_converged(survival_fit, "survival");
    results["fits"]["survival"] = fit_to_json(survival_fit);
    metrics["gamma_erasure"] = survival_fit.value("gamma");

    if (kind == ExperimentKind::relax) {
        FitResult eff = fit_effective_relaxation(t, to_vec(series.p1L),
                                                 config.qubit.params.kappa_c(), config.qubit.tau,
                                                 config.qubit.T_cycle);
        require_converged(eff, "effective relaxation");
        results["fits"]["effective_relaxation"] = fit_to_json(eff);
        metrics["gamma_int"] = eff.value("gamma_int");
        metrics["gamma_res"] = eff.value("gamma_res");
        metrics["gamma_total"] = eff.value("gamma_total");
    } else {
        FitResult phase_fit = fit_exponential(t, to_vec(series.x_expect), 0.0);
        require_converged(phase_fit, "coherence");
        results["fits"]["coherence"] = fit_to_json(phase_fit);
        metrics[kind == ExperimentKind::cpmg ? "gamma_phase_cpmg" : "gamma_phase_ramsey"] =
            phase_fit.value("gamma");
    }
    bundle.document["results"] = results;
    bundle.document["metrics"] = metrics;
}

void run_rb_experiment(const ExperimentConfig& config, ResultBundle& bundle) {
    GateNoiseModel noise;
    noise.p_erasure_per_gate = config.p_erasure_per_gate;
    if (config.residual_error_per_gate > 0.0)
        noise.residual = depolarizing_residual(config.residual_error_per_gate);
    noise.gate_duration = config.gate_duration;
    noise.include_idling_loss = config.include_idling_loss;

    RbResult rb;
    rb.shots_per_length = config.shots;
    rb.lengths = config.lengths;
    rb.survival.resize(config.lengths.size());
    rb.p0L.resize(config.lengths.size());
    rb.survivors.resize(config.lengths.size());
    parallel_for_each(config.lengths.size(), config.threads, [&](std::size_t i) {
        const RbResult one = run_rb(config.qubit, noise, {config.lengths[i]}, config.shots,
                                    config.seed);
        rb.survival[i] = one.survival[0];
        rb.p0L[i] = one.p0L[0];
        rb.survivors[i] = one.survivors[0];
    });

    // binomial weights; floored so zero-variance points stay usable
    const auto n = static_cast<Eigen::Index>(rb.lengths.size());
    Eigen::VectorXd sigma_s(n), sigma_p(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double s = rb.survival[i];
        sigma_s(i) = std::sqrt(std::max(s * (1.0 - s), 1e-9) / static_cast<double>(config.shots));
        const double ns = std::max<long>(rb.survivors[i], 1);
        const double p = rb.p0L[i];
        sigma_p(i) = std::sqrt(std::max(p * (1.0 - p), 1e-9) / static_cast<double>(ns));
    }

    RbErasureFit erasure = rb_survival_fit(rb.lengths, rb.survival, sigma_s);
    erasure.fit.seed = config.seed;
    RbFit residual = rb_fit(rb.lengths, rb.p0L, config.fix_offset, sigma_p);
    residual.fit.seed = config.seed;

    // case-resampled CI on the residual error per Clifford
    auto estimator = [&](const std::vector<std::size_t>& idx) {
        std::vector<int> ls(idx.size());
        std::vector<double> ps(idx.size());
        Eigen::VectorXd sg(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k) {
            ls[k] = rb.lengths[idx[k]];
            ps[k] = rb.p0L[idx[k]];
            sg(static_cast<Eigen::Index>(k)) = sigma_p(static_cast<Eigen::Index>(idx[k]));
        }
        try {
            return rb_fit(ls, ps, config.fix_offset, sg).r_clifford;
        } catch (const std::exception&) {
            return residual.r_clifford;
        }
    };
    const BootstrapResult ci = bootstrap(rb.lengths.size(), estimator, config.bootstrap_resamples,
                                         config.seed);

    json results;
    results["lengths"] = rb.lengths;
    results["survival"] = rb.survival;
    results["p0L"] = rb.p0L;
    results["survivors"] = rb.survivors;
    results["fit"] = {{"A", residual.A},
                      {"p", residual.p},
                      {"B", residual.B},
                      {"r_clifford", residual.r_clifford},
                      {"r_gate", residual.r_gate},
                      {"bootstrap_ci", {ci.lower, ci.upper}},
                      {"detail", fit_to_json(residual.fit)}};
    results["survival_fit"] = {{"erasure_per_clifford", erasure.erasure_per_clifford},
                               {"erasure_per_gate", erasure.erasure_per_gate},
                               {"detail", fit_to_json(erasure.fit)}};

    std::string csv = "length,survival,p0L,survivors\n";
    for (std::size_t i = 0; i < rb.lengths.size(); ++i)
        csv += std::to_string(rb.lengths[i]) + ',' + num(rb.survival[i]) + ',' + num(rb.p0L[i]) +
               ',' + std::to_string(rb.survivors[i]) + '\n';
    bundle.csv_files["rb_series.csv"] = csv;

    bundle.document["results"] = results;
    bundle.document["metrics"] = {{"erasure_per_gate", erasure.erasure_per_gate},
                                  {"erasure_per_clifford", erasure.erasure_per_clifford},
                                  {"r_clifford", residual.r_clifford},
                                  {"r_gate", residual.r_gate}};
}

void run_classify(const ExperimentConfig& config, ResultBundle& bundle) {
    const FockSpace space(config.qubit.dim);
    const DetectionErrorModel cascade_errors =
        DetectionErrorModel::from_rates(config.readout_error, config.readout_error, 0.0);
    const DetectionErrorModel& check_errors = config.qubit.detection;

    std::vector<std::pair<int, ShotRecord>> labeled;
    labeled.reserve(config.prepared_states.size() * config.shots);
    for (std::size_t si = 0; si < config.prepared_states.size(); ++si) {
        const int prepared = config.prepared_states[si];
        const DensityMatrix rho0 = DensityMatrix::pure(Ket::fock(space, prepared));
        for (long shot = 0; shot < config.shots; ++shot) {
            CounterRng rng(config.seed, (static_cast<std::uint64_t>(prepared) << 40) ^
                                            static_cast<std::uint64_t>(shot));
            DensityMatrix rho = rho0;
            std::vector<std::uint8_t> bits;
            if (config.midcircuit_check) {
                auto check = parity_measure(rho, check_errors, rng);
                bits.push_back(static_cast<std::uint8_t>(check.bit));
                rho = check.state;
            }
            const auto outcome = mod2_then_mod4_classify(rho, cascade_errors, rng);
            labeled.emplace_back(prepared, ShotRecord::make(std::move(bits), outcome.label));
        }
    }

    const AssignmentMetrics metrics = assignment_metrics(labeled);
    auto metric_json = [](const MetricEstimate& m) {
        return json{{"value", m.value},
                    {"standard_error", m.standard_error},
                    {"numerator", m.numerator},
                    {"denominator", m.denominator}};
    };
    bundle.document["results"] = {
        {"logical_assignment_error", metric_json(metrics.logical_assignment_error)},
        {"false_positive", metric_json(metrics.false_positive)},
        {"false_negative", metric_json(metrics.false_negative)},
        {"shots_per_state", config.shots}};
    bundle.document["metrics"] = {
        {"assignment_error", metrics.logical_assignment_error.value},
        {"false_positive", metrics.false_positive.value},
        {"false_negative", metrics.false_negative.value}};

    std::vector<ShotRecord> records;
    records.reserve(labeled.size());
    for (auto& [prepared, shot] : labeled) records.push_back(shot);
    std::ostringstream csv, ndjson;
    csv.precision(17);
    write_shots_csv(csv, records);
    write_shots_ndjson(ndjson, records);
    bundle.csv_files["shots.csv"] = csv.str();
    bundle.csv_files["shots.ndjson"] = ndjson.str();
}

DensityMatrix cardinal_state(const std::string& name, int subspace_dim) {
    const Complex i1(0.0, 1.0);
    Complex a, b;
    if (name == "0L") {
        a = 1; b = 0;
    } else if (name == "1L") {
        a = 0; b = 1;
    } else if (name == "+x") {
        a = 1; b = 1;
    } else if (name == "-x") {
        a = 1; b = -1;
    } else if (name == "+y") {
        a = 1; b = i1;
    } else if (name == "-y") {
        a = 1; b = -i1;
    } else {
        throw ConfigError("state", "unknown state '" + name + "'");
    }
    Vec v = Vec::Zero(subspace_dim);
    v(0) = a;
    v(subspace_dim - 1) = b;  // |1_L> = |2> is the last subspace level
    return DensityMatrix::pure(Ket(v));
}

void run_tomo_state(const ExperimentConfig& config, ResultBundle& bundle) {
    const int d = config.subspace_dim;
    std::vector<WignerSample> samples;
    DensityMatrix target = cardinal_state(config.state, d);

    if (!config.samples_csv.empty()) {
        std::ifstream in(config.samples_csv);
        if (!in) throw ConfigError("samples_csv", "cannot open '" + config.samples_csv + "'");
        samples = load_wigner_csv(in);
    } else {
        std::vector<Complex> alphas;
        if (d == 2)
            for (Complex a : five_point_alphas()) alphas.push_back(a);
        else
            for (Complex a : eight_point_alphas()) alphas.push_back(a);
        samples = synthesize_wigner_samples(target, alphas, d);
        if (config.shots > 0) {
            for (std::size_t i = 0; i < samples.size(); ++i) {
                CounterRng rng(config.seed, i);
                long plus = 0;
                const double p_plus = (1.0 + samples[i].parity_expectation) / 2.0;
                for (long s = 0; s < config.shots; ++s)
                    if (rng.bernoulli(p_plus)) ++plus;
                samples[i].parity_expectation =
                    2.0 * static_cast<double>(plus) / static_cast<double>(config.shots) - 1.0;
                samples[i].shots = config.shots;
            }
        }
    }

    const MleResult mle = mle_state(samples, d);
    json results;
    if (d == 2 && samples.size() >= 5) {
        std::array<double, 5> parities{};
        for (int i = 0; i < 5; ++i) parities[i] = samples[i].parity_expectation;
        const PauliVector pv = logical_paulis_from_parity(parities);
        results["pauli"] = {{"I", pv.i}, {"X", pv.x}, {"Y", pv.y}, {"Z", pv.z}};
    }
    results["fidelity_to_target"] = state_fidelity(mle.rho, target);
    results["mle"] = {{"converged", mle.converged},
                      {"residual", mle.residual},
                      {"iterations", mle.iterations}};
    json rho_re = json::array(), rho_im = json::array();
    for (int i = 0; i < d; ++i) {
        json row_re = json::array(), row_im = json::array();
        for (int j = 0; j < d; ++j) {
            row_re.push_back(mle.rho.matrix()(i, j).real());
            row_im.push_back(mle.rho.matrix()(i, j).imag());
        }
        rho_re.push_back(row_re);
        rho_im.push_back(row_im);
    }
    results["rho_re"] = rho_re;
    results["rho_im"] = rho_im;
    bundle.document["results"] = results;
    bundle.document["metrics"] = {{"state_fidelity", results["fidelity_to_target"]}};

    std::ostringstream csv;
    csv.precision(17);
    write_wigner_csv(csv, samples);
    bundle.csv_files["wigner_samples.csv"] = csv.str();
}

void run_tomo_process(const ExperimentConfig& config, ResultBundle& bundle) {
    // the applied gate: ideal on the code space, dressed by a stray phase on
    // the erasure state and an optional leakage admixture
    Mat u = xl_half_unitary();
    u(1, 1) = std::exp(Complex(0.0, config.erasure_phase));
    const auto inputs = process_input_states();
    std::vector<DensityMatrix> outputs;
    Mat leak = Mat::Zero(3, 3);
    leak(1, 1) = 1.0;
    for (const auto& rho : inputs) {
        Mat out = u * rho.matrix() * u.adjoint();
        if (config.leakage_per_gate > 0.0)
            out = (1.0 - config.leakage_per_gate) * out + config.leakage_per_gate * leak;
        outputs.push_back(DensityMatrix::from_matrix(std::move(out), false));
    }

    const ChiMatrix chi = process_tomography(inputs, outputs);
    const ChiMatrix chi_ideal = chi_of_qutrit_unitary(xl_half_unitary());
    const ReducedChi reduced = reduced_logical_chi(chi);
    const ReducedChi reduced_ideal = reduced_logical_chi(chi_ideal);

    json results;
    results["process_fidelity_full"] = process_fidelity(chi, chi_ideal);
    results["process_fidelity_reduced"] = process_fidelity(reduced.chi, reduced_ideal.chi);
    results["logical_weight"] = reduced.logical_weight;
    results["leakage_dominated"] = reduced.leakage_dominated;
    json chi_re = json::array(), chi_im = json::array();
    for (int i = 0; i < 9; ++i) {
        json row_re = json::array(), row_im = json::array();
        for (int j = 0; j < 9; ++j) {
            row_re.push_back(chi.elements(i, j).real());
            row_im.push_back(chi.elements(i, j).imag());
        }
        chi_re.push_back(row_re);
        chi_im.push_back(row_im);
    }
    results["chi_re"] = chi_re;
    results["chi_im"] = chi_im;
    bundle.document["results"] = results;
    bundle.document["metrics"] = {
        {"process_fidelity_full", results["process_fidelity_full"]},
        {"process_fidelity_reduced", results["process_fidelity_reduced"]}};
}

void run_dephasing_scan(const ExperimentConfig& config, ResultBundle& bundle) {
    const IdlingResult scan = induced_dephasing_scan(config.qubit, config.M_list, config.tau_tot);

    // fit the decaying tail, starting at the coherence maximum
    std::size_t peak = 0;
    for (std::size_t i = 1; i < scan.x_expect.size(); ++i)
        if (scan.x_expect[i] > scan.x_expect[peak]) peak = i;
    json results;
    results["series"] = idling_to_json(scan);
    json metrics;
    if (scan.x_expect.size() - peak >= 3) {
        Eigen::VectorXd m(scan.times.size() - peak), x(scan.times.size() - peak);
        for (std::size_t i = peak; i < scan.times.size(); ++i) {
            m(static_cast<Eigen::Index>(i - peak)) = scan.times[i];
            x(static_cast<Eigen::Index>(i - peak)) = scan.x_expect[i];
        }
        FitResult tail = fit_exponential(m, x, 0.0);
        require_converged(tail, "dephasing tail");
        const double per_check = (1.0 - std::exp(-tail.value("gamma"))) / 2.0;
        results["fits"]["tail"] = fit_to_json(tail);
        results["dephasing_per_check"] = per_check;
        metrics["dephasing_per_check"] = per_check;
    }
    bundle.document["results"] = results;
    bundle.document["metrics"] = metrics;

    std::string csv = "M,x_expect,survival\n";
    for (std::size_t i = 0; i < scan.times.size(); ++i)
        csv += num(scan.times[i]) + ',' + num(scan.x_expect[i]) + ',' + num(scan.survival[i]) +
               '\n';
    bundle.csv_files["dephasing_scan.csv"] = csv;
}

void run_rate_eq(const ExperimentConfig& config, ResultBundle& bundle) {
    const int n = config.n_points;
    Eigen::VectorXd t(n);
    Eigen::MatrixXd pops(3, n);
    for (int i = 0; i < n; ++i) {
        t(i) = config.t_max * i / (n - 1);
        Eigen::Vector3d p = qutrit_rate_evolution(config.rates, {0.0, 0.0, 1.0}, t(i));
        if (config.noise_sigma > 0.0) {
            CounterRng rng(config.seed, static_cast<std::uint64_t>(i));
            for (int k = 0; k < 3; ++k) p(k) += config.noise_sigma * rng.normal();
        }
        pops.col(i) = p;
    }

    FitResult fit = fit_rate_equations(t, pops, config.rates.gamma_10, config.rates.gamma_01);
    require_converged(fit, "rate equations");

    QutritRates fitted = config.rates;
    fitted.gamma_21 = fit.value("gamma_21");
    fitted.gamma_12 = fit.value("gamma_12");

    json results;
    results["fit"] = fit_to_json(fit);
    results["bias_ratio"] = erasure_bias_ratio(fitted);
    bundle.document["results"] = results;
    bundle.document["metrics"] = {{"gamma_21", fitted.gamma_21},
                                  {"gamma_12", fitted.gamma_12},
                                  {"bias_ratio", results["bias_ratio"]}};

    std::string csv = "time,P0,P1,P2\n";
    for (int i = 0; i < n; ++i)
        csv += num(t(i)) + ',' + num(pops(0, i)) + ',' + num(pops(1, i)) + ',' +
               num(pops(2, i)) + '\n';
    bundle.csv_files["rate_eq_series.csv"] = csv;
}

}  // namespace

ResultBundle run_experiment(const ExperimentConfig& config) {
    config.validate();
    ResultBundle bundle;
    bundle.document["config"] = config.to_json();
    bundle.document["library_version"] = kVersion;
    bundle.document["seed"] = config.seed;
    {
        const auto now = std::chrono::system_clock::now();
        const std::time_t tt = std::chrono::system_clock::to_time_t(now);
        char buf[32];
        std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&tt));
        bundle.document["generated_at"] = buf;
    }

    try {
        switch (config.experiment) {
            case ExperimentKind::relax:
            case ExperimentKind::ramsey:
            case ExperimentKind::cpmg:
                run_idling(config, bundle);
                break;
            case ExperimentKind::rb:
                run_rb_experiment(config, bundle);
                break;
            case ExperimentKind::classify:
                run_classify(config, bundle);
                break;
            case ExperimentKind::tomo_state:
                run_tomo_state(config, bundle);
                break;
            case ExperimentKind::tomo_process:
                run_tomo_process(config, bundle);
                break;
            case ExperimentKind::dephasing_scan:
                run_dephasing_scan(config, bundle);
                break;
            case ExperimentKind::rate_eq:
                run_rate_eq(config, bundle);
                break;
        }
    } catch (const NumericalError&) {
        throw;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::runtime_error& e) {
        throw NumericalError(e.what());
    }

    json files = json::array();
    for (const auto& [name, contents] : bundle.csv_files) files.push_back(name);
    bundle.document["files"] = files;
    return bundle;
}

std::string write_bundle(const ResultBundle& bundle, const std::string& directory) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    const fs::path dir(directory);
    for (const auto& [name, contents] : bundle.csv_files) {
        std::ofstream out(dir / name, std::ios::binary);
        out << contents;
    }
    const fs::path bundle_path = dir / "bundle.json";
    std::ofstream out(bundle_path);
    out << bundle.document.dump(2) << '\n';
    return bundle_path.string();
}

ResultBundle ResultBundle::load(const std::string& bundle_json_path) {
    std::ifstream in(bundle_json_path);
    if (!in) throw std::runtime_error("cannot open bundle '" + bundle_json_path + "'");
    ResultBundle b;
    in >> b.document;
    return b;
}

namespace {

struct ReferenceRow {
    const char* key;
    const char* label;
    const char* reference_display;
    enum class Kind { rate, probability, ratio } kind;
};

const std::vector<ReferenceRow>& reference_table() {
    using K = ReferenceRow::Kind;
    static const std::vector<ReferenceRow> rows = {
        {"gamma_int", "gamma_int", "(20 ms)^-1", K::rate},
        {"gamma_res", "gamma_res", "(8.9 ms)^-1", K::rate},
        {"gamma_total", "gamma_total", "(6.2 ms)^-1", K::rate},
        {"gamma_erasure", "erasure rate", "(197 us)^-1", K::rate},
        {"gamma_phase_cpmg", "dephasing rate (CPMG)", "(3.1 ms)^-1", K::rate},
        {"gamma_phase_ramsey", "dephasing rate (Ramsey)", "(0.52 ms)^-1", K::rate},
        {"bias_ratio", "bias ratio", "over 265", K::ratio},
        {"gamma_21", "gamma_21", "(244 us)^-1", K::rate},
        {"gamma_12", "gamma_12", "(33.6 ms)^-1", K::rate},
        {"erasure_per_gate", "erasure per gate", "4.50e-2", K::probability},
        {"r_clifford", "residual error per Clifford", "6.21e-3", K::probability},
        {"r_gate", "residual error per gate", "2.86e-3", K::probability},
        {"assignment_error", "logical assignment error", "0.97%", K::probability},
        {"false_positive", "false positive", "0.22%", K::probability},
        {"false_negative", "false negative", "0.69%", K::probability},
        {"dephasing_per_check", "dephasing per check", "0.26%", K::probability},
        {"state_fidelity", "state fidelity", "-", K::ratio},
        {"process_fidelity_full", "process fidelity (full)", "-", K::ratio},
        {"process_fidelity_reduced", "process fidelity (reduced)", "0.998", K::ratio},
    };
    return rows;
}

std::string format_rate(double per_second) {
    if (per_second <= 0.0) return "0";
    const double seconds = 1.0 / per_second;
    char buf[48];
    if (seconds >= 1e-3)
        std::snprintf(buf, sizeof buf, "(%.3g ms)^-1", seconds * 1e3);
    else
        std::snprintf(buf, sizeof buf, "(%.3g us)^-1", seconds * 1e6);
    return buf;
}

std::string format_value(double v, ReferenceRow::Kind kind) {
    char buf[48];
    switch (kind) {
        case ReferenceRow::Kind::rate:
            return format_rate(v);
        case ReferenceRow::Kind::probability:
            if (v >= 1e-3)
                std::snprintf(buf, sizeof buf, "%.3g%%", v * 100.0);
            else
                std::snprintf(buf, sizeof buf, "%.3g", v);
            return buf;
        case ReferenceRow::Kind::ratio:
            std::snprintf(buf, sizeof buf, "%.4g", v);
            return buf;
    }
    return "?";
}

}  // namespace

int report_bundle(const ResultBundle& bundle, std::ostream& os) {
    if (!bundle.document.contains("metrics") || bundle.document["metrics"].empty()) {
        os << "no results\n";
        return 0;
    }
    const json& metrics = bundle.document["metrics"];
    if (bundle.document.contains("config"))
        os << "experiment: " << bundle.document["config"].value("experiment", "?") << "\n";
    os << std::left << std::setw(30) << "metric" << std::setw(18) << "value"
       << "reference\n";
    for (const auto& row : reference_table()) {
        if (!metrics.contains(row.key)) continue;
        const double v = metrics[row.key].get<double>();
        os << std::left << std::setw(30) << row.label << std::setw(18)
           << format_value(v, row.kind) << row.reference_display << "\n";
    }
    return 0;
}

}  // namespace erasim
