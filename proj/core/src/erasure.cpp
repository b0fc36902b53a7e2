#include "erasim/erasure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace erasim {

QutritRates QutritRates::reference() {
    QutritRates r;
    r.gamma_21 = 1.0 / 244.0e-6;
    r.gamma_12 = 1.0 / 33.6e-3;
    r.gamma_10 = 1.0 / 466e-6;
    r.gamma_01 = 1.0 / 64.7e-3;
    return r;
}

void QutritRates::validate() const {
    if (gamma_21 < 0 || gamma_12 < 0 || gamma_10 < 0 || gamma_01 < 0)
        throw std::invalid_argument("QutritRates: rates must be >= 0");
}

void ErasureQubitConfig::validate() const {
    params.validate();
    detection.validate();
    if (tau <= 0) throw std::invalid_argument("ErasureQubitConfig.tau: must be positive");
    if (T_cycle < tau)
        throw std::invalid_argument("ErasureQubitConfig.T_cycle: must be >= tau");
    if (dim < 3) throw std::invalid_argument("ErasureQubitConfig.dim: must be >= 3");
    if (max_jumps >= dim)
        throw std::invalid_argument("ErasureQubitConfig.max_jumps: must be < dim");
}

Mat code_projector(const FockSpace& space) {
    if (space.dim < 3) throw std::invalid_argument("code_projector: needs dim >= 3");
    Mat p = Mat::Zero(space.dim, space.dim);
    p(0, 0) = 1.0;
    p(2, 2) = 1.0;
    return p;
}

Projected erasure_detection_channel(const DensityMatrix& rho) {
    const double tr_in = rho.trace();
    if (tr_in <= 0.0 || tr_in > 1.0 + 1e-9)
        throw std::invalid_argument("erasure_detection_channel: trace outside (0, 1]");
    const Mat p = code_projector(FockSpace(rho.dim()));
    Mat projected = p * rho.matrix() * p;
    const double survival = projected.trace().real();
    if (survival < 1e-12)
        throw std::runtime_error("erasure_detection_channel: state fully erased");
    projected /= survival;
    return {DensityMatrix::from_matrix(std::move(projected), false), survival};
}

namespace {

Vec even_parity_profile(int dim) {
    Vec p(dim);
    for (int n = 0; n < dim; ++n) p(n) = (n % 2 == 0) ? 1.0 : 0.0;
    return p;
}

void project_parity(Mat& m, int parity_bit) {
    const int dim = static_cast<int>(m.rows());
    Vec mask(dim);
    for (int n = 0; n < dim; ++n) {
        const bool even = (n % 2 == 0);
        mask(n) = (parity_bit == 0) == even ? 1.0 : 0.0;
    }
    m = mask.asDiagonal() * m * mask.asDiagonal();
}

void dephase_code_coherence(Mat& m, double p) {
    if (p <= 0.0 || m.rows() < 3) return;
    const double factor = 1.0 - 2.0 * p;
    m(0, 2) *= factor;
    m(2, 0) *= factor;
}

}  // namespace

CycleChannel::CycleChannel(const ErasureQubitConfig& config) : config_(config) {
    config_.validate();
    const FockSpace space(config_.dim);
    const double kappa = config_.params.kappa_c();

    use_superop_ = config_.include_thermal || config_.include_dephasing;
    if (use_superop_) {
        LindbladSpec spec;
        std::vector<std::pair<Mat, double>> ops;
        if (config_.include_thermal) {
            ops = thermal_loss_collapse_ops(config_.params.T1_c, config_.params.nth_c, space);
        } else {
            ops.emplace_back(annihilation(space), kappa);
        }
        if (config_.include_dephasing)
            ops.push_back(dephasing_collapse_op(config_.params.Tphi_c, space));
        spec.collapse_operators = std::move(ops);
        superop_full_ = evolution_superoperator(spec, config_.dim, config_.tau);
        superop_half_ = evolution_superoperator(spec, config_.dim, config_.tau / 2.0);
    } else {
        const int jumps = config_.effective_max_jumps();
        kraus_full_ = photon_loss_kraus(kappa, config_.tau, space, jumps).operators();
        kraus_half_ = photon_loss_kraus(kappa, config_.tau / 2.0, space, jumps).operators();
    }
}

namespace {

void apply_kraus(Mat& m, const std::vector<Mat>& ops) {
    Mat out = Mat::Zero(m.rows(), m.cols());
    for (const Mat& e : ops) out += e * m * e.adjoint();
    m = std::move(out);
}

void apply_superop(Mat& m, const Mat& s) {
    const auto dim = m.rows();
    Vec v = Eigen::Map<const Vec>(m.data(), dim * dim);
    v = s * v;
    m = Eigen::Map<const Mat>(v.data(), dim, dim);
}

}  // namespace

void CycleChannel::free_evolve(Mat& rho) const {
    if (use_superop_)
        apply_superop(rho, superop_full_);
    else
        apply_kraus(rho, kraus_full_);
}

void CycleChannel::free_evolve_half(Mat& rho) const {
    if (use_superop_)
        apply_superop(rho, superop_half_);
    else
        apply_kraus(rho, kraus_half_);
}

double CycleChannel::detect(Mat& rho) const {
    const int dim = static_cast<int>(rho.rows());
    const Vec even = even_parity_profile(dim);
    double p_even = 0.0;
    for (int n = 0; n < dim; ++n) p_even += even(n).real() * rho(n, n).real();
    const double p_odd = rho.trace().real() - p_even;

    if (!config_.include_detection_errors) {
        project_parity(rho, 0);
        return p_even;
    }
    const double p_fp = config_.detection.p_false_positive;
    const double p_fn = config_.detection.p_false_negative;
    Mat even_branch = rho;
    project_parity(even_branch, 0);
    Mat odd_branch = rho;
    project_parity(odd_branch, 1);
    rho = (1.0 - p_fp) * even_branch + p_fn * odd_branch;
    dephase_code_coherence(rho, config_.detection.p_induced_dephasing);
    return (1.0 - p_fp) * p_even + p_fn * p_odd;
}

double CycleChannel::flag_probability(const Mat& rho) const {
    const int dim = static_cast<int>(rho.rows());
    const Vec even = even_parity_profile(dim);
    double p_even = 0.0;
    for (int n = 0; n < dim; ++n) p_even += even(n).real() * rho(n, n).real();
    const double tr = rho.trace().real();
    const double p_odd = tr - p_even;
    if (!config_.include_detection_errors) return p_odd / tr;
    const double p_fp = config_.detection.p_false_positive;
    const double p_fn = config_.detection.p_false_negative;
    return (p_fp * p_even + (1.0 - p_fn) * p_odd) / tr;
}

Projected CycleChannel::operator()(const DensityMatrix& rho) const {
    Mat m = rho.matrix();
    free_evolve(m);
    const double survival = detect(m);
    if (survival < 1e-12) throw std::runtime_error("CycleChannel: state fully erased");
    m /= survival;
    return {DensityMatrix::from_matrix(std::move(m), false), survival};
}

double analytic_p1L_cycles(double kappa, double tau, int cycles) {
    if (cycles < 0) throw std::invalid_argument("analytic_p1L: negative cycle count");
    const double kt = kappa * tau;
    const double e_kt = std::exp(kt);
    return (e_kt + 1.0) / ((e_kt - 1.0) * std::exp(2.0 * cycles * kt) + 2.0);
}

double analytic_p1L(double kappa, double tau, double T, double t) {
    if (T <= 0) throw std::invalid_argument("analytic_p1L: T must be positive");
    const double m_real = t / T;
    const int m = static_cast<int>(std::lround(m_real));
    if (std::abs(m_real - m) > 1e-6)
        throw std::invalid_argument("analytic_p1L: t must be an integer multiple of T");
    return analytic_p1L_cycles(kappa, tau, m);
}

double intrinsic_relaxation_rate(double kappa, double tau, double T) {
    if (T <= 0) throw std::invalid_argument("intrinsic_relaxation_rate: T must be positive");
    const double kt = kappa * tau;
    return kt * kt / T;
}

namespace {

struct LogicalReadout {
    double p1L;
    double x_expect;
};

LogicalReadout read_logical(const Mat& rho, bool postselect_final_parity) {
    const double p0 = rho(0, 0).real();
    const double p2 = rho(2, 2).real();
    const double coh = 2.0 * rho(0, 2).real();
    const double denom = postselect_final_parity ? (p0 + p2) : rho.trace().real();
    if (denom <= 0.0) return {0.0, 0.0};
    return {p2 / denom, coh / denom};
}

enum class Sequence { relax, ramsey, cpmg };

Mat initial_state(Sequence seq, int dim) {
    Mat rho = Mat::Zero(dim, dim);
    if (seq == Sequence::relax) {
        rho(2, 2) = 1.0;
    } else {
        // |+x_L> = (|0> + |2>)/sqrt(2)
        rho(0, 0) = rho(2, 2) = rho(0, 2) = rho(2, 0) = 0.5;
    }
    return rho;
}

void cycle_evolution(const CycleChannel& cycle, Sequence seq, const Mat& xl, Mat& rho) {
    if (seq == Sequence::cpmg) {
        cycle.free_evolve_half(rho);
        rho = xl * rho * xl.adjoint();
        cycle.free_evolve_half(rho);
    } else {
        cycle.free_evolve(rho);
    }
}

IdlingResult simulate_deterministic(const ErasureQubitConfig& config, int M_max, Sequence seq) {
    const CycleChannel cycle(config);
    const Mat xl = logical_x(FockSpace(config.dim));
    Mat rho = initial_state(seq, config.dim);

    IdlingResult result;
    double cumulative = 1.0;
    auto record = [&](int m) {
        const auto r = read_logical(rho, config.postselect_final_parity);
        result.times.push_back(m * config.T_cycle);
        result.p1L.push_back(r.p1L);
        result.x_expect.push_back(r.x_expect);
        result.survival.push_back(cumulative);
    };
    record(0);
    for (int m = 1; m <= M_max; ++m) {
        cycle_evolution(cycle, seq, xl, rho);
        const double survival = cycle.detect(rho);
        if (survival < 1e-12) throw std::runtime_error("simulate: state fully erased");
        rho /= survival;
        cumulative *= survival;
        record(m);
    }
    return result;
}

// Samples the reported check outcome on a per-shot state; returns false when
// the shot is flagged (erased). The state collapses onto the ideal branch.
bool sampled_check(const ErasureQubitConfig& config, Mat& rho, CounterRng& rng) {
    const int dim = static_cast<int>(rho.rows());
    double p_even = 0.0;
    for (int n = 0; n < dim; n += 2) p_even += rho(n, n).real();
    const double tr = rho.trace().real();
    const int ideal = rng.bernoulli(1.0 - p_even / tr) ? 1 : 0;
    project_parity(rho, ideal);
    rho /= rho.trace().real();

    int reported = ideal;
    if (config.include_detection_errors) {
        const auto& conf = config.detection.readout_assignment;
        reported = rng.bernoulli(conf(ideal, 1)) ? 1 : 0;
        dephase_code_coherence(rho, config.detection.p_induced_dephasing);
    }
    return reported == 0;
}

// Final logical readout of one shot. Returns the shot's contribution to the
// estimator (population indicator for relax, +-1 for the x basis, 0 for a
// kept leakage-labeled shot) or nullopt when the shot is discarded by the
// final parity postselection.
std::optional<int> sample_final(const Mat& rho, bool along_x, bool postselect_final_parity,
                                CounterRng& rng) {
    const double tr = rho.trace().real();
    const double p0 = rho(0, 0).real();
    const double p2 = rho(2, 2).real();
    const double code = p0 + p2;
    if (rng.bernoulli(std::clamp(1.0 - code / tr, 0.0, 1.0))) {
        if (postselect_final_parity) return std::nullopt;
        return 0;  // leakage-labeled shot stays in the denominator
    }
    if (along_x) {
        const double p_plus = (code + 2.0 * rho(0, 2).real()) / (2.0 * code);
        return rng.bernoulli(std::clamp(p_plus, 0.0, 1.0)) ? 1 : -1;
    }
    return rng.bernoulli(std::clamp(p2 / code, 0.0, 1.0)) ? 1 : 0;
}

IdlingResult simulate_mc(const ErasureQubitConfig& config, int M_max, long shots,
                         std::uint64_t seed, std::vector<int> M_grid, Sequence seq) {
    if (shots <= 0) throw std::invalid_argument("simulate_mc: shots must be positive");
    const CycleChannel cycle(config);
    const Mat xl = logical_x(FockSpace(config.dim));
    if (M_grid.empty())
        for (int m = 0; m <= M_max; ++m) M_grid.push_back(m);

    IdlingResult result;
    const bool along_x = seq != Sequence::relax;
    for (int m : M_grid) {
        long surviving = 0;
        long kept = 0;
        long total = 0;
        for (long shot = 0; shot < shots; ++shot) {
            CounterRng rng(seed, (static_cast<std::uint64_t>(m) << 32) ^
                                     static_cast<std::uint64_t>(shot));
            Mat rho = initial_state(seq, config.dim);
            bool erased = false;
            for (int c = 0; c < m && !erased; ++c) {
                cycle_evolution(cycle, seq, xl, rho);
                erased = !sampled_check(config, rho, rng);
            }
            if (erased) continue;
            ++surviving;
            const auto outcome =
                sample_final(rho, along_x, config.postselect_final_parity, rng);
            if (!outcome) continue;
            ++kept;
            total += *outcome;
        }
        result.times.push_back(m * config.T_cycle);
        result.survival.push_back(static_cast<double>(surviving) / static_cast<double>(shots));
        const double mean = kept > 0 ? static_cast<double>(total) / static_cast<double>(kept)
                                     : 0.0;
        result.p1L.push_back(along_x ? 0.0 : mean);
        result.x_expect.push_back(along_x ? mean : 0.0);
    }
    return result;
}

}  // namespace

IdlingResult simulate_relaxation(const ErasureQubitConfig& config, int M_max) {
    return simulate_deterministic(config, M_max, Sequence::relax);
}

IdlingResult simulate_ramsey(const ErasureQubitConfig& config, int M_max) {
    return simulate_deterministic(config, M_max, Sequence::ramsey);
}

IdlingResult simulate_cpmg(const ErasureQubitConfig& config, int M_max) {
    return simulate_deterministic(config, M_max, Sequence::cpmg);
}

IdlingResult simulate_relaxation_mc(const ErasureQubitConfig& config, int M_max, long shots,
                                    std::uint64_t seed, std::vector<int> M_grid) {
    return simulate_mc(config, M_max, shots, seed, std::move(M_grid), Sequence::relax);
}

IdlingResult simulate_ramsey_mc(const ErasureQubitConfig& config, int M_max, long shots,
                                std::uint64_t seed, std::vector<int> M_grid) {
    return simulate_mc(config, M_max, shots, seed, std::move(M_grid), Sequence::ramsey);
}

IdlingResult simulate_cpmg_mc(const ErasureQubitConfig& config, int M_max, long shots,
                              std::uint64_t seed, std::vector<int> M_grid) {
    return simulate_mc(config, M_max, shots, seed, std::move(M_grid), Sequence::cpmg);
}

IdlingResult induced_dephasing_scan(const ErasureQubitConfig& config,
                                    const std::vector<int>& M_list, double tau_tot) {
    if (tau_tot <= 0) throw std::invalid_argument("induced_dephasing_scan: tau_tot must be > 0");
    const FockSpace space(config.dim);
    const Mat xl = logical_x(space);

    IdlingResult result;
    for (int m : M_list) {
        if (m < 0 || (m != 0 && m % 2 != 0))
            throw std::invalid_argument("induced_dephasing_scan: M must be even (or 0)");

        // m slots of duration tau_tot / m, each echoed at its midpoint and
        // closed by a check; m = 0 degenerates to a single bare echo.
        ErasureQubitConfig slot_config = config;
        slot_config.tau = m == 0 ? tau_tot : tau_tot / m;
        slot_config.T_cycle = std::max(slot_config.tau, config.T_cycle);
        const CycleChannel cycle(slot_config);

        Mat rho = initial_state(Sequence::ramsey, config.dim);
        double cumulative = 1.0;
        if (m == 0) {
            cycle.free_evolve_half(rho);
            rho = xl * rho * xl.adjoint();
            cycle.free_evolve_half(rho);
        } else {
            for (int c = 0; c < m; ++c) {
                cycle_evolution(cycle, Sequence::cpmg, xl, rho);
                const double survival = cycle.detect(rho);
                if (survival < 1e-12)
                    throw std::runtime_error("induced_dephasing_scan: state fully erased");
                rho /= survival;
                cumulative *= survival;
            }
        }
        const auto r = read_logical(rho, config.postselect_final_parity);
        result.times.push_back(static_cast<double>(m));
        result.p1L.push_back(r.p1L);
        result.x_expect.push_back(r.x_expect);
        result.survival.push_back(cumulative);
    }
    return result;
}

Eigen::Matrix3d qutrit_rate_matrix(const QutritRates& rates) {
    rates.validate();
    Eigen::Matrix3d r;
    // d/dt (P0, P1, P2)
    r << -rates.gamma_01, rates.gamma_10, 0.0,
         rates.gamma_01, -(rates.gamma_10 + rates.gamma_12), rates.gamma_21,
         0.0, rates.gamma_12, -rates.gamma_21;
    return r;
}

Eigen::Vector3d qutrit_rate_evolution(const QutritRates& rates, const Eigen::Vector3d& p0,
                                      double t) {
    const Eigen::Matrix3d propagator = (qutrit_rate_matrix(rates) * t).exp();
    return propagator * p0;
}

double erasure_bias_ratio(const QutritRates& rates) {
    rates.validate();
    if (rates.gamma_01 <= 0.0) return std::numeric_limits<double>::infinity();
    return rates.gamma_21 / rates.gamma_01;
}

double missed_erasure_probability(double gamma_erasure, double T_check,
                                  double p_false_negative) {
    if (gamma_erasure < 0 || T_check < 0 || p_false_negative < 0 || p_false_negative > 1)
        throw std::invalid_argument("missed_erasure_probability: invalid inputs");
    return gamma_erasure * T_check * p_false_negative;
}

double channel_fidelity_decay(double gamma_relax, double gamma_phase) {
    return (gamma_relax + 2.0 * gamma_phase) / 3.0;
}

double gain_factor(double gamma_01_qubit, double gamma_02_erasure) {
    if (gamma_02_erasure <= 0) throw std::invalid_argument("gain_factor: decay rate must be > 0");
    return gamma_01_qubit / gamma_02_erasure;
}

Mat logical_x(const FockSpace& space) {
    if (space.dim < 3) throw std::invalid_argument("logical_x: needs dim >= 3");
    Mat x = Mat::Identity(space.dim, space.dim);
    x(0, 0) = 0.0;
    x(2, 2) = 0.0;
    x(0, 2) = 1.0;
    x(2, 0) = 1.0;
    return x;
}

}  // namespace erasim
