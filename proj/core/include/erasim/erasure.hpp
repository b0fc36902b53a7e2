#pragma once

#include <cstdint>
#include <vector>

#include "erasim/channels.hpp"
#include "erasim/measure.hpp"

namespace erasim {

// Transition rates of the truncated {|0>,|1>,|2>} ladder, 1/s.
struct QutritRates {
    double gamma_21 = 0.0;
    double gamma_12 = 0.0;
    double gamma_10 = 0.0;
    double gamma_01 = 0.0;

    // Rates measured on the reference device: gamma_21 = (244 us)^-1,
    // gamma_12 = (33.6 ms)^-1, gamma_10 = 1/T1_c, gamma_01 = (64.7 ms)^-1.
    static QutritRates reference();

    void validate() const;
};

struct IdlingResult {
    std::vector<double> times;     // s (or cycle count for scans over M)
    std::vector<double> p1L;       // postselected population in |1_L>
    std::vector<double> survival;  // cumulative postselection survival
    std::vector<double> x_expect;  // <X_L> after postselection
};

struct ErasureQubitConfig {
    SystemParams params = SystemParams::defaults();
    double tau = 11.9e-6;      // idle interval between checks
    double T_cycle = 13.0e-6;  // full cycle duration (idle + check)
    DetectionErrorModel detection = DetectionErrorModel::ideal();

    int dim = 4;
    int max_jumps = -1;  // -1: full channel (dim - 1 jump orders)
    bool include_thermal = false;
    bool include_dephasing = false;
    bool include_detection_errors = false;
    // Whether the end-of-line tomography also postselects on even parity
    // (in addition to the M checks).
    bool postselect_final_parity = true;

    void validate() const;
    int effective_max_jumps() const { return max_jumps < 0 ? dim - 1 : max_jumps; }
};

// |0><0| + |2><2|
Mat code_projector(const FockSpace& space);

struct Projected {
    DensityMatrix state;
    double survival;  // pre-normalization trace
};

// Projects onto the code space and renormalizes; survival is the removed
// trace's complement. Throws when the projected trace vanishes.
Projected erasure_detection_channel(const DensityMatrix& rho);

// One experimental cycle: free evolution over tau followed by a mid-circuit
// erasure detection (with optional thermal excitation and detection-error
// dressing). operator() returns the accepted-branch state and its survival
// probability.
class CycleChannel {
public:
    explicit CycleChannel(const ErasureQubitConfig& config);

    Projected operator()(const DensityMatrix& rho) const;

    // free evolution only (used by the Monte Carlo paths)
    void free_evolve(Mat& rho) const;
    void free_evolve_half(Mat& rho) const;  // tau/2, for echo sequences

    // detection acting in place; returns acceptance probability
    double detect(Mat& rho) const;
    // flag probability and conditional collapse for sampled outcomes
    double flag_probability(const Mat& rho) const;

    const ErasureQubitConfig& config() const { return config_; }

private:
    ErasureQubitConfig config_;
    std::vector<Mat> kraus_full_;  // loss-only path, interval tau
    std::vector<Mat> kraus_half_;  // loss-only path, interval tau/2
    Mat superop_full_;             // Lindblad path, interval tau
    Mat superop_half_;
    bool use_superop_ = false;
};

// Closed-form postselected population in |1_L> after t/T cycles of loss at
// rate kappa over interval tau. t must be an integer multiple of T.
double analytic_p1L(double kappa, double tau, double T, double t);
double analytic_p1L_cycles(double kappa, double tau, int cycles);

// (kappa tau)^2 / T
double intrinsic_relaxation_rate(double kappa, double tau, double T);

// Deterministic density-matrix paths. Row m corresponds to M = m cycles
// (including M = 0).
IdlingResult simulate_relaxation(const ErasureQubitConfig& config, int M_max);
IdlingResult simulate_ramsey(const ErasureQubitConfig& config, int M_max);
IdlingResult simulate_cpmg(const ErasureQubitConfig& config, int M_max);

// Monte Carlo shot paths, seeded and reproducible per (seed, M, shot).
// M_grid selects the cycle counts to sample; empty means every cycle.
IdlingResult simulate_relaxation_mc(const ErasureQubitConfig& config, int M_max, long shots,
                                    std::uint64_t seed, std::vector<int> M_grid = {});
IdlingResult simulate_ramsey_mc(const ErasureQubitConfig& config, int M_max, long shots,
                                std::uint64_t seed, std::vector<int> M_grid = {});
IdlingResult simulate_cpmg_mc(const ErasureQubitConfig& config, int M_max, long shots,
                              std::uint64_t seed, std::vector<int> M_grid = {});

// Echoed sequence of fixed total duration with M evenly inserted checks
// (M even, or 0 for the bare echo); returns <X_L> versus M in x_expect.
IdlingResult induced_dephasing_scan(const ErasureQubitConfig& config,
                                    const std::vector<int>& M_list, double tau_tot);

Eigen::Matrix3d qutrit_rate_matrix(const QutritRates& rates);

// Exact solution of the coupled rate equations; p0 and the result are
// ordered (P0, P1, P2).
Eigen::Vector3d qutrit_rate_evolution(const QutritRates& rates, const Eigen::Vector3d& p0,
                                      double t);

// gamma_21 / gamma_01; +infinity when the upward rate vanishes.
double erasure_bias_ratio(const QutritRates& rates);

// (gamma_erasure * T_check) * p_false_negative
double missed_erasure_probability(double gamma_erasure, double T_check, double p_false_negative);

// Average channel fidelity decay rate (gamma_relax + 2 gamma_phase) / 3.
double channel_fidelity_decay(double gamma_relax, double gamma_phase);

double gain_factor(double gamma_01_qubit, double gamma_02_erasure);

// X_L on span{|0>,|2>}, identity elsewhere.
Mat logical_x(const FockSpace& space);

}  // namespace erasim
