#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "erasim/fock.hpp"
#include "erasim/rng.hpp"

namespace erasim {

// Phenomenological detection errors. False-positive / false-negative rates
// are outcome flips applied after ideal Born sampling; readout_assignment is
// the 2x2 confusion matrix (row = ideal outcome, column = reported outcome,
// rows sum to 1). from_rates keeps the two views consistent.
struct DetectionErrorModel {
    double p_false_positive = 0.0;
    double p_false_negative = 0.0;
    double p_induced_dephasing = 0.0;
    Eigen::Matrix2d readout_assignment = Eigen::Matrix2d::Identity();

    static DetectionErrorModel ideal() { return DetectionErrorModel{}; }
    static DetectionErrorModel from_rates(double p_fp, double p_fn, double p_dephasing = 0.0);
    // Mid-circuit check values measured on the reference device:
    // 0.22% false positive, 0.69% false negative, 0.26% dephasing per check.
    static DetectionErrorModel reference_check();

    void validate() const;
};

// One Monte Carlo experimental shot. final_label is the assigned Fock index
// (0..3); the logical reading is 0 -> 0_L, 2 -> 1_L, odd -> erasure.
struct ShotRecord {
    std::vector<std::uint8_t> check_bits;
    bool erased = false;
    int final_label = -1;

    static ShotRecord make(std::vector<std::uint8_t> bits, int label);
};

void write_shots_csv(std::ostream& os, const std::vector<ShotRecord>& shots);
void write_shots_ndjson(std::ostream& os, const std::vector<ShotRecord>& shots);

struct ParityOutcome {
    int bit;  // reported: 0 even (code space), 1 odd (erasure flag)
    DensityMatrix state;
};

// QND photon-number-parity measurement: Born sampling of the parity
// eigenprojectors, classical flip per the confusion matrix, induced
// dephasing of the {|0>,|2>} coherence on the post-state.
ParityOutcome parity_measure(const DensityMatrix& rho, const DetectionErrorModel& errors,
                             CounterRng& rng);

struct ClassifyOutcome {
    std::array<std::uint8_t, 2> bits;  // {b1, b2} in measurement order
    int label;                         // Fock index: b2 b1 -> 00:0 01:1 10:2 11:3
    DensityMatrix state;
};

// Cascaded photon-number modulo measurements distinguishing Fock 0..3. The
// first check splits even/odd; the second applies the branch selected by the
// reported first bit.
ClassifyOutcome mod2_then_mod4_classify(const DensityMatrix& rho,
                                        const DetectionErrorModel& errors, CounterRng& rng);

// Photon-number-resolved measurement through sequential number-selective
// probes, each dressed by the readout confusion matrix. Returns the assigned
// Fock index, or -1 when no probe fires.
int photon_number_resolved_measure(const DensityMatrix& rho, const DetectionErrorModel& errors,
                                   CounterRng& rng);

struct MetricEstimate {
    double value = 0.0;
    double standard_error = 0.0;
    long numerator = 0;
    long denominator = 0;
};

struct AssignmentMetrics {
    MetricEstimate logical_assignment_error;  // |2> read as '00' or |0> read as '10'
    MetricEstimate false_positive;            // flagged although the final outcome is logical
    MetricEstimate false_negative;            // unflagged although the final outcome is leakage
};

// prepared Fock index paired with the recorded shot.
AssignmentMetrics assignment_metrics(const std::vector<std::pair<int, ShotRecord>>& shots);

}  // namespace erasim
