#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "erasim/erasure.hpp"
#include "erasim/fit.hpp"

namespace erasim {

// Gate primitives of the logical single-qubit set. Z rotations are virtual
// (zero-duration frame changes); only XHalf is a physical pulse.
enum class Primitive { Identity, XHalf, ZHalf, MinusZHalf, Z };

using Mat2 = Eigen::Matrix2cd;

struct CliffordElement {
    int index = 0;
    std::vector<Primitive> decomposition;  // applied first-to-last
    Mat2 su2;                              // ordered product on span{|0>,|2>}
};

const std::array<CliffordElement, 24>& clifford_table();

Mat2 primitive_unitary(Primitive p);

// |Tr(U^dag V)|/2 >= 1 - tol
bool equal_up_to_phase(const Mat2& u, const Mat2& v, double tol = 1e-10);

// Exact average of physical half-rotations over the table (52/24).
double mean_xhalf_per_clifford();

// Rounded average used by the per-gate error conversions.
inline constexpr double kXHalfPerCliffordDivisor = 2.17;

struct RbSequence {
    std::vector<int> gates;  // indices into clifford_table()
    int recovery = 0;        // index inverting the whole sequence
};

// length uniform random Cliffords plus the unique recovery element; the
// same seed reproduces the same sequence.
RbSequence compile_rb_sequence(int length, std::uint64_t seed);

struct GateNoiseModel {
    double p_erasure_per_gate = 0.0;          // leakage to |1> per XHalf pulse
    std::optional<KrausChannel> residual;     // 2x2 channel after each XHalf
    double gate_duration = 1.2e-6;
    bool include_idling_loss = false;         // cavity loss over gate_duration

    static GateNoiseModel ideal() { return GateNoiseModel{}; }
};

// Logical depolarizing channel with the given average gate error.
KrausChannel depolarizing_residual(double average_error);

struct RbResult {
    std::vector<int> lengths;
    std::vector<double> survival;  // postselection survival fraction
    std::vector<double> p0L;       // postselected population in |0_L>
    std::vector<long> survivors;   // counts behind p0L
    long shots_per_length = 0;
};

// Randomized benchmarking with a mid-circuit erasure check after every
// Clifford (and after the recovery), postselecting on no flags. Detection
// errors follow config when config.include_detection_errors is set.
RbResult run_rb(const ErasureQubitConfig& config, const GateNoiseModel& noise,
                const std::vector<int>& lengths, long shots_per_length, std::uint64_t seed);

struct RbFit {
    FitResult fit;  // F(M) = A p^M + B
    double A = 0.0;
    double p = 0.0;
    double B = 0.0;
    double r_clifford = 0.0;  // (1 - p)/2
    double r_gate = 0.0;      // r_clifford / 2.17
};

RbFit rb_fit(const std::vector<int>& lengths, const std::vector<double>& values,
             std::optional<double> fix_offset = std::nullopt,
             const Eigen::VectorXd& sigma = {});

struct RbErasureFit {
    FitResult fit;
    double erasure_per_clifford = 0.0;  // 1 - p
    double erasure_per_gate = 0.0;      // 1 - p^(1/2.17)
};

// Exponential fit of the survival fraction (offset fixed at zero).
RbErasureFit rb_survival_fit(const std::vector<int>& lengths,
                             const std::vector<double>& survival,
                             const Eigen::VectorXd& sigma = {});

}  // namespace erasim
