#include "erasim/measure.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace erasim {

DetectionErrorModel DetectionErrorModel::from_rates(double p_fp, double p_fn, double p_dephasing) {
    DetectionErrorModel m;
    m.p_false_positive = p_fp;
    m.p_false_negative = p_fn;
    m.p_induced_dephasing = p_dephasing;
    m.readout_assignment << 1.0 - p_fp, p_fp, p_fn, 1.0 - p_fn;
    m.validate();
    return m;
}

DetectionErrorModel DetectionErrorModel::reference_check() {
    return from_rates(0.0022, 0.0069, 0.0026);
}

void DetectionErrorModel::validate() const {
    auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!in_unit(p_false_positive) || !in_unit(p_false_negative) || !in_unit(p_induced_dephasing))
        throw std::invalid_argument("DetectionErrorModel: probabilities must lie in [0, 1]");
    for (int r = 0; r < 2; ++r) {
        if (!in_unit(readout_assignment(r, 0)) || !in_unit(readout_assignment(r, 1)) ||
            std::abs(readout_assignment.row(r).sum() - 1.0) > 1e-12)
            throw std::invalid_argument("DetectionErrorModel: confusion rows must sum to 1");
    }
}

ShotRecord ShotRecord::make(std::vector<std::uint8_t> bits, int label) {
    ShotRecord s;
    s.erased = false;
    for (auto b : bits) s.erased = s.erased || (b != 0);
    s.check_bits = std::move(bits);
    s.final_label = label;
    return s;
}

namespace {

std::string bits_string(const std::vector<std::uint8_t>& bits) {
    std::string s;
    s.reserve(bits.size());
    for (auto b : bits) s.push_back(b ? '1' : '0');
    return s;
}

}  // namespace

void write_shots_csv(std::ostream& os, const std::vector<ShotRecord>& shots) {
    os << "shot_index,check_bits,erased,final_label\n";
    for (std::size_t i = 0; i < shots.size(); ++i) {
        os << i << ',' << bits_string(shots[i].check_bits) << ',' << (shots[i].erased ? 1 : 0)
           << ',' << shots[i].final_label << '\n';
    }
}

void write_shots_ndjson(std::ostream& os, const std::vector<ShotRecord>& shots) {
    for (std::size_t i = 0; i < shots.size(); ++i) {
        os << "{\"shot_index\":" << i << ",\"check_bits\":\"" << bits_string(shots[i].check_bits)
           << "\",\"erased\":" << (shots[i].erased ? "true" : "false")
           << ",\"final_label\":" << shots[i].final_label << "}\n";
    }
}

namespace {

int flip_bit(int ideal, const Eigen::Matrix2d& confusion, CounterRng& rng) {
    return rng.bernoulli(confusion(ideal, 1)) ? 1 : 0;
}

// Applies the per-check phase damping on the {|0>,|2>} coherence:
// rho_02 -> (1 - 2 p) rho_02.
void apply_induced_dephasing(Mat& m, double p) {
    if (p <= 0.0 || m.rows() < 3) return;
    const double factor = 1.0 - 2.0 * p;
    m(0, 2) *= factor;
    m(2, 0) *= factor;
}

// Two-outcome diagonal POVM given the excited-ancilla probability per Fock
// level. Returns the ideal bit and collapses the state.
int sample_diagonal_povm(Mat& m, const Vec& p_excited, CounterRng& rng) {
    const int dim = static_cast<int>(m.rows());
    double p1 = 0.0;
    for (int n = 0; n < dim; ++n) p1 += p_excited(n).real() * m(n, n).real();
    const double tr = m.trace().real();
    if (tr <= 0.0) throw std::runtime_error("measurement on vanishing state");
    p1 /= tr;

    const int bit = rng.bernoulli(p1) ? 1 : 0;
    Vec amp(dim);
    for (int n = 0; n < dim; ++n) {
        const double pe = p_excited(n).real();
        amp(n) = bit ? std::sqrt(pe) : std::sqrt(1.0 - pe);
    }
    m = amp.asDiagonal() * m * amp.asDiagonal();
    const double post_tr = m.trace().real();
    if (post_tr <= 1e-15) throw std::runtime_error("measurement collapsed state to zero");
    m /= post_tr;
    return bit;
}

Vec parity_excitation_profile(int dim) {
    Vec p(dim);
    for (int n = 0; n < dim; ++n) p(n) = (n % 2 == 0) ? 0.0 : 1.0;
    return p;
}

}  // namespace

ParityOutcome parity_measure(const DensityMatrix& rho, const DetectionErrorModel& errors,
                             CounterRng& rng) {
    Mat m = rho.matrix();
    const int ideal = sample_diagonal_povm(m, parity_excitation_profile(rho.dim()), rng);
    apply_induced_dephasing(m, errors.p_induced_dephasing);
    const int reported = flip_bit(ideal, errors.readout_assignment, rng);
    return {reported, DensityMatrix::from_matrix(std::move(m), false)};
}

ClassifyOutcome mod2_then_mod4_classify(const DensityMatrix& rho,
                                        const DetectionErrorModel& errors, CounterRng& rng) {
    if (rho.dim() < 4)
        throw std::invalid_argument("mod2_then_mod4_classify: needs dim >= 4");
    const int dim = rho.dim();
    Mat m = rho.matrix();

    const int b1_ideal = sample_diagonal_povm(m, parity_excitation_profile(dim), rng);
    apply_induced_dephasing(m, errors.p_induced_dephasing);
    const int b1 = flip_bit(b1_ideal, errors.readout_assignment, rng);

    // Second check: conditional branch on the reported first bit. For b1=0
    // the controlled pi/2 phase sits between X/2 and -X/2 ancilla rotations,
    // exciting the ancilla with probability (1 - cos(n pi/2))/2; for b1=1 the
    // closing rotation is -Y/2 and the profile becomes (1 - sin(n pi/2))/2.
    Vec p_excited(dim);
    for (int n = 0; n < dim; ++n) {
        const double phase = n * M_PI / 2.0;
        p_excited(n) = b1 == 0 ? (1.0 - std::cos(phase)) / 2.0 : (1.0 - std::sin(phase)) / 2.0;
    }
    const int b2_ideal = sample_diagonal_povm(m, p_excited, rng);
    apply_induced_dephasing(m, errors.p_induced_dephasing);
    const int b2 = flip_bit(b2_ideal, errors.readout_assignment, rng);

    ClassifyOutcome out{{static_cast<std::uint8_t>(b1), static_cast<std::uint8_t>(b2)},
                        2 * b2 + b1,
                        DensityMatrix::from_matrix(std::move(m), false)};
    return out;
}

int photon_number_resolved_measure(const DensityMatrix& rho, const DetectionErrorModel& errors,
                                   CounterRng& rng) {
    const int dim = rho.dim();
    std::vector<double> pops(dim);
    for (int n = 0; n < dim; ++n) pops[n] = std::max(0.0, rho.population(n));
    const int n_true = static_cast<int>(rng.discrete(pops));

    // march the selective probes in Fock order; the first reported flip wins
    const double p_fire_correct = errors.readout_assignment(1, 1);
    const double p_fire_false = errors.readout_assignment(0, 1);
    for (int k = 0; k < dim; ++k) {
        const double p_fire = (k == n_true) ? p_fire_correct : p_fire_false;
        if (rng.bernoulli(p_fire)) return k;
    }
    return -1;
}

namespace {

MetricEstimate ratio_estimate(long num, long den) {
    MetricEstimate e;
    e.numerator = num;
    e.denominator = den;
    if (den > 0) {
        e.value = static_cast<double>(num) / static_cast<double>(den);
        e.standard_error = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(den));
    }
    return e;
}

bool is_logical(int label) { return label == 0 || label == 2; }

}  // namespace

AssignmentMetrics assignment_metrics(const std::vector<std::pair<int, ShotRecord>>& shots) {
    long n2 = 0, n2_as0 = 0;  // prepared |2>, read '00'
    long n0 = 0, n0_as2 = 0;  // prepared |0>, read '10'
    long fp_den = 0, fp_num = 0;
    long fn_den = 0, fn_num = 0;

    for (const auto& [prepared, shot] : shots) {
        if (prepared == 2) {
            ++n2;
            if (shot.final_label == 0) ++n2_as0;
        } else if (prepared == 0) {
            ++n0;
            if (shot.final_label == 2) ++n0_as2;
        }
        if (is_logical(prepared) && is_logical(shot.final_label)) {
            ++fp_den;
            if (shot.erased) ++fp_num;
        }
        if (!is_logical(prepared) && !is_logical(shot.final_label)) {
            ++fn_den;
            if (!shot.erased) ++fn_num;
        }
    }

    AssignmentMetrics m;
    const MetricEstimate e2 = ratio_estimate(n2_as0, n2);
    const MetricEstimate e0 = ratio_estimate(n0_as2, n0);
    m.logical_assignment_error.value = (e2.value + e0.value) / 2.0;
    m.logical_assignment_error.standard_error =
        std::sqrt(e2.standard_error * e2.standard_error + e0.standard_error * e0.standard_error) /
        2.0;
    m.logical_assignment_error.numerator = n2_as0 + n0_as2;
    m.logical_assignment_error.denominator = n2 + n0;
    m.false_positive = ratio_estimate(fp_num, fp_den);
    m.false_negative = ratio_estimate(fn_num, fn_den);
    return m;
}

}  // namespace erasim
