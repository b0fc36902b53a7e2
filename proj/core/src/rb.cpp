#include "erasim/rb.hpp"

#include <cmath>
#include <stdexcept>

#include "erasim/rng.hpp"

namespace erasim {

Mat2 primitive_unitary(Primitive p) {
    const Complex i1(0.0, 1.0);
    Mat2 u = Mat2::Identity();
    switch (p) {
        case Primitive::Identity:
            break;
        case Primitive::XHalf: {
            const double c = std::cos(M_PI / 4.0), s = std::sin(M_PI / 4.0);
            u << c, -i1 * s, -i1 * s, c;
            break;
        }
        case Primitive::ZHalf:
            u << std::exp(-i1 * (M_PI / 4.0)), 0.0, 0.0, std::exp(i1 * (M_PI / 4.0));
            break;
        case Primitive::MinusZHalf:
            u << std::exp(i1 * (M_PI / 4.0)), 0.0, 0.0, std::exp(-i1 * (M_PI / 4.0));
            break;
        case Primitive::Z:
            u << -i1, 0.0, 0.0, i1;
            break;
    }
    return u;
}

namespace {

using P = Primitive;

std::vector<std::vector<Primitive>> table_decompositions() {
    return {
        {P::Identity},
        {P::XHalf, P::XHalf},
        {P::MinusZHalf, P::XHalf, P::XHalf, P::ZHalf},
        {P::MinusZHalf, P::XHalf, P::XHalf, P::ZHalf, P::XHalf, P::XHalf},
        {P::XHalf},
        {P::Z, P::XHalf, P::Z},
        {P::MinusZHalf, P::XHalf, P::ZHalf},
        {P::ZHalf, P::XHalf, P::MinusZHalf},
        {P::Z, P::XHalf, P::Z, P::MinusZHalf, P::XHalf, P::ZHalf, P::XHalf},
        {P::Z, P::XHalf, P::Z, P::ZHalf, P::XHalf, P::MinusZHalf, P::XHalf},
        {P::XHalf, P::XHalf, P::ZHalf, P::XHalf, P::MinusZHalf},
        {P::XHalf, P::XHalf, P::MinusZHalf, P::XHalf, P::ZHalf},
        {P::MinusZHalf, P::XHalf, P::XHalf, P::ZHalf, P::XHalf},
        {P::MinusZHalf, P::XHalf, P::XHalf, P::ZHalf, P::Z, P::XHalf, P::Z},
        {P::XHalf, P::MinusZHalf, P::XHalf, P::ZHalf, P::XHalf},
        {P::Z, P::XHalf, P::Z, P::MinusZHalf, P::XHalf, P::ZHalf, P::Z, P::XHalf, P::Z},
        {P::MinusZHalf, P::XHalf, P::ZHalf, P::XHalf},
        {P::MinusZHalf, P::XHalf, P::ZHalf, P::Z, P::XHalf, P::Z},
        {P::ZHalf, P::XHalf, P::MinusZHalf, P::XHalf},
        {P::ZHalf, P::XHalf, P::MinusZHalf, P::Z, P::XHalf, P::Z},
        {P::Z, P::XHalf, P::Z, P::ZHalf, P::XHalf, P::MinusZHalf},
        {P::XHalf, P::ZHalf, P::XHalf, P::MinusZHalf},
        {P::Z, P::XHalf, P::Z, P::MinusZHalf, P::XHalf, P::ZHalf},
        {P::XHalf, P::MinusZHalf, P::XHalf, P::ZHalf},
    };
}

}  // namespace

const std::array<CliffordElement, 24>& clifford_table() {
    static const std::array<CliffordElement, 24> table = [] {
        std::array<CliffordElement, 24> t;
        const auto decomps = table_decompositions();
        for (int i = 0; i < 24; ++i) {
            t[i].index = i;
            t[i].decomposition = decomps[i];
            Mat2 u = Mat2::Identity();
            for (Primitive p : decomps[i]) u = primitive_unitary(p) * u;
            t[i].su2 = u;
        }
        return t;
    }();
    return table;
}

bool equal_up_to_phase(const Mat2& u, const Mat2& v, double tol) {
    return std::abs((u.adjoint() * v).trace()) / 2.0 >= 1.0 - tol;
}

double mean_xhalf_per_clifford() {
    long count = 0;
    for (const auto& e : clifford_table())
        for (Primitive p : e.decomposition)
            if (p == Primitive::XHalf) ++count;
    return static_cast<double>(count) / 24.0;
}

RbSequence compile_rb_sequence(int length, std::uint64_t seed) {
    if (length < 0) throw std::invalid_argument("compile_rb_sequence: negative length");
    const auto& table = clifford_table();
    CounterRng rng(seed, 0);

    RbSequence seq;
    seq.gates.reserve(length);
    Mat2 product = Mat2::Identity();
    for (int i = 0; i < length; ++i) {
        const int g = static_cast<int>(rng.uniform_index(24));
        seq.gates.push_back(g);
        product = table[g].su2 * product;
    }
    const Mat2 target = product.adjoint();
    seq.recovery = -1;
    for (const auto& e : table) {
        if (equal_up_to_phase(e.su2, target)) {
            seq.recovery = e.index;
            break;
        }
    }
    if (seq.recovery < 0)
        throw std::runtime_error("compile_rb_sequence: no recovery element found");
    return seq;
}

KrausChannel depolarizing_residual(double average_error) {
    if (average_error < 0 || average_error > 0.5)
        throw std::invalid_argument("depolarizing_residual: average error outside [0, 0.5]");
    const double p = 2.0 * average_error;  // depolarizing parameter
    const Complex i1(0.0, 1.0);
    Mat x(2, 2), y(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    y << 0, -i1, i1, 0;
    z << 1, 0, 0, -1;
    std::vector<Mat> ops;
    ops.push_back(std::sqrt(1.0 - 0.75 * p) * Mat::Identity(2, 2));
    ops.push_back(std::sqrt(p / 4.0) * x);
    ops.push_back(std::sqrt(p / 4.0) * y);
    ops.push_back(std::sqrt(p / 4.0) * z);
    return KrausChannel(std::move(ops), true);
}

namespace {

// Embeds a logical 2x2 operator on span{|0>,|2>} of the qutrit.
Eigen::Matrix3cd embed_logical(const Mat2& u) {
    Eigen::Matrix3cd out = Eigen::Matrix3cd::Identity();
    out(0, 0) = u(0, 0);
    out(0, 2) = u(0, 1);
    out(2, 0) = u(1, 0);
    out(2, 2) = u(1, 1);
    return out;
}

struct ShotState {
    Eigen::Vector3cd psi;
    bool erased = false;
};

void kraus_sample(Eigen::Vector3cd& psi, const std::vector<Eigen::Matrix3cd>& ops,
                  CounterRng& rng) {
    double weights[8];
    Eigen::Vector3cd branches[8];
    const std::size_t n = ops.size();
    for (std::size_t k = 0; k < n; ++k) {
        branches[k] = ops[k] * psi;
        weights[k] = branches[k].squaredNorm();
    }
    const std::size_t pick = rng.discrete(std::span<const double>(weights, n));
    psi = branches[pick] / std::sqrt(weights[pick]);
}

}  // namespace

RbResult run_rb(const ErasureQubitConfig& config, const GateNoiseModel& noise,
                const std::vector<int>& lengths, long shots_per_length, std::uint64_t seed) {
    if (shots_per_length <= 0) throw std::invalid_argument("run_rb: shots must be positive");
    const auto& table = clifford_table();

    // Precompute embedded primitive unitaries and noise operators.
    std::array<Eigen::Matrix3cd, 5> prim;
    prim[0] = embed_logical(primitive_unitary(Primitive::Identity));
    prim[1] = embed_logical(primitive_unitary(Primitive::XHalf));
    prim[2] = embed_logical(primitive_unitary(Primitive::ZHalf));
    prim[3] = embed_logical(primitive_unitary(Primitive::MinusZHalf));
    prim[4] = embed_logical(primitive_unitary(Primitive::Z));
    auto prim_index = [](Primitive p) {
        switch (p) {
            case Primitive::Identity: return 0;
            case Primitive::XHalf: return 1;
            case Primitive::ZHalf: return 2;
            case Primitive::MinusZHalf: return 3;
            case Primitive::Z: return 4;
        }
        return 0;
    };

    std::vector<Eigen::Matrix3cd> residual_ops;
    if (noise.residual) {
        if (noise.residual->dim() != 2)
            throw std::invalid_argument("run_rb: residual channel must act on the logical qubit");
        for (const Mat& e : noise.residual->operators()) residual_ops.push_back(embed_logical(e));
    }
    std::vector<Eigen::Matrix3cd> idle_ops;
    if (noise.include_idling_loss) {
        const auto kraus = photon_loss_kraus(config.params.kappa_c(), noise.gate_duration,
                                             FockSpace(3), 2);
        for (const Mat& e : kraus.operators()) idle_ops.push_back(e);
    }

    const bool det_errors = config.include_detection_errors;
    const auto& confusion = config.detection.readout_assignment;

    RbResult result;
    result.shots_per_length = shots_per_length;
    for (std::size_t li = 0; li < lengths.size(); ++li) {
        const int m = lengths[li];
        if (m < 0) throw std::invalid_argument("run_rb: negative sequence length");
        long survived = 0;
        long zero_label = 0;
        for (long shot = 0; shot < shots_per_length; ++shot) {
            // fresh random sequence per shot; fully randomized benchmarking.
            // Streams are keyed by the length value so per-length calls
            // reproduce a combined call exactly.
            const std::uint64_t stream =
                (static_cast<std::uint64_t>(m) << 40) ^ static_cast<std::uint64_t>(shot);
            CounterRng rng(seed, stream);
            const RbSequence seq = compile_rb_sequence(m, rng.next_u64());

            ShotState st{Eigen::Vector3cd(1.0, 0.0, 0.0), false};
            bool flagged = false;

            auto apply_clifford = [&](int index) {
                for (Primitive p : table[index].decomposition) {
                    st.psi = prim[prim_index(p)] * st.psi;
                    if (p != Primitive::XHalf) continue;
                    if (!idle_ops.empty()) kraus_sample(st.psi, idle_ops, rng);
                    if (noise.p_erasure_per_gate > 0.0 &&
                        rng.bernoulli(noise.p_erasure_per_gate))
                        st.psi = Eigen::Vector3cd(0.0, 1.0, 0.0);
                    if (!residual_ops.empty()) kraus_sample(st.psi, residual_ops, rng);
                }
            };
            auto erasure_check = [&]() {
                const double p_odd = std::norm(st.psi(1));
                const int ideal = rng.bernoulli(p_odd) ? 1 : 0;
                if (ideal == 1) {
                    st.psi = Eigen::Vector3cd(0.0, 1.0, 0.0);
                } else {
                    st.psi(1) = 0.0;
                    st.psi.normalize();
                }
                int reported = ideal;
                if (det_errors) reported = rng.bernoulli(confusion(ideal, 1)) ? 1 : 0;
                if (reported == 1) flagged = true;
            };

            for (int g : seq.gates) {
                apply_clifford(g);
                erasure_check();
                if (flagged) break;
            }
            if (!flagged) {
                apply_clifford(seq.recovery);
                erasure_check();
            }
            if (flagged) continue;
            ++survived;

            // end-of-line readout: number-selective probe on |0>
            const double pops[3] = {std::norm(st.psi(0)), std::norm(st.psi(1)),
                                    std::norm(st.psi(2))};
            const int n_true = static_cast<int>(rng.discrete(std::span<const double>(pops, 3)));
            double p_assign0 = n_true == 0 ? 1.0 : 0.0;
            if (det_errors) p_assign0 = n_true == 0 ? confusion(1, 1) : confusion(0, 1);
            if (rng.bernoulli(p_assign0)) ++zero_label;
        }
        result.lengths.push_back(m);
        result.survival.push_back(static_cast<double>(survived) /
                                  static_cast<double>(shots_per_length));
        result.survivors.push_back(survived);
        result.p0L.push_back(survived > 0 ? static_cast<double>(zero_label) /
                                                static_cast<double>(survived)
                                          : 0.0);
    }
    return result;
}

RbFit rb_fit(const std::vector<int>& lengths, const std::vector<double>& values,
             std::optional<double> fix_offset, const Eigen::VectorXd& sigma) {
    if (lengths.size() != values.size() || lengths.size() < 2)
        throw std::invalid_argument("rb_fit: need matching lengths/values");
    Eigen::VectorXd t(lengths.size()), y(values.size());
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        t(static_cast<Eigen::Index>(i)) = lengths[i];
        y(static_cast<Eigen::Index>(i)) = values[i];
    }
    RbFit out;
    out.fit = fit_exponential(t, y, fix_offset, sigma);
    out.fit.model = "rb_exponential";
    out.A = out.fit.value("A");
    out.p = std::exp(-out.fit.value("gamma"));
    out.B = out.fit.value("B");
    out.r_clifford = (1.0 - out.p) / 2.0;
    out.r_gate = out.r_clifford / kXHalfPerCliffordDivisor;
    return out;
}

RbErasureFit rb_survival_fit(const std::vector<int>& lengths,
                             const std::vector<double>& survival,
                             const Eigen::VectorXd& sigma) {
    if (lengths.size() != survival.size() || lengths.size() < 2)
        throw std::invalid_argument("rb_survival_fit: need matching lengths/survival");
    Eigen::VectorXd t(lengths.size()), y(survival.size());
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        t(static_cast<Eigen::Index>(i)) = lengths[i];
        y(static_cast<Eigen::Index>(i)) = survival[i];
    }
    RbErasureFit out;
    out.fit = fit_exponential(t, y, 0.0, sigma);
    out.fit.model = "rb_survival";
    const double p = std::exp(-out.fit.value("gamma"));
    out.erasure_per_clifford = 1.0 - p;
    out.erasure_per_gate = 1.0 - std::pow(p, 1.0 / kXHalfPerCliffordDivisor);
    return out;
}

}  // namespace erasim
