#include "erasim/selftest.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

#include "erasim/measure.hpp"
#include "erasim/rb.hpp"
#include "erasim/rng.hpp"
#include "erasim/tomography.hpp"

namespace erasim {

namespace {

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (detail.tellp() > 0) detail << "; ";
            detail << what;
        }
    }
    void note(const std::string& what) {
        if (detail.tellp() > 0) detail << "; ";
        detail << what;
    }
};

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

bool within_rel(double value, double target, double rel) {
    return std::abs(value - target) <= rel * std::abs(target);
}

ErasureQubitConfig loss_only_config(double kappa_tau, int dim, int max_jumps) {
    ErasureQubitConfig cfg;
    cfg.dim = dim;
    cfg.max_jumps = max_jumps;
    cfg.tau = kappa_tau * cfg.params.T1_c;
    cfg.T_cycle = cfg.tau;
    return cfg;
}

// 1. M-cycle loss-only channel equals the closed form to 1e-12.
CriterionResult criterion_oracle_equivalence() {
    Check c;
    double worst = 0.0;
    for (double kt : {0.01, 0.0255, 0.1}) {
        ErasureQubitConfig cfg = loss_only_config(kt, 3, -1);
        const double kappa = cfg.params.kappa_c();
        const CycleChannel cycle(cfg);
        DensityMatrix rho = DensityMatrix::pure(Ket::fock(FockSpace(3), 2));
        for (int m = 1; m <= 200; ++m) {
            const auto stepped = cycle(rho);
            rho = stepped.state;
            const double dev = std::abs(rho.population(2) - analytic_p1L_cycles(kappa, cfg.tau, m));
            worst = std::max(worst, dev);
        }
    }
    c.require(worst < 1e-12, "max deviation " + fmt(worst));
    c.note("max |channel - closed form| = " + fmt(worst));
    return {1, "analytic-vs-channel oracle", c.ok, c.detail.str()};
}

// 2. gamma_int from the device parameters.
CriterionResult criterion_gamma_int() {
    Check c;
    const double rate = intrinsic_relaxation_rate(1.0 / 466e-6, 11.9e-6, 13.0e-6);
    c.require(within_rel(rate, 1.0 / 19.9e-3, 0.01), "vs (19.9 ms)^-1: " + fmt(rate));
    c.require(within_rel(rate, 1.0 / 20.0e-3, 0.01), "vs (20 ms)^-1: " + fmt(rate));
    c.note("gamma_int = 1/(" + fmt(1e3 / rate) + " ms)");
    return {2, "intrinsic relaxation rate", c.ok, c.detail.str()};
}

// 3. erasure bias ratio from the measured qutrit rates.
CriterionResult criterion_bias_ratio() {
    Check c;
    const double ratio = erasure_bias_ratio(QutritRates::reference());
    c.require(std::abs(ratio - 265.0) <= 2.0, "ratio " + fmt(ratio));
    c.note("bias ratio = " + fmt(ratio));
    return {3, "erasure bias ratio", c.ok, c.detail.str()};
}

// 4. break-even arithmetic and gain factor.
CriterionResult criterion_break_even() {
    Check c;
    const SystemParams p = SystemParams::defaults();
    const double gamma01 = channel_fidelity_decay(1.0 / p.T1_c, 1.0 / p.T2R_c);
    c.require(within_rel(gamma01, 1.0 / 0.62e-3, 0.01), "Gamma01 " + fmt(gamma01));
    const double gamma02 = channel_fidelity_decay(1.0 / 6.2e-3, 1.0 / 3.1e-3);
    const double gain = gain_factor(gamma01, gamma02);
    c.require(std::abs(gain - 6.0) <= 0.1, "gain " + fmt(gain));
    c.note("Gamma01 = 1/(" + fmt(1e3 / gamma01) + " ms), gain = " + fmt(gain));
    return {4, "break-even arithmetic", c.ok, c.detail.str()};
}

// 5. missed-erasure probability.
CriterionResult criterion_missed_erasure() {
    Check c;
    const double v = missed_erasure_probability(1.0 / 197e-6, 1.1e-6, 0.0069);
    c.require(within_rel(v, 4.0e-5, 0.05), "value " + fmt(v));
    c.note("missed erasure = " + fmt(v * 100.0) + "%");
    return {5, "missed-erasure probability", c.ok, c.detail.str()};
}

// 6. exhaustive cascaded classification map on Fock 0..3.
CriterionResult criterion_classification() {
    Check c;
    const FockSpace space(4);
    const auto ideal = DetectionErrorModel::ideal();
    for (int n = 0; n < 4; ++n) {
        const DensityMatrix rho = DensityMatrix::pure(Ket::fock(space, n));
        for (int rep = 0; rep < 64; ++rep) {
            CounterRng rng(7, static_cast<std::uint64_t>(n * 64 + rep));
            const auto out = mod2_then_mod4_classify(rho, ideal, rng);
            c.require(out.label == n,
                      "|" + std::to_string(n) + "> -> " + std::to_string(out.label));
            if (!c.ok) break;
        }
        if (!c.ok) break;
    }
    if (c.ok) c.note("'00','01','10','11' map exact on Fock 0..3");
    return {6, "classification oracle", c.ok, c.detail.str()};
}

// 7. five-point tomography of the cardinal states.
CriterionResult criterion_five_point() {
    Check c;
    struct Cardinal {
        const char* name;
        Complex a, b;
        double x, y, z;
    };
    const Complex i1(0.0, 1.0);
    const std::vector<Cardinal> cards = {
        {"0L", 1.0, 0.0, 0.0, 0.0, 1.0},
        {"1L", 0.0, 1.0, 0.0, 0.0, -1.0},
        {"+x", 1.0, 1.0, 1.0, 0.0, 0.0},
        {"+y", 1.0, i1, 0.0, 1.0, 0.0},
    };
    std::vector<Complex> alphas;
    for (Complex a : five_point_alphas()) alphas.push_back(a);
    for (const auto& card : cards) {
        Vec v(2);
        v << card.a, card.b;
        const DensityMatrix target = DensityMatrix::pure(Ket(v));
        const auto samples = synthesize_wigner_samples(target, alphas, 2);
        std::array<double, 5> parities{};
        for (int i = 0; i < 5; ++i) parities[i] = samples[i].parity_expectation;
        const PauliVector pv = logical_paulis_from_parity(parities);
        c.require(std::abs(pv.i - 1.0) < 1e-6 && std::abs(pv.x - card.x) < 1e-6 &&
                      std::abs(pv.y - card.y) < 1e-6 && std::abs(pv.z - card.z) < 1e-6,
                  std::string(card.name) + " pauli vector deviates");
        const MleResult mle = mle_state(samples, 2);
        const double f = state_fidelity(mle.rho, target);
        c.require(f >= 1.0 - 1e-6, std::string(card.name) + " MLE fidelity " + fmt(f));
    }
    if (c.ok) c.note("pauli vectors within 1e-6, MLE fidelity >= 1 - 1e-6");
    return {7, "five-point tomography", c.ok, c.detail.str()};
}

// 8. qutrit operator basis and process tomography of the ideal half rotation.
CriterionResult criterion_process_tomography() {
    Check c;
    const auto& basis = qutrit_operator_basis();
    double gram_dev = 0.0;
    for (int m = 0; m < 9; ++m)
        for (int n = 0; n < 9; ++n) {
            const Complex g = (basis[m].adjoint() * basis[n]).trace();
            gram_dev = std::max(gram_dev, std::abs(g - (m == n ? Complex(3.0) : Complex(0.0))));
        }
    c.require(gram_dev < 1e-12, "basis gram deviation " + fmt(gram_dev));

    const Mat u = xl_half_unitary();
    const auto inputs = process_input_states();
    std::vector<DensityMatrix> outputs;
    for (const auto& rho : inputs)
        outputs.push_back(DensityMatrix::from_matrix(u * rho.matrix() * u.adjoint(), false));
    const ChiMatrix chi = process_tomography(inputs, outputs);
    const ChiMatrix chi_ideal = chi_of_qutrit_unitary(u);
    const double f_full = process_fidelity(chi, chi_ideal);
    c.require(std::abs(f_full - 1.0) < 1e-8, "full F_chi " + fmt(f_full));
    const double f_red =
        process_fidelity(reduced_logical_chi(chi).chi, reduced_logical_chi(chi_ideal).chi);
    c.require(std::abs(f_red - 1.0) < 1e-8, "reduced F_chi " + fmt(f_red));
    c.note("F_chi(full) = " + fmt(f_full) + ", F_chi(reduced) = " + fmt(f_red));
    return {8, "qutrit basis and process tomography", c.ok, c.detail.str()};
}

// 9. RB recovery correctness plus injected-vs-recovered noise.
CriterionResult criterion_rb() {
    Check c;
    const auto& table = clifford_table();
    for (int trial = 0; trial < 100; ++trial) {
        CounterRng rng(42, static_cast<std::uint64_t>(trial));
        const int m = static_cast<int>(rng.uniform_index(51));
        const RbSequence seq = compile_rb_sequence(m, rng.next_u64());
        Mat2 product = Mat2::Identity();
        for (int g : seq.gates) product = table[g].su2 * product;
        product = table[seq.recovery].su2 * product;
        c.require(equal_up_to_phase(product, Mat2::Identity()),
                  "recovery fails at trial " + std::to_string(trial));
        if (!c.ok) break;
    }

    ErasureQubitConfig cfg;
    cfg.dim = 3;
    GateNoiseModel noise;
    noise.p_erasure_per_gate = 4.5e-2;
    noise.residual = depolarizing_residual(2.86e-3);
    const std::vector<int> lengths = {1, 4, 7, 10, 14, 18, 22, 26, 31, 36, 42, 48};
    const RbResult rb = run_rb(cfg, noise, lengths, 10000, 20240802);

    const auto n = static_cast<Eigen::Index>(lengths.size());
    Eigen::VectorXd sigma_s(n), sigma_p(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double s = rb.survival[i];
        sigma_s(i) = std::sqrt(std::max(s * (1.0 - s), 1e-9) / 10000.0);
        const double ns = std::max<long>(rb.survivors[i], 1);
        sigma_p(i) = std::sqrt(std::max(rb.p0L[i] * (1.0 - rb.p0L[i]), 1e-9) / ns);
    }
    const RbErasureFit erasure = rb_survival_fit(lengths, rb.survival, sigma_s);
    c.require(within_rel(erasure.erasure_per_gate, 4.5e-2, 0.05),
              "erasure per gate " + fmt(erasure.erasure_per_gate));
    const RbFit residual = rb_fit(lengths, rb.p0L, 0.5, sigma_p);
    c.require(within_rel(residual.r_gate, 2.86e-3, 0.10), "r_gate " + fmt(residual.r_gate));
    c.note("erasure/gate = " + fmt(erasure.erasure_per_gate) +
           ", r_gate = " + fmt(residual.r_gate));
    return {9, "randomized benchmarking", c.ok, c.detail.str()};
}

// 10. rate-equation refit of noiseless synthetic curves.
CriterionResult criterion_rate_fit() {
    Check c;
    const QutritRates rates = QutritRates::reference();
    const int n = 60;
    Eigen::VectorXd t(n);
    Eigen::MatrixXd pops(3, n);
    for (int i = 0; i < n; ++i) {
        t(i) = 2e-3 * i / (n - 1);
        pops.col(i) = qutrit_rate_evolution(rates, {0.0, 0.0, 1.0}, t(i));
    }
    const FitResult fit = fit_rate_equations(t, pops, rates.gamma_10, rates.gamma_01);
    c.require(fit.converged, "fit did not converge");
    c.require(within_rel(fit.value("gamma_21"), rates.gamma_21, 0.01),
              "gamma_21 " + fmt(fit.value("gamma_21")));
    c.require(within_rel(fit.value("gamma_12"), rates.gamma_12, 0.01),
              "gamma_12 " + fmt(fit.value("gamma_12")));
    c.note("gamma_21 = 1/(" + fmt(1e6 / fit.value("gamma_21")) + " us), gamma_12 = 1/(" +
           fmt(1e3 / fit.value("gamma_12")) + " ms)");
    return {10, "rate-equation fit", c.ok, c.detail.str()};
}

// 11. effective-model fit with an injected residual rate.
CriterionResult criterion_effective_fit() {
    Check c;
    const double kappa = 1.0 / 466e-6, tau = 11.9e-6, T = 13.0e-6;
    const double gamma_res = 1.0 / 8.9e-3;
    const int m_max = 80;
    Eigen::VectorXd t(m_max + 1), y(m_max + 1);
    for (int m = 0; m <= m_max; ++m) {
        t(m) = m * T;
        y(m) = analytic_p1L_cycles(kappa, tau, m) * std::exp(-gamma_res * t(m));
    }
    const FitResult fit = fit_effective_relaxation(t, y, kappa, tau, T);
    c.require(fit.converged, "fit did not converge");
    c.require(within_rel(fit.value("gamma_res"), gamma_res, 0.02),
              "gamma_res " + fmt(fit.value("gamma_res")));
    c.require(within_rel(fit.value("gamma_total"), 1.0 / 6.2e-3, 0.03),
              "gamma_total " + fmt(fit.value("gamma_total")));
    c.note("gamma_res = 1/(" + fmt(1e3 / fit.value("gamma_res")) + " ms), gamma_total = 1/(" +
           fmt(1e3 / fit.value("gamma_total")) + " ms)");
    return {11, "effective-model fit", c.ok, c.detail.str()};
}

// 12. echo property: CPMG >= Ramsey; no-jump branch gives <X_L> = 1.
CriterionResult criterion_echo() {
    Check c;
    for (double kt : {0.01, 0.0255, 0.1}) {
        const ErasureQubitConfig cfg = loss_only_config(kt, 3, -1);
        const IdlingResult ramsey = simulate_ramsey(cfg, 100);
        const IdlingResult cpmg = simulate_cpmg(cfg, 100);
        for (int m = 0; m <= 100; ++m) {
            c.require(cpmg.x_expect[m] >= ramsey.x_expect[m] - 1e-12,
                      "kt=" + fmt(kt) + " M=" + std::to_string(m));
            if (!c.ok) break;
        }
        if (!c.ok) break;
    }
    const ErasureQubitConfig nojump = loss_only_config(0.0255, 3, 0);
    const IdlingResult echo = simulate_cpmg(nojump, 50);
    double worst = 0.0;
    for (double x : echo.x_expect) worst = std::max(worst, std::abs(x - 1.0));
    c.require(worst < 1e-10, "no-jump echo deviation " + fmt(worst));
    c.note("CPMG >= Ramsey on the kappa*tau grid; no-jump echo deviation " + fmt(worst));
    return {12, "echo property", c.ok, c.detail.str()};
}

// 13. numerical hygiene across the toolkit.
CriterionResult criterion_hygiene() {
    Check c;
    const FockSpace space(4);

    const KrausChannel loss = photon_loss_kraus(1.0 / 466e-6, 11.9e-6, space, 3);
    c.require(loss.completeness_defect() < 1e-12,
              "Kraus completeness " + fmt(loss.completeness_defect()));

    LindbladSpec spec;
    spec.collapse_operators = thermal_loss_collapse_ops(466e-6, 0.0072, space);
    DensityMatrix rho = DensityMatrix::pure(Ket::fock(space, 2));
    const DensityMatrix evolved = lindblad_evolve(rho, spec, 50e-6, 0.5e-6);
    c.require(std::abs(evolved.trace() - 1.0) < 1e-8, "trace drift " + fmt(evolved.trace() - 1.0));
    c.require(hermiticity_defect(evolved.matrix()) < 1e-9, "hermiticity defect");

    // adversarial samples that violate positivity under linear inversion
    std::vector<Complex> alphas;
    for (Complex a : five_point_alphas()) alphas.push_back(a);
    Vec v(2);
    v << 1.0, 1.0;
    auto samples = synthesize_wigner_samples(DensityMatrix::pure(Ket(v)), alphas, 2);
    for (auto& s : samples) s.parity_expectation = std::min(1.0, s.parity_expectation * 1.2);
    const MleResult mle = mle_state(samples, 2);
    Eigen::SelfAdjointEigenSolver<Mat> es(mle.rho.matrix());
    c.require(es.eigenvalues().minCoeff() >= -1e-9,
              "MLE min eigenvalue " + fmt(es.eigenvalues().minCoeff()));

    // central-difference Jacobian of the exponential model vs analytic
    const Eigen::Vector3d p(0.8, 120.0, 0.1);
    Eigen::VectorXd ts(5);
    ts << 0.0, 1e-3, 2e-3, 5e-3, 1e-2;
    auto model = [&](const Eigen::VectorXd& q) {
        Eigen::VectorXd r(ts.size());
        for (Eigen::Index i = 0; i < ts.size(); ++i)
            r(i) = q(0) * std::exp(-q(1) * ts(i)) + q(2);
        return r;
    };
    const Eigen::MatrixXd jn = numeric_jacobian(model, p);
    double jac_dev = 0.0;
    for (Eigen::Index i = 0; i < ts.size(); ++i) {
        const double e = std::exp(-p(1) * ts(i));
        jac_dev = std::max(jac_dev, std::abs(jn(i, 0) - e) / std::max(std::abs(e), 1e-12));
        const double d1 = -p(0) * ts(i) * e;
        if (std::abs(d1) > 1e-12)
            jac_dev = std::max(jac_dev, std::abs(jn(i, 1) - d1) / std::abs(d1));
        jac_dev = std::max(jac_dev, std::abs(jn(i, 2) - 1.0));
    }
    c.require(jac_dev < 1e-4, "jacobian deviation " + fmt(jac_dev));
    c.note("kraus/lindblad/MLE/jacobian checks within tolerance");
    return {13, "numerical hygiene", c.ok, c.detail.str()};
}

}  // namespace

std::vector<CriterionResult> run_acceptance_suite() {
    std::vector<std::function<CriterionResult()>> criteria = {
        criterion_oracle_equivalence, criterion_gamma_int,     criterion_bias_ratio,
        criterion_break_even,         criterion_missed_erasure, criterion_classification,
        criterion_five_point,         criterion_process_tomography, criterion_rb,
        criterion_rate_fit,           criterion_effective_fit, criterion_echo,
        criterion_hygiene,
    };
    std::vector<CriterionResult> results;
    results.reserve(criteria.size());
    for (auto& fn : criteria) {
        try {
            results.push_back(fn());
        } catch (const std::exception& e) {
            CriterionResult r;
            r.index = static_cast<int>(results.size()) + 1;
            r.name = "criterion " + std::to_string(r.index);
            r.passed = false;
            r.detail = std::string("exception: ") + e.what();
            results.push_back(r);
        }
    }
    return results;
}

int run_acceptance_suite(std::ostream& os) {
    int failures = 0;
    for (const auto& r : run_acceptance_suite()) {
        os << (r.passed ? "PASS" : "FAIL") << " criterion " << r.index << " (" << r.name << ")";
        if (!r.detail.empty()) os << ": " << r.detail;
        os << "\n";
        if (!r.passed) ++failures;
    }
    return failures;
}

}  // namespace erasim
