#include <doctest.h>

#include <cmath>

#include "erasim/erasure.hpp"
#include "erasim/fit.hpp"

using namespace erasim;

namespace {

ErasureQubitConfig loss_only(double kappa_tau, int dim = 3, int max_jumps = -1) {
    ErasureQubitConfig cfg;
    cfg.dim = dim;
    cfg.max_jumps = max_jumps;
    cfg.tau = kappa_tau * cfg.params.T1_c;
    cfg.T_cycle = cfg.tau;
    return cfg;
}

}  // namespace

TEST_CASE("code projector") {
    const FockSpace space(4);
    const Mat p = code_projector(space);
    CHECK((p * p - p).cwiseAbs().maxCoeff() == 0.0);
    CHECK(p.trace().real() == doctest::Approx(2.0));
    CHECK((p * Ket::fock(space, 1).amplitudes()).norm() == 0.0);
}

TEST_CASE("erasure detection channel") {
    const FockSpace space(3);

    SUBCASE("code states pass untouched") {
        const DensityMatrix two = DensityMatrix::pure(Ket::fock(space, 2));
        const auto out = erasure_detection_channel(two);
        CHECK(out.survival == doctest::Approx(1.0));
        CHECK((out.state.matrix() - two.matrix()).cwiseAbs().maxCoeff() < 1e-15);
    }

    SUBCASE("leaked population is removed and renormalized") {
        Mat m = Mat::Zero(3, 3);
        m(1, 1) = 0.5;
        m(2, 2) = 0.5;
        const auto out = erasure_detection_channel(DensityMatrix::from_matrix(m));
        CHECK(out.survival == doctest::Approx(0.5));
        CHECK(out.state.population(2) == doctest::Approx(1.0));
    }

    SUBCASE("code coherences are preserved exactly") {
        Vec v(3);
        v << 1.0, 0.0, 1.0;
        const DensityMatrix plus = DensityMatrix::pure(Ket(v));
        const auto out = erasure_detection_channel(plus);
        CHECK(std::abs(out.state.coherence(0, 2) - plus.coherence(0, 2)) < 1e-15);
    }

    SUBCASE("fully erased state reports failure") {
        const DensityMatrix one = DensityMatrix::pure(Ket::fock(space, 1));
        CHECK_THROWS_AS(erasure_detection_channel(one), std::runtime_error);
    }
}

TEST_CASE("cycle channel survival from |2>") {
    const double kt = 0.0255;
    const ErasureQubitConfig cfg = loss_only(kt);
    const CycleChannel cycle(cfg);
    const DensityMatrix two = DensityMatrix::pure(Ket::fock(FockSpace(3), 2));
    const auto out = cycle(two);
    const double x = std::exp(-kt);
    CHECK(out.survival == doctest::Approx(x * x + (1.0 - x) * (1.0 - x)).epsilon(1e-12));

    SUBCASE("kappa tau = 0 is the identity with survival one") {
        ErasureQubitConfig idle = loss_only(0.0);
        idle.tau = 1e-9;  // tau must stay positive; vanishing loss via T1
        idle.params.T1_c = 1e6;
        idle.params.T2R_c = 1e6;
        idle.params.Tphi_c = 1e6;
        idle.T_cycle = idle.tau;
        const CycleChannel id(idle);
        const auto kept = id(two);
        CHECK(kept.survival == doctest::Approx(1.0).epsilon(1e-9));
        CHECK((kept.state.matrix() - two.matrix()).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("analytic postselected population") {
    SUBCASE("t = 0 gives 1") {
        CHECK(analytic_p1L(1.0 / 466e-6, 11.9e-6, 13e-6, 0.0) == doctest::Approx(1.0));
    }

    SUBCASE("initial slope magnitude is the intrinsic rate, (19.9 ms)^-1") {
        const double kappa = 1.0 / 466e-6, tau = 11.9e-6, T = 13.0e-6;
        // the discrete one-cycle difference carries an O(kappa tau)
        // correction on top of the short-time expansion
        const double slope =
            (analytic_p1L(kappa, tau, T, 0.0) - analytic_p1L(kappa, tau, T, T)) / T;
        const double gamma_int = intrinsic_relaxation_rate(kappa, tau, T);
        CHECK(slope == doctest::Approx(gamma_int).epsilon(0.03));
        CHECK(gamma_int == doctest::Approx(1.0 / 19.9e-3).epsilon(0.01));

        // the correction vanishes with kappa tau
        const double fine = (analytic_p1L_cycles(kappa, tau / 8.0, 0) -
                             analytic_p1L_cycles(kappa, tau / 8.0, 1)) /
                            T;
        const double gamma_fine = intrinsic_relaxation_rate(kappa, tau / 8.0, T);
        CHECK(fine == doctest::Approx(gamma_fine).epsilon(0.005));
    }

    SUBCASE("long-time log slope approaches -2 kappa tau / T") {
        const double kappa = 1.0 / 466e-6, tau = 11.9e-6, T = 13.0e-6;
        const double kt = kappa * tau;
        const double p500 = analytic_p1L_cycles(kappa, tau, 500);
        const double p501 = analytic_p1L_cycles(kappa, tau, 501);
        const double log_slope = std::log(p501 / p500) / T;
        CHECK(log_slope == doctest::Approx(-2.0 * kt / T).epsilon(0.01));
    }

    SUBCASE("non-increasing in t and kappa") {
        double prev = 2.0;
        for (int m = 0; m <= 50; ++m) {
            const double v = analytic_p1L_cycles(1.0 / 466e-6, 11.9e-6, m);
            CHECK(v <= prev + 1e-15);
            CHECK(v > 0.0);
            CHECK(v <= 1.0);
            prev = v;
        }
        double prev_k = 2.0;
        for (double kappa : {500.0, 1000.0, 2000.0, 4000.0}) {
            const double v = analytic_p1L(kappa, 11.9e-6, 13.0e-6, 10 * 13.0e-6);
            CHECK(v <= prev_k);
            prev_k = v;
        }
    }

    SUBCASE("interpolation between cycles is rejected") {
        CHECK_THROWS_AS(analytic_p1L(1.0 / 466e-6, 11.9e-6, 13.0e-6, 6.5e-6),
                        std::invalid_argument);
    }
}

TEST_CASE("intrinsic relaxation rate algebra") {
    CHECK(intrinsic_relaxation_rate(1000.0, 0.0, 13e-6) == 0.0);
    const double base = intrinsic_relaxation_rate(1000.0, 10e-6, 13e-6);
    CHECK(intrinsic_relaxation_rate(1000.0, 20e-6, 13e-6) == doctest::Approx(4.0 * base));
}

TEST_CASE("deterministic relaxation equals the closed form") {
    const ErasureQubitConfig cfg = loss_only(0.0255);
    const double kappa = cfg.params.kappa_c();
    const IdlingResult r = simulate_relaxation(cfg, 50);
    for (int m = 0; m <= 50; ++m)
        CHECK(std::abs(r.p1L[m] - analytic_p1L_cycles(kappa, cfg.tau, m)) < 1e-12);
}

TEST_CASE("postselected state stays inside the code space") {
    const ErasureQubitConfig cfg = loss_only(0.1, 4);
    const CycleChannel cycle(cfg);
    DensityMatrix rho = DensityMatrix::pure(Ket::fock(FockSpace(4), 2));
    for (int m = 0; m < 30; ++m) {
        rho = cycle(rho).state;
        CHECK(rho.population(1) < 1e-12);
        CHECK(rho.population(3) < 1e-12);
    }
}

TEST_CASE("ramsey and cpmg single-cycle values") {
    const double kt = 0.0255;
    const double x = std::exp(-kt);

    SUBCASE("no echo, loss truncated to one jump") {
        const ErasureQubitConfig cfg = loss_only(kt, 3, 1);
        const IdlingResult r = simulate_ramsey(cfg, 1);
        CHECK(r.x_expect[0] == doctest::Approx(1.0));
        CHECK(r.x_expect[1] == doctest::Approx(2.0 * x / (1.0 + x * x)).epsilon(1e-12));
    }

    SUBCASE("echo with the no-jump branch restores unit coherence") {
        const ErasureQubitConfig cfg = loss_only(kt, 3, 0);
        const IdlingResult r = simulate_cpmg(cfg, 1);
        CHECK(std::abs(r.x_expect[1] - 1.0) < 1e-10);
    }

    SUBCASE("cpmg dominates ramsey under the full loss channel") {
        for (double g : {0.01, 0.0255, 0.1}) {
            const ErasureQubitConfig cfg = loss_only(g);
            const IdlingResult ram = simulate_ramsey(cfg, 40);
            const IdlingResult cp = simulate_cpmg(cfg, 40);
            for (int m = 0; m <= 40; ++m) CHECK(cp.x_expect[m] >= ram.x_expect[m] - 1e-12);
        }
    }
}

TEST_CASE("monte carlo converges to the deterministic path") {
    const ErasureQubitConfig cfg = loss_only(0.0255);
    const IdlingResult det = simulate_relaxation(cfg, 20);
    const std::vector<int> grid = {5, 20};

    const long n_big = 20000;
    const IdlingResult big = simulate_relaxation_mc(cfg, 20, n_big, 123, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const int m = grid[i];
        const double p = det.p1L[m];
        const double sigma = std::sqrt(p * (1.0 - p) / n_big) + 1e-9;
        CHECK(std::abs(big.p1L[i] - p) < 4.0 * sigma + 4e-3);
        const double s = det.survival[m];
        const double sigma_s = std::sqrt(s * (1.0 - s) / n_big) + 1e-9;
        CHECK(std::abs(big.survival[i] - s) < 4.0 * sigma_s + 4e-3);
    }

    SUBCASE("error shrinks roughly as 1/sqrt(N)") {
        double err_small = 0.0, err_big = 0.0;
        for (int rep = 0; rep < 5; ++rep) {
            const auto small =
                simulate_relaxation_mc(cfg, 20, 500, 1000 + rep, {20});
            const auto large =
                simulate_relaxation_mc(cfg, 20, 8000, 2000 + rep, {20});
            err_small += std::abs(small.survival[0] - det.survival[20]);
            err_big += std::abs(large.survival[0] - det.survival[20]);
        }
        CHECK(err_big < err_small);
    }

    SUBCASE("identical seeds reproduce identical series") {
        const auto a = simulate_relaxation_mc(cfg, 10, 300, 77, {3, 10});
        const auto b = simulate_relaxation_mc(cfg, 10, 300, 77, {3, 10});
        CHECK(a.p1L == b.p1L);
        CHECK(a.survival == b.survival);
    }
}

TEST_CASE("survival rate with fitted thermal and detection errors") {
    // Detection values fitted so the cumulative survival reproduces the
    // measured erasure rate of (197 us)^-1; the raw leakage alone gives
    // about (250 us)^-1.
    ErasureQubitConfig cfg;
    cfg.dim = 4;
    cfg.include_thermal = true;
    cfg.include_detection_errors = true;
    cfg.detection = DetectionErrorModel::from_rates(0.0157, 0.0069, 0.0026);

    const IdlingResult r = simulate_relaxation(cfg, 40);
    Eigen::VectorXd t(41), s(41);
    for (int m = 0; m <= 40; ++m) {
        t(m) = r.times[m];
        s(m) = r.survival[m];
    }
    const FitResult fit = fit_exponential(t, s, 0.0);
    REQUIRE(fit.converged);
    CHECK(fit.value("gamma") == doctest::Approx(1.0 / 197e-6).epsilon(0.10));
}

TEST_CASE("qutrit rate evolution") {
    SUBCASE("pure downward cascade decays exponentially from |2>") {
        QutritRates rates;
        rates.gamma_21 = 1.0 / 244e-6;
        rates.gamma_10 = 1.0 / 466e-6;
        const double t = 100e-6;
        const Eigen::Vector3d p = qutrit_rate_evolution(rates, {0.0, 0.0, 1.0}, t);
        CHECK(p(2) == doctest::Approx(std::exp(-rates.gamma_21 * t)).epsilon(1e-10));
        CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("populations stay normalized and inside [0, 1]") {
        const QutritRates rates = QutritRates::reference();
        for (double t : {0.0, 50e-6, 200e-6, 1e-3, 5e-3}) {
            const Eigen::Vector3d p = qutrit_rate_evolution(rates, {0.0, 0.0, 1.0}, t);
            CHECK(std::abs(p.sum() - 1.0) < 1e-12);
            for (int k = 0; k < 3; ++k) {
                CHECK(p(k) >= -1e-12);
                CHECK(p(k) <= 1.0 + 1e-12);
            }
        }
    }

    SUBCASE("long-time limit is the null vector of the rate matrix") {
        const QutritRates rates = QutritRates::reference();
        const Eigen::Vector3d p = qutrit_rate_evolution(rates, {0.0, 0.0, 1.0}, 10.0);
        const Eigen::Vector3d residual = qutrit_rate_matrix(rates) * p;
        CHECK(residual.cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("scalar figures of merit") {
    SUBCASE("bias ratio") {
        CHECK(erasure_bias_ratio(QutritRates::reference()) == doctest::Approx(265.2).epsilon(0.01));
        QutritRates equal;
        equal.gamma_21 = equal.gamma_01 = 100.0;
        CHECK(erasure_bias_ratio(equal) == doctest::Approx(1.0));
        QutritRates no_up;
        no_up.gamma_21 = 100.0;
        CHECK(std::isinf(erasure_bias_ratio(no_up)));
    }

    SUBCASE("missed erasure probability") {
        CHECK(missed_erasure_probability(1.0 / 197e-6, 1.1e-6, 0.0069) ==
              doctest::Approx(4.0e-5).epsilon(0.05));
        CHECK(missed_erasure_probability(1.0 / 197e-6, 1.1e-6, 0.0) == 0.0);
        // per-check erasure odds alone
        CHECK(1.1e-6 / 197e-6 == doctest::Approx(0.0055).epsilon(0.02));
    }

    SUBCASE("channel fidelity decay and gain factor") {
        const SystemParams p = SystemParams::defaults();
        const double g01 = channel_fidelity_decay(1.0 / p.T1_c, 1.0 / p.T2R_c);
        CHECK(g01 == doctest::Approx(1.0 / 0.62e-3).epsilon(0.01));
        const double g02 = channel_fidelity_decay(1.0 / 6.2e-3, 1.0 / 3.1e-3);
        CHECK(g02 == doctest::Approx(1.0 / 3.7e-3).epsilon(0.01));
        CHECK(gain_factor(g01, g02) == doctest::Approx(6.0).epsilon(0.017));
    }
}

TEST_CASE("induced dephasing scan") {
    ErasureQubitConfig cfg;
    cfg.dim = 3;
    const std::vector<int> ms = {0, 2, 4, 8, 12, 16, 24, 32};

    SUBCASE("loss-only curve flattens after the initial rise") {
        const IdlingResult scan = induced_dephasing_scan(cfg, ms, 150e-6);
        // after the rise, successive coherences change by well under 0.1%
        const std::size_t n = scan.x_expect.size();
        CHECK(scan.x_expect[n - 1] > scan.x_expect[0]);
        CHECK(std::abs(scan.x_expect[n - 1] - scan.x_expect[n - 2]) < 1e-3);
    }

    SUBCASE("injected dephasing per check is recovered from the tail slope") {
        ErasureQubitConfig noisy = cfg;
        noisy.include_detection_errors = true;
        noisy.detection = DetectionErrorModel::from_rates(0.0, 0.0, 0.0026);
        const std::vector<int> grid = {8, 12, 16, 20, 24, 28, 32, 40, 48};
        const IdlingResult scan = induced_dephasing_scan(noisy, grid, 150e-6);
        Eigen::VectorXd m(grid.size()), x(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            m(static_cast<Eigen::Index>(i)) = grid[i];
            x(static_cast<Eigen::Index>(i)) = scan.x_expect[i];
        }
        const FitResult fit = fit_exponential(m, x, 0.0);
        REQUIRE(fit.converged);
        const double per_check = (1.0 - std::exp(-fit.value("gamma"))) / 2.0;
        CHECK(per_check == doctest::Approx(0.0026).epsilon(0.10));
    }

    SUBCASE("M = 0 reduces to a single echo") {
        const IdlingResult scan = induced_dephasing_scan(cfg, {0}, 150e-6);
        CHECK(scan.x_expect.size() == 1);
        CHECK(scan.x_expect[0] > 0.9);  // single echo cancels the no-jump tilt
    }

    SUBCASE("odd M is rejected") {
        CHECK_THROWS_AS(induced_dephasing_scan(cfg, {3}, 150e-6), std::invalid_argument);
    }
}
