#include <doctest.h>

#include <cmath>

#include "erasim/erasure.hpp"
#include "erasim/fit.hpp"
#include "erasim/rng.hpp"

using namespace erasim;

TEST_CASE("exponential fit") {
    SUBCASE("exact noiseless recovery") {
        const double gamma = 1.0 / 197e-6;
        Eigen::VectorXd t(40), y(40);
        for (int i = 0; i < 40; ++i) {
            t(i) = i * 13e-6;
            y(i) = std::exp(-gamma * t(i));
        }
        const FitResult fit = fit_exponential(t, y);
        REQUIRE(fit.converged);
        CHECK(std::abs(fit.value("A") - 1.0) < 1e-9);
        CHECK(std::abs(fit.value("gamma") - gamma) / gamma < 1e-9);
        CHECK(std::abs(fit.value("B")) < 1e-9);
    }

    SUBCASE("noisy paper-parameter survival recovers the rate") {
        const double gamma = 1.0 / 197e-6;
        CounterRng rng(17, 0);
        Eigen::VectorXd t(40), y(40);
        for (int i = 0; i < 40; ++i) {
            t(i) = i * 13e-6;
            y(i) = std::exp(-gamma * t(i)) + 2e-3 * rng.normal();
        }
        const FitResult fit = fit_exponential(t, y, 0.0);
        REQUIRE(fit.converged);
        CHECK(fit.value("gamma") == doctest::Approx(gamma).epsilon(0.02));
    }

    SUBCASE("constant data degenerates gracefully") {
        Eigen::VectorXd t(5), y(5);
        for (int i = 0; i < 5; ++i) {
            t(i) = i;
            y(i) = 0.25;
        }
        const FitResult fit = fit_exponential(t, y, 0.25);
        CHECK(fit.converged);
        CHECK(fit.value("A") == 0.0);
        CHECK(fit.message.find("degenerate") != std::string::npos);
    }
}

TEST_CASE("effective relaxation fit") {
    const double kappa = 1.0 / 466e-6, tau = 11.9e-6, T = 13.0e-6;

    SUBCASE("zero residual rate collapses to the intrinsic rate") {
        Eigen::VectorXd t(60), y(60);
        for (int m = 0; m < 60; ++m) {
            t(m) = m * T;
            y(m) = analytic_p1L_cycles(kappa, tau, m);
        }
        const FitResult fit = fit_effective_relaxation(t, y, kappa, tau, T);
        REQUIRE(fit.converged);
        CHECK(std::abs(fit.value("gamma_res")) < 1e-3 * fit.value("gamma_int"));
        CHECK(fit.value("gamma_total") ==
              doctest::Approx(intrinsic_relaxation_rate(kappa, tau, T)).epsilon(1e-6));
    }

    SUBCASE("injected residual rate is recovered within two percent") {
        const double gamma_res = 1.0 / 8.9e-3;
        Eigen::VectorXd t(81), y(81);
        for (int m = 0; m <= 80; ++m) {
            t(m) = m * T;
            y(m) = analytic_p1L_cycles(kappa, tau, m) * std::exp(-gamma_res * t(m));
        }
        const FitResult fit = fit_effective_relaxation(t, y, kappa, tau, T);
        REQUIRE(fit.converged);
        CHECK(fit.value("gamma_res") == doctest::Approx(gamma_res).epsilon(0.02));
        CHECK(fit.value("gamma_total") == doctest::Approx(1.0 / 6.2e-3).epsilon(0.03));
    }
}

TEST_CASE("rate-equation fit") {
    const QutritRates rates = QutritRates::reference();

    SUBCASE("noiseless synthetic curves refit exactly") {
        const int n = 60;
        Eigen::VectorXd t(n);
        Eigen::MatrixXd pops(3, n);
        for (int i = 0; i < n; ++i) {
            t(i) = 2e-3 * i / (n - 1);
            pops.col(i) = qutrit_rate_evolution(rates, {0.0, 0.0, 1.0}, t(i));
        }
        const FitResult fit = fit_rate_equations(t, pops, rates.gamma_10, rates.gamma_01);
        REQUIRE(fit.converged);
        CHECK(fit.value("gamma_21") == doctest::Approx(rates.gamma_21).epsilon(1e-6));
        CHECK(fit.value("gamma_12") == doctest::Approx(rates.gamma_12).epsilon(1e-6));
    }

    SUBCASE("one-percent relative noise keeps the weighted recovery within five percent") {
        // gamma_12 only shows up through the weak repopulation of P2, so the
        // late-time points must be weighted by their actual uncertainty
        const int n = 80;
        CounterRng rng(23, 0);
        Eigen::VectorXd t(n);
        Eigen::MatrixXd pops(3, n), sigma(3, n);
        for (int i = 0; i < n; ++i) {
            t(i) = 2e-3 * i / (n - 1);
            const Eigen::Vector3d clean = qutrit_rate_evolution(rates, {0.0, 0.0, 1.0}, t(i));
            for (int k = 0; k < 3; ++k) {
                sigma(k, i) = std::max(0.01 * std::abs(clean(k)), 1e-4);
                pops(k, i) = clean(k) + sigma(k, i) * rng.normal();
            }
        }
        const FitResult fit = fit_rate_equations(t, pops, rates.gamma_10, rates.gamma_01,
                                                 {0.0, 0.0, 1.0}, sigma);
        REQUIRE(fit.converged);
        CHECK(fit.value("gamma_21") == doctest::Approx(rates.gamma_21).epsilon(0.05));
        CHECK(fit.value("gamma_12") == doctest::Approx(rates.gamma_12).epsilon(0.05));
    }

    SUBCASE("constant curves are flagged non-identifiable") {
        Eigen::VectorXd t(10);
        Eigen::MatrixXd pops = Eigen::MatrixXd::Zero(3, 10);
        for (int i = 0; i < 10; ++i) {
            t(i) = i * 1e-4;
            pops(2, i) = 1.0;
        }
        const FitResult fit = fit_rate_equations(t, pops, 0.0, 0.0);
        CHECK_FALSE(fit.converged);
        CHECK(fit.message.find("non-identifiable") != std::string::npos);
    }
}

TEST_CASE("levenberg-marquardt internals") {
    SUBCASE("accepted iterates never worsen the best residual seen") {
        Eigen::VectorXd t(20), y(20);
        for (int i = 0; i < 20; ++i) {
            t(i) = 0.1 * i;
            y(i) = 2.0 * std::exp(-0.8 * t(i)) + 0.3;
        }
        // the residual callback sees every probe; the best cost over probes
        // bounds the cost of every accepted iterate from below
        double best_seen = 1e300;
        auto res = [&](const Eigen::VectorXd& p) {
            Eigen::VectorXd r(20);
            for (int i = 0; i < 20; ++i)
                r(i) = p(0) * std::exp(-p(1) * t(i)) + p(2) - y(i);
            best_seen = std::min(best_seen, r.squaredNorm());
            return r;
        };
        const LmOutcome lm = levenberg_marquardt(res, Eigen::Vector3d(1.0, 0.1, 0.0));
        CHECK(lm.converged);
        CHECK(lm.residual_norm < 1e-10);
        CHECK(lm.residual_norm * lm.residual_norm <= best_seen + 1e-30);
    }

    SUBCASE("numeric jacobian matches analytic derivatives") {
        Eigen::VectorXd t(6);
        t << 0.0, 0.2, 0.5, 1.0, 2.0, 4.0;
        auto res = [&](const Eigen::VectorXd& p) {
            Eigen::VectorXd r(6);
            for (int i = 0; i < 6; ++i) r(i) = p(0) * std::exp(-p(1) * t(i));
            return r;
        };
        const Eigen::Vector2d p(1.4, 0.6);
        const Eigen::MatrixXd j = numeric_jacobian(res, p);
        for (int i = 0; i < 6; ++i) {
            const double e = std::exp(-p(1) * t(i));
            CHECK(std::abs(j(i, 0) - e) <= 1e-4 * std::abs(e) + 1e-12);
            const double d = -p(0) * t(i) * e;
            CHECK(std::abs(j(i, 1) - d) <= 1e-4 * std::abs(d) + 1e-12);
        }
    }
}

TEST_CASE("bootstrap") {
    SUBCASE("single resample degenerates to the point estimate") {
        std::vector<double> data = {1.0, 2.0, 3.0};
        auto mean = [&](const std::vector<std::size_t>& idx) {
            double s = 0.0;
            for (auto i : idx) s += data[i];
            return s / static_cast<double>(idx.size());
        };
        const BootstrapResult r = bootstrap(data.size(), mean, 1, 5);
        CHECK(r.lower == r.estimate);
        CHECK(r.upper == r.estimate);
        CHECK(r.estimate == doctest::Approx(2.0));
    }

    SUBCASE("identical rows give a zero-width interval") {
        std::vector<double> data(50, 3.25);
        auto mean = [&](const std::vector<std::size_t>& idx) {
            double s = 0.0;
            for (auto i : idx) s += data[i];
            return s / static_cast<double>(idx.size());
        };
        const BootstrapResult r = bootstrap(data.size(), mean, 500, 5);
        CHECK(r.lower == r.upper);
        CHECK(r.lower == doctest::Approx(3.25));
    }

    SUBCASE("fixed seeds are bit-reproducible") {
        std::vector<double> data;
        CounterRng rng(29, 0);
        for (int i = 0; i < 40; ++i) data.push_back(rng.normal());
        auto mean = [&](const std::vector<std::size_t>& idx) {
            double s = 0.0;
            for (auto i : idx) s += data[i];
            return s / static_cast<double>(idx.size());
        };
        const BootstrapResult a = bootstrap(data.size(), mean, 300, 12345);
        const BootstrapResult b = bootstrap(data.size(), mean, 300, 12345);
        CHECK(a.lower == b.lower);
        CHECK(a.upper == b.upper);
    }

    SUBCASE("95 percent interval covers the true mean about 95 percent of the time") {
        const int trials = 400;
        const int n_data = 100;
        int covered = 0;
        for (int trial = 0; trial < trials; ++trial) {
            std::vector<double> data(n_data);
            CounterRng rng(700 + trial, 0);
            for (int i = 0; i < n_data; ++i) data[i] = rng.normal();
            auto mean = [&](const std::vector<std::size_t>& idx) {
                double s = 0.0;
                for (auto i : idx) s += data[i];
                return s / static_cast<double>(idx.size());
            };
            const BootstrapResult r =
                bootstrap(data.size(), mean, 1000, static_cast<std::uint64_t>(trial));
            if (r.lower <= 0.0 && 0.0 <= r.upper) ++covered;
        }
        const double coverage = static_cast<double>(covered) / trials;
        CHECK(coverage > 0.90);
        CHECK(coverage < 0.99);
    }
}
