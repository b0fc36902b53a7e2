#include "erasim/fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "erasim/erasure.hpp"
#include "erasim/rng.hpp"

namespace erasim {

double FitResult::value(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return values(static_cast<Eigen::Index>(i));
    auto it = fixed_params.find(name);
    if (it != fixed_params.end()) return it->second;
    throw std::out_of_range("FitResult: unknown parameter " + name);
}

double FitResult::standard_error(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return standard_errors(static_cast<Eigen::Index>(i));
    throw std::out_of_range("FitResult: unknown parameter " + name);
}

bool FitResult::has(const std::string& name) const {
    for (const auto& n : names)
        if (n == name) return true;
    return fixed_params.count(name) > 0;
}

Eigen::MatrixXd numeric_jacobian(const ResidualFn& residuals, const Eigen::VectorXd& p,
                                 double fd_relative_step) {
    const Eigen::VectorXd r0 = residuals(p);
    Eigen::MatrixXd j(r0.size(), p.size());
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        const double h = fd_relative_step * std::max(std::abs(p(k)), 1.0);
        Eigen::VectorXd pp = p;
        pp(k) += h;
        const Eigen::VectorXd rp = residuals(pp);
        pp(k) = p(k) - h;
        const Eigen::VectorXd rm = residuals(pp);
        j.col(k) = (rp - rm) / (2.0 * h);
    }
    return j;
}

LmOutcome levenberg_marquardt(const ResidualFn& residuals, Eigen::VectorXd p,
                              const FitOptions& options) {
    LmOutcome out;
    Eigen::VectorXd r = residuals(p);
    double cost = r.squaredNorm();
    double lambda = 1e-3;

    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        const Eigen::MatrixXd j = numeric_jacobian(residuals, p, options.fd_relative_step);
        const Eigen::MatrixXd jtj = j.transpose() * j;
        const Eigen::VectorXd g = j.transpose() * r;

        if (g.lpNorm<Eigen::Infinity>() < options.gradient_tol) {
            out.converged = true;
            out.message = "gradient below tolerance";
            break;
        }

        bool stepped = false;
        for (int attempt = 0; attempt < 32; ++attempt) {
            Eigen::MatrixXd damped = jtj;
            for (Eigen::Index k = 0; k < p.size(); ++k)
                damped(k, k) += lambda * std::max(jtj(k, k), 1e-12);
            const Eigen::VectorXd delta = damped.ldlt().solve(-g);
            const Eigen::VectorXd p_try = p + delta;
            const Eigen::VectorXd r_try = residuals(p_try);
            const double cost_try = r_try.squaredNorm();
            if (std::isfinite(cost_try) && cost_try <= cost) {
                const double improvement = cost - cost_try;
                const double step_size = delta.norm();
                p = p_try;
                r = r_try;
                cost = cost_try;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                if (improvement < options.residual_tol * std::max(cost, 1e-300) ||
                    step_size < options.step_tol * (p.norm() + options.step_tol)) {
                    out.converged = true;
                    out.message = "step/residual change below tolerance";
                }
                break;
            }
            lambda *= 10.0;
        }
        if (!stepped) {
            out.converged = true;
            out.message = "no downhill step found (local minimum)";
            break;
        }
        if (out.converged) {
            ++iter;
            break;
        }
    }
    if (!out.converged && iter >= options.max_iterations)
        out.message = "iteration cap reached";

    out.params = p;
    out.residual_norm = std::sqrt(cost);
    out.iterations = iter;

    // Gauss-Newton covariance: s^2 (J^T J)^{-1}.
    const Eigen::MatrixXd j = numeric_jacobian(residuals, p, options.fd_relative_step);
    const Eigen::MatrixXd jtj = j.transpose() * j;
    const auto dof = std::max<Eigen::Index>(1, r.size() - p.size());
    const double s2 = cost / static_cast<double>(dof);
    Eigen::MatrixXd jtj_reg = jtj;
    for (Eigen::Index k = 0; k < p.size(); ++k) jtj_reg(k, k) += 1e-300;
    out.covariance = s2 * jtj_reg.ldlt().solve(Eigen::MatrixXd::Identity(p.size(), p.size()));
    return out;
}

namespace {

Eigen::VectorXd sigma_weights(const Eigen::VectorXd& sigma, Eigen::Index n) {
    if (sigma.size() == 0) return Eigen::VectorXd::Ones(n);
    if (sigma.size() != n)
        throw std::invalid_argument("fit: sigma length does not match data length");
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (sigma(i) <= 0) throw std::invalid_argument("fit: sigma must be positive");
        w(i) = 1.0 / sigma(i);
    }
    return w;
}

FitResult pack_result(const LmOutcome& lm, std::vector<std::string> names, std::string model) {
    FitResult fr;
    fr.names = std::move(names);
    fr.values = lm.params;
    fr.standard_errors = lm.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
    fr.residual_norm = lm.residual_norm;
    fr.converged = lm.converged;
    fr.iterations = lm.iterations;
    fr.message = lm.message;
    fr.model = std::move(model);
    return fr;
}

}  // namespace

FitResult fit_exponential(const Eigen::VectorXd& t, const Eigen::VectorXd& y,
                          std::optional<double> fix_offset, const Eigen::VectorXd& sigma) {
    if (t.size() != y.size() || t.size() < 2)
        throw std::invalid_argument("fit_exponential: need matching t/y with >= 2 points");
    const Eigen::VectorXd w = sigma_weights(sigma, t.size());

    const double spread = y.maxCoeff() - y.minCoeff();
    if (spread < 1e-14) {
        // constant data: amplitude degenerates to zero
        FitResult fr;
        fr.names = {"A", "gamma", "B"};
        fr.values = Eigen::Vector3d(0.0, 0.0, fix_offset.value_or(y.mean()));
        fr.standard_errors = Eigen::Vector3d::Zero();
        fr.converged = true;
        fr.message = "degenerate: constant data, amplitude fixed to zero";
        fr.model = "exponential";
        if (fix_offset) fr.fixed_params["B"] = *fix_offset;
        return fr;
    }

    // log-linear initial guess on y - B
    double b0 = fix_offset.value_or(y.minCoeff() - 1e-3 * spread);
    double sum_t = 0, sum_t2 = 0, sum_l = 0, sum_tl = 0;
    long n_used = 0;
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        const double v = y(i) - b0;
        if (v > 1e-300) {
            const double l = std::log(v);
            sum_t += t(i);
            sum_t2 += t(i) * t(i);
            sum_l += l;
            sum_tl += t(i) * l;
            ++n_used;
        }
    }
    double gamma0 = 0.0, a0 = spread;
    if (n_used >= 2) {
        const double denom = n_used * sum_t2 - sum_t * sum_t;
        if (std::abs(denom) > 1e-300) {
            const double slope = (n_used * sum_tl - sum_t * sum_l) / denom;
            gamma0 = -slope;
            a0 = std::exp((sum_l - slope * sum_t) / n_used);
        }
    }

    if (fix_offset) {
        const double b = *fix_offset;
        auto res = [&](const Eigen::VectorXd& p) {
            Eigen::VectorXd r(t.size());
            for (Eigen::Index i = 0; i < t.size(); ++i)
                r(i) = w(i) * (p(0) * std::exp(-p(1) * t(i)) + b - y(i));
            return r;
        };
        auto lm = levenberg_marquardt(res, Eigen::Vector2d(a0, gamma0));
        FitResult fr = pack_result(lm, {"A", "gamma"}, "exponential");
        fr.fixed_params["B"] = b;
        return fr;
    }

    auto res = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(t.size());
        for (Eigen::Index i = 0; i < t.size(); ++i)
            r(i) = w(i) * (p(0) * std::exp(-p(1) * t(i)) + p(2) - y(i));
        return r;
    };
    auto lm = levenberg_marquardt(res, Eigen::Vector3d(a0, gamma0, b0));
    return pack_result(lm, {"A", "gamma", "B"}, "exponential");
}

FitResult fit_effective_relaxation(const Eigen::VectorXd& t, const Eigen::VectorXd& p1L,
                                   double kappa, double tau, double T) {
    if (t.size() != p1L.size() || t.size() < 3)
        throw std::invalid_argument("fit_effective_relaxation: need >= 3 points");

    std::vector<double> analytic(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) analytic[i] = analytic_p1L(kappa, tau, T, t(i));

    auto res = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(t.size());
        for (Eigen::Index i = 0; i < t.size(); ++i)
            r(i) = p(0) * analytic[i] * std::exp(-p(1) * t(i)) + p(2) - p1L(i);
        return r;
    };
    auto lm = levenberg_marquardt(res, Eigen::Vector3d(1.0, 100.0, 0.0));
    FitResult fr = pack_result(lm, {"A", "gamma_res", "B"}, "effective_relaxation");
    fr.fixed_params["kappa"] = kappa;
    fr.fixed_params["tau"] = tau;
    fr.fixed_params["T"] = T;

    const double gamma_int = intrinsic_relaxation_rate(kappa, tau, T);
    fr.names.push_back("gamma_int");
    fr.names.push_back("gamma_total");
    Eigen::VectorXd ext(5);
    ext << fr.values(0), fr.values(1), fr.values(2), gamma_int, gamma_int + fr.values(1);
    fr.values = ext;
    Eigen::VectorXd ext_err(5);
    ext_err << fr.standard_errors(0), fr.standard_errors(1), fr.standard_errors(2), 0.0,
        fr.standard_errors(1);
    fr.standard_errors = ext_err;
    return fr;
}

FitResult fit_rate_equations(const Eigen::VectorXd& t, const Eigen::MatrixXd& populations,
                             double gamma_10, double gamma_01, const Eigen::Vector3d& p0,
                             const Eigen::MatrixXd& sigma) {
    if (populations.rows() != 3 || populations.cols() != t.size())
        throw std::invalid_argument("fit_rate_equations: populations must be 3 x len(t)");
    const bool weighted = sigma.size() > 0;
    if (weighted && (sigma.rows() != 3 || sigma.cols() != t.size()))
        throw std::invalid_argument("fit_rate_equations: sigma must match the data shape");

    // data-driven initial guesses: early P2 decay slope for gamma_21, a
    // hundredth of it for the weak upward rate
    double g21_0 = 1e3;
    for (Eigen::Index i = 1; i < t.size(); ++i) {
        if (t(i) > 0 && populations(2, 0) > 0.1) {
            const double drop = populations(2, 0) - populations(2, i);
            if (drop > 0.05) {
                g21_0 = drop / (t(i) * populations(2, 0));
                break;
            }
        }
    }
    const double spread = (populations.rowwise().maxCoeff() - populations.rowwise().minCoeff())
                              .maxCoeff();
    if (spread < 1e-12) {
        FitResult fr;
        fr.names = {"gamma_21", "gamma_12"};
        fr.values = Eigen::Vector2d::Zero();
        fr.standard_errors = Eigen::Vector2d::Zero();
        fr.converged = false;
        fr.message = "non-identifiable: population curves are constant";
        fr.model = "rate_equations";
        fr.fixed_params = {{"gamma_10", gamma_10}, {"gamma_01", gamma_01}};
        return fr;
    }

    // log-parameterization keeps the rates positive
    auto res = [&](const Eigen::VectorXd& p) {
        QutritRates rates;
        rates.gamma_21 = std::exp(p(0));
        rates.gamma_12 = std::exp(p(1));
        rates.gamma_10 = gamma_10;
        rates.gamma_01 = gamma_01;
        Eigen::VectorXd r(3 * t.size());
        for (Eigen::Index i = 0; i < t.size(); ++i) {
            const Eigen::Vector3d pops = qutrit_rate_evolution(rates, p0, t(i));
            for (int k = 0; k < 3; ++k) {
                const double w = weighted ? 1.0 / sigma(k, i) : 1.0;
                r(3 * i + k) = w * (pops(k) - populations(k, i));
            }
        }
        return r;
    };
    Eigen::Vector2d start(std::log(g21_0), std::log(g21_0 / 100.0));
    auto lm = levenberg_marquardt(res, start);

    FitResult fr;
    fr.names = {"gamma_21", "gamma_12"};
    fr.values = Eigen::Vector2d(std::exp(lm.params(0)), std::exp(lm.params(1)));
    // delta-method errors for the exp transform
    Eigen::Vector2d log_err = lm.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
    fr.standard_errors = fr.values.cwiseProduct(log_err);
    fr.residual_norm = lm.residual_norm;
    fr.converged = lm.converged;
    fr.iterations = lm.iterations;
    fr.message = lm.message;
    fr.model = "rate_equations";
    fr.fixed_params = {{"gamma_10", gamma_10}, {"gamma_01", gamma_01}};
    return fr;
}

BootstrapResult bootstrap(std::size_t n_rows,
                          const std::function<double(const std::vector<std::size_t>&)>& estimator,
                          int n_resamples, std::uint64_t seed, double confidence) {
    if (n_rows == 0) throw std::invalid_argument("bootstrap: empty data");
    if (n_resamples < 1) throw std::invalid_argument("bootstrap: n_resamples must be >= 1");
    if (confidence <= 0.0 || confidence >= 1.0)
        throw std::invalid_argument("bootstrap: confidence must lie in (0, 1)");

    std::vector<std::size_t> identity(n_rows);
    for (std::size_t i = 0; i < n_rows; ++i) identity[i] = i;

    BootstrapResult out;
    out.estimate = estimator(identity);
    out.n_resamples = n_resamples;
    out.seed = seed;
    if (n_resamples < 2) {
        out.lower = out.upper = out.estimate;
        return out;
    }

    std::vector<double> stats(n_resamples);
    for (int r = 0; r < n_resamples; ++r) {
        CounterRng rng(seed, static_cast<std::uint64_t>(r));
        std::vector<std::size_t> idx(n_rows);
        for (std::size_t i = 0; i < n_rows; ++i)
            idx[i] = static_cast<std::size_t>(rng.uniform_index(n_rows));
        stats[r] = estimator(idx);
    }
    std::sort(stats.begin(), stats.end());
    const double alpha = (1.0 - confidence) / 2.0;
    auto quantile = [&](double q) {
        const double pos = q * (n_resamples - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min<std::size_t>(lo + 1, n_resamples - 1);
        const double frac = pos - static_cast<double>(lo);
        return stats[lo] * (1.0 - frac) + stats[hi] * frac;
    };
    out.lower = quantile(alpha);
    out.upper = quantile(1.0 - alpha);
    return out;
}

}  // namespace erasim
