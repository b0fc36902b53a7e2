#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace erasim {

struct FitResult {
    std::vector<std::string> names;
    Eigen::VectorXd values;
    Eigen::VectorXd standard_errors;  // from the Gauss-Newton covariance
    double residual_norm = 0.0;
    bool converged = false;
    int iterations = 0;
    std::string message;

    // provenance
    std::string model;
    std::map<std::string, double> fixed_params;
    std::uint64_t seed = 0;

    double value(const std::string& name) const;
    double standard_error(const std::string& name) const;
    bool has(const std::string& name) const;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct FitOptions {
    int max_iterations = 200;
    double gradient_tol = 1e-12;
    double step_tol = 1e-14;
    double residual_tol = 1e-15;
    double fd_relative_step = 1e-6;
};

struct LmOutcome {
    Eigen::VectorXd params;
    Eigen::MatrixXd covariance;
    double residual_norm = 0.0;
    bool converged = false;
    int iterations = 0;
    std::string message;
};

// Damped least squares with numerical Jacobians. The residual norm never
// increases across accepted iterations.
LmOutcome levenberg_marquardt(const ResidualFn& residuals, Eigen::VectorXd p0,
                              const FitOptions& options = {});

// Central differences, step = fd_relative_step * max(|p_i|, 1).
Eigen::MatrixXd numeric_jacobian(const ResidualFn& residuals, const Eigen::VectorXd& p,
                                 double fd_relative_step = 1e-6);

// y = A exp(-gamma t) + B. With fix_offset set, B is held there. Initial
// guesses come from a log-linear regression of y - B.
FitResult fit_exponential(const Eigen::VectorXd& t, const Eigen::VectorXd& y,
                          std::optional<double> fix_offset = std::nullopt,
                          const Eigen::VectorXd& sigma = {});

// p(t) = A * P(t) * exp(-gamma_res t) + B, with the closed-form postselected
// population P(t) evaluated at the cycle grid implied by (kappa, tau, T).
// Reports gamma_total = gamma_int + gamma_res alongside the fit parameters.
FitResult fit_effective_relaxation(const Eigen::VectorXd& t, const Eigen::VectorXd& p1L,
                                   double kappa, double tau, double T);

// Global fit of gamma_21, gamma_12 to the three qutrit population curves
// (rows P0, P1, P2) with gamma_10, gamma_01 held fixed. Initial state
// defaults to |2>. sigma, when given, carries per-point uncertainties of the
// same 3 x N shape.
FitResult fit_rate_equations(const Eigen::VectorXd& t, const Eigen::MatrixXd& populations,
                             double gamma_10, double gamma_01,
                             const Eigen::Vector3d& p0 = Eigen::Vector3d(0.0, 0.0, 1.0),
                             const Eigen::MatrixXd& sigma = {});

struct BootstrapResult {
    double estimate = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    int n_resamples = 0;
    std::uint64_t seed = 0;
};

// Percentile confidence interval from case resampling. The estimator
// receives row indices into the caller's data. Deterministic under seed;
// resamples are independent streams so they may be evaluated in any order.
BootstrapResult bootstrap(std::size_t n_rows,
                          const std::function<double(const std::vector<std::size_t>&)>& estimator,
                          int n_resamples, std::uint64_t seed, double confidence = 0.95);

}  // namespace erasim
