#include "erasim/tomography.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "erasim/fit.hpp"

namespace erasim {

std::vector<WignerSample> load_wigner_csv(std::istream& is) {
    std::vector<WignerSample> samples;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        double re, im, parity;
        long shots = 0;
        std::getline(ss, field, ',');
        try {
            re = std::stod(field);
        } catch (const std::exception&) {
            continue;  // header row
        }
        std::getline(ss, field, ',');
        im = std::stod(field);
        std::getline(ss, field, ',');
        parity = std::stod(field);
        if (std::getline(ss, field, ',')) shots = std::stol(field);
        samples.push_back({Complex(re, im), parity, shots});
    }
    return samples;
}

void write_wigner_csv(std::ostream& os, const std::vector<WignerSample>& samples) {
    os << "re_alpha,im_alpha,parity_expectation,shots\n";
    for (const auto& s : samples)
        os << s.alpha.real() << ',' << s.alpha.imag() << ',' << s.parity_expectation << ','
           << s.shots << '\n';
}

double parity_expectation(const DensityMatrix& rho, Complex alpha) {
    const FockSpace space(rho.dim());
    return expectation(displaced_parity(alpha, space), rho);
}

double wigner(const DensityMatrix& rho, Complex alpha) {
    return 2.0 / M_PI * parity_expectation(rho, alpha);
}

std::array<Complex, 5> five_point_alphas() {
    const double s = std::sqrt(4.0 * std::sqrt(2.0));
    return {Complex(0.0, 0.0), Complex(1.0, 0.0), Complex(1.0, -1.0) / s, Complex(1.0, 1.0) / s,
            Complex(1.0 / std::sqrt(2.0), 0.0)};
}

std::array<Complex, 8> eight_point_alphas() {
    const double r = 1.0 / std::sqrt(2.0);
    const double s = std::sqrt(4.0 * std::sqrt(2.0));
    return {Complex(0.0, 0.0), Complex(1.0, 0.0),  Complex(r, 0.0),
            Complex(-r, 0.0),  Complex(0.0, r),    Complex(0.0, -r),
            Complex(1.0, 1.0) / s, Complex(1.0, -1.0) / s};
}

PauliVector logical_paulis_from_parity(const std::array<double, 5>& p) {
    PauliVector v{};
    v.i = p[0];
    v.x = (std::exp(2.0) * p[1] - p[0]) / (2.0 * std::sqrt(2.0));
    v.y = -std::exp(1.0 / std::sqrt(2.0)) / 2.0 * (p[2] - p[3]);
    v.z = std::exp(1.0) * p[4] - std::sqrt(2.0) * v.x;
    return v;
}

namespace {

std::vector<int> subspace_levels(int subspace_dim) {
    if (subspace_dim == 2) return {0, 2};
    if (subspace_dim == 3) return {0, 1, 2};
    throw std::invalid_argument("tomography: subspace_dim must be 2 or 3");
}

// Displaced parity restricted to the subspace, evaluated in a truncation
// large enough to make the restriction exact to float precision.
Mat restricted_parity(Complex alpha, int subspace_dim, int oracle_dim) {
    const FockSpace big(oracle_dim);
    const Mat full = displaced_parity(alpha, big);
    const auto levels = subspace_levels(subspace_dim);
    Mat out(subspace_dim, subspace_dim);
    for (int i = 0; i < subspace_dim; ++i)
        for (int j = 0; j < subspace_dim; ++j) out(i, j) = full(levels[i], levels[j]);
    return out;
}

Mat cholesky_from_params(const Eigen::VectorXd& theta, int d) {
    Mat t = Mat::Zero(d, d);
    int k = 0;
    for (int i = 0; i < d; ++i) t(i, i) = theta(k++);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < i; ++j) {
            t(i, j) = Complex(theta(k), theta(k + 1));
            k += 2;
        }
    return t;
}

Mat state_from_params(const Eigen::VectorXd& theta, int d) {
    const Mat t = cholesky_from_params(theta, d);
    Mat rho = t * t.adjoint();
    const double tr = rho.trace().real();
    if (tr < 1e-300) return Mat::Identity(d, d) / static_cast<double>(d);
    return rho / tr;
}

}  // namespace

MleResult mle_state(const std::vector<WignerSample>& samples, int subspace_dim,
                    const MleOptions& options) {
    const int d = subspace_dim;
    const auto needed = static_cast<std::size_t>(d * d - 1);
    if (samples.size() < needed)
        throw std::invalid_argument("mle_state: need at least d^2 - 1 samples");

    std::vector<Mat> predictors;
    predictors.reserve(samples.size());
    for (const auto& s : samples)
        predictors.push_back(restricted_parity(s.alpha, d, options.oracle_dim));

    // the trailing residual pins the gauge freedom T -> c T (which leaves
    // rho invariant and would otherwise make the normal equations singular);
    // it vanishes at any solution with Tr(T T^dag) = 1
    auto residuals = [&](const Eigen::VectorXd& theta) {
        const Mat rho = state_from_params(theta, d);
        const Mat t = cholesky_from_params(theta, d);
        Eigen::VectorXd r(samples.size() + 1);
        for (std::size_t i = 0; i < samples.size(); ++i)
            r(static_cast<Eigen::Index>(i)) =
                (predictors[i] * rho).trace().real() - samples[i].parity_expectation;
        r(static_cast<Eigen::Index>(samples.size())) = (t * t.adjoint()).trace().real() - 1.0;
        return r;
    };

    Eigen::VectorXd theta0 = Eigen::VectorXd::Zero(d * d);
    for (int i = 0; i < d; ++i) theta0(i) = 1.0 / std::sqrt(static_cast<double>(d));

    FitOptions fo;
    fo.max_iterations = options.max_iterations;
    fo.gradient_tol = options.gradient_tol;
    const LmOutcome lm = levenberg_marquardt(residuals, theta0, fo);

    MleResult out{DensityMatrix::from_matrix(state_from_params(lm.params, d), false),
                  lm.converged, lm.residual_norm, lm.iterations};
    return out;
}

const std::array<Mat, 9>& qutrit_operator_basis() {
    static const std::array<Mat, 9> basis = [] {
        const double c = std::sqrt(1.5);
        std::array<Mat, 9> e;
        for (auto& m : e) m = Mat::Zero(3, 3);
        e[0](0, 0) = c;  e[0](2, 2) = c;
        e[1](0, 2) = c;  e[1](2, 0) = c;
        e[2](0, 2) = -c; e[2](2, 0) = c;
        e[3](0, 0) = c;  e[3](2, 2) = -c;
        e[4](0, 1) = c;  e[4](1, 0) = c;
        e[5](0, 1) = -c; e[5](1, 0) = c;
        e[6](1, 2) = c;  e[6](2, 1) = c;
        e[7](1, 2) = -c; e[7](2, 1) = c;
        e[8](1, 1) = std::sqrt(3.0);
        return e;
    }();
    return basis;
}

const std::array<Mat, 4>& logical_operator_basis() {
    static const std::array<Mat, 4> basis = [] {
        std::array<Mat, 4> e;
        for (auto& m : e) m = Mat::Zero(2, 2);
        e[0](0, 0) = 1;  e[0](1, 1) = 1;   // I
        e[1](0, 1) = 1;  e[1](1, 0) = 1;   // X
        e[2](0, 1) = -1; e[2](1, 0) = 1;   // -iY
        e[3](0, 0) = 1;  e[3](1, 1) = -1;  // Z
        return e;
    }();
    return basis;
}

std::vector<DensityMatrix> process_input_states() {
    const FockSpace q(3);
    auto ket = [&](std::initializer_list<Complex> amps) {
        Vec v(3);
        int i = 0;
        for (Complex a : amps) v(i++) = a;
        return DensityMatrix::pure(Ket(v));
    };
    const Complex i1(0.0, 1.0);
    return {
        ket({1, 0, 0}),       // |0_L>
        ket({0, 0, 1}),       // |1_L>
        ket({1, 0, 1}),       // |+x_L>
        ket({1, 0, -i1}),     // |-y_L>
        ket({0, 1, 0}),       // |1>
        ket({1, 1, 0}),       // (|0> + |1>)/sqrt(2)
        ket({1, -i1, 0}),     // (|0> - i|1>)/sqrt(2)
        ket({0, 1, 1}),       // (|1> + |2>)/sqrt(2)
        ket({0, 1, -i1}),     // (|1> - i|2>)/sqrt(2)
    };
}

namespace {

Mat hermitian_psd_projection(const Mat& chi) {
    Mat herm = (chi + chi.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(herm);
    Eigen::VectorXd vals = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

ChiMatrix process_tomography(const std::vector<DensityMatrix>& inputs,
                             const std::vector<DensityMatrix>& outputs) {
    if (inputs.size() != 9 || outputs.size() != 9)
        throw std::invalid_argument("process_tomography: needs the nine state pairs");
    const auto& basis = qutrit_operator_basis();

    Mat a(81, 81);
    Vec b(81);
    for (int s = 0; s < 9; ++s) {
        if (inputs[s].dim() != 3 || outputs[s].dim() != 3)
            throw std::invalid_argument("process_tomography: states must be qutrits");
        for (int m = 0; m < 9; ++m)
            for (int n = 0; n < 9; ++n) {
                const Mat term = basis[m] * inputs[s].matrix() * basis[n].adjoint();
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j)
                        a(s * 9 + i * 3 + j, m * 9 + n) = term(i, j);
            }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) b(s * 9 + i * 3 + j) = outputs[s].matrix()(i, j);
    }

    const Vec x = a.colPivHouseholderQr().solve(b);
    Mat chi(9, 9);
    for (int m = 0; m < 9; ++m)
        for (int n = 0; n < 9; ++n) chi(m, n) = x(m * 9 + n);
    return {hermitian_psd_projection(chi), ChiBasis::qutrit9};
}

ReducedChi reduced_logical_chi(const ChiMatrix& chi9) {
    if (chi9.basis != ChiBasis::qutrit9)
        throw std::invalid_argument("reduced_logical_chi: expects a qutrit process matrix");
    // The first four qutrit basis operators restrict to sqrt(3/2) times the
    // logical basis; the remaining five act through |1> and drop out for
    // code-space inputs and projected outputs.
    ReducedChi out{{1.5 * chi9.elements.topLeftCorner(4, 4), ChiBasis::logical4}, 0.0, false};
    out.chi.elements = hermitian_psd_projection(out.chi.elements);
    out.logical_weight = out.chi.elements.trace().real();
    out.leakage_dominated = out.logical_weight < 0.25;
    return out;
}

double process_fidelity(const ChiMatrix& a, const ChiMatrix& b) {
    if (a.basis != b.basis)
        throw std::invalid_argument("process_fidelity: basis tags disagree");
    const double overlap = std::abs((a.elements * b.elements.adjoint()).trace());
    const double na = (a.elements * a.elements.adjoint()).trace().real();
    const double nb = (b.elements * b.elements.adjoint()).trace().real();
    if (na <= 0.0 || nb <= 0.0)
        throw std::invalid_argument("process_fidelity: vanishing process matrix");
    return overlap / std::sqrt(na * nb);
}

double state_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim())
        throw std::invalid_argument("state_fidelity: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Mat> es(rho.matrix());
    const Vec sqrt_vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().cast<Complex>();
    const Mat sqrt_rho = es.eigenvectors() * sqrt_vals.asDiagonal() * es.eigenvectors().adjoint();
    Eigen::SelfAdjointEigenSolver<Mat> inner(sqrt_rho * sigma.matrix() * sqrt_rho);
    const double root_sum = inner.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return std::min(1.0, root_sum * root_sum);
}

ChiMatrix chi_of_qutrit_unitary(const Mat& u) {
    if (u.rows() != 3 || u.cols() != 3)
        throw std::invalid_argument("chi_of_qutrit_unitary: expects a 3x3 unitary");
    const auto& basis = qutrit_operator_basis();
    Vec c(9);
    for (int m = 0; m < 9; ++m) c(m) = (basis[m].adjoint() * u).trace() / 3.0;
    return {c * c.adjoint(), ChiBasis::qutrit9};
}

Mat xl_half_unitary() {
    const double c = std::cos(M_PI / 4.0);
    const Complex is(0.0, -std::sin(M_PI / 4.0));
    Mat u = Mat::Zero(3, 3);
    u(0, 0) = c;
    u(2, 2) = c;
    u(0, 2) = is;
    u(2, 0) = is;
    u(1, 1) = 1.0;
    return u;
}

std::vector<WignerSample> synthesize_wigner_samples(const DensityMatrix& subspace_rho,
                                                    const std::vector<Complex>& alphas,
                                                    int subspace_dim, int oracle_dim) {
    if (subspace_rho.dim() != subspace_dim)
        throw std::invalid_argument("synthesize_wigner_samples: state/subspace mismatch");
    std::vector<WignerSample> out;
    out.reserve(alphas.size());
    for (Complex alpha : alphas) {
        const Mat p = restricted_parity(alpha, subspace_dim, oracle_dim);
        out.push_back({alpha, (p * subspace_rho.matrix()).trace().real(), 0});
    }
    return out;
}

}  // namespace erasim
