#include "erasim/fock.hpp"

#include <cmath>
#include <iostream>

namespace erasim {

double& default_tolerance() {
    static double tol = 1e-10;
    return tol;
}

Ket::Ket(Vec amplitudes) : amps_(std::move(amplitudes)) {
    const double norm = amps_.norm();
    if (norm < 1e-12) throw std::invalid_argument("Ket: zero-norm amplitude vector");
    amps_ /= norm;
}

Ket Ket::fock(const FockSpace& space, int n) {
    if (n < 0 || n >= space.dim)
        throw std::invalid_argument("Ket::fock: level " + std::to_string(n) + " outside space");
    Vec v = Vec::Zero(space.dim);
    v(n) = 1.0;
    return Ket(std::move(v));
}

DensityMatrix DensityMatrix::from_matrix(Mat m, bool validate) {
    if (m.rows() != m.cols()) throw std::invalid_argument("DensityMatrix: matrix must be square");
    DensityMatrix rho(std::move(m));
    if (validate) rho.validate(default_tolerance());
    return rho;
}

DensityMatrix DensityMatrix::pure(const Ket& psi) {
    return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(const FockSpace& space) {
    return DensityMatrix(Mat::Identity(space.dim, space.dim) / static_cast<double>(space.dim));
}

DensityMatrix DensityMatrix::normalized() const {
    const double tr = trace();
    if (tr < 1e-12) throw std::runtime_error("DensityMatrix::normalized: trace vanishes");
    return DensityMatrix(m_ / tr);
}

double DensityMatrix::physicality_defect() const {
    double defect = hermiticity_defect(m_);
    defect = std::max(defect, std::abs(trace() - 1.0));
    Eigen::SelfAdjointEigenSolver<Mat> es((m_ + m_.adjoint()) / 2.0);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < 0.0) defect = std::max(defect, -min_eig);
    return defect;
}

void DensityMatrix::validate(double tol) const {
    if (hermiticity_defect(m_) > tol)
        throw std::invalid_argument("DensityMatrix: not Hermitian within tolerance");
    if (std::abs(trace() - 1.0) > tol)
        throw std::invalid_argument("DensityMatrix: trace differs from 1");
    Eigen::SelfAdjointEigenSolver<Mat> es((m_ + m_.adjoint()) / 2.0);
    if (es.eigenvalues().minCoeff() < -1e-9)
        throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond tolerance");
}

Mat annihilation(const FockSpace& space) {
    Mat a = Mat::Zero(space.dim, space.dim);
    for (int n = 1; n < space.dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

Mat creation(const FockSpace& space) {
    return annihilation(space).adjoint();
}

Mat number_op(const FockSpace& space) {
    Mat n = Mat::Zero(space.dim, space.dim);
    for (int k = 0; k < space.dim; ++k) n(k, k) = static_cast<double>(k);
    return n;
}

Mat parity_op(const FockSpace& space) {
    Mat p = Mat::Zero(space.dim, space.dim);
    for (int k = 0; k < space.dim; ++k) p(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
    return p;
}

Mat displacement(Complex alpha, const FockSpace& space, double* unitarity_defect) {
    const Mat a = annihilation(space);
    // generator G = alpha a^dag - conj(alpha) a is anti-Hermitian, so
    // K = -iG is Hermitian and D = exp(iK).
    const Mat generator = alpha * a.adjoint() - std::conj(alpha) * a;
    const Mat k = Complex(0.0, -1.0) * generator;
    Eigen::SelfAdjointEigenSolver<Mat> es(k);
    Vec phases(space.dim);
    for (int i = 0; i < space.dim; ++i)
        phases(i) = std::exp(Complex(0.0, es.eigenvalues()(i)));
    const Mat d = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();

    const double defect =
        (d * d.adjoint() - Mat::Identity(space.dim, space.dim)).cwiseAbs().maxCoeff();
    if (unitarity_defect != nullptr) {
        *unitarity_defect = defect;
    } else if (defect > 1e-8) {
        std::cerr << "erasim: displacement(|alpha|=" << std::abs(alpha) << ", dim=" << space.dim
                  << ") unitarity defect " << defect << " exceeds 1e-8; increase dim\n";
    }
    return d;
}

Mat displaced_parity(Complex alpha, const FockSpace& space) {
    const Mat d = displacement(alpha, space);
    return d * parity_op(space) * d.adjoint();
}

double expectation(const Mat& op, const DensityMatrix& rho) {
    return (op * rho.matrix()).trace().real();
}

Complex expectation_c(const Mat& op, const DensityMatrix& rho) {
    return (op * rho.matrix()).trace();
}

double hermiticity_defect(const Mat& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace erasim
