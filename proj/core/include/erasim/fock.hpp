#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace erasim {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Global absolute tolerance used by validity checks unless an operation
// states a tighter one.
double& default_tolerance();

// Truncated Fock space of a single bosonic mode. Every operator built for a
// space is dim x dim over the number basis {|0>, ..., |dim-1>}.
struct FockSpace {
    int dim;

    explicit FockSpace(int d) : dim(d) {
        if (d < 2) throw std::invalid_argument("FockSpace: dim must be >= 2");
    }
};

// Normalized pure state.
class Ket {
public:
    explicit Ket(Vec amplitudes);

    static Ket fock(const FockSpace& space, int n);

    const Vec& amplitudes() const { return amps_; }
    int dim() const { return static_cast<int>(amps_.size()); }
    Complex amplitude(int n) const { return amps_(n); }

private:
    Vec amps_;
};

class DensityMatrix {
public:
    // Validates Hermiticity, unit trace and positivity unless validate=false
    // (channels construct intermediate states through the unchecked path).
    static DensityMatrix from_matrix(Mat m, bool validate = true);
    static DensityMatrix pure(const Ket& psi);
    static DensityMatrix maximally_mixed(const FockSpace& space);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Mat& matrix() const { return m_; }
    double trace() const { return m_.trace().real(); }
    double population(int n) const { return m_(n, n).real(); }
    Complex coherence(int m, int n) const { return m_(m, n); }

    DensityMatrix normalized() const;
    // Largest violation among the three state invariants.
    double physicality_defect() const;
    void validate(double tol) const;

private:
    explicit DensityMatrix(Mat m) : m_(std::move(m)) {}
    Mat m_;
};

Mat annihilation(const FockSpace& space);
Mat creation(const FockSpace& space);
Mat number_op(const FockSpace& space);

// Photon-number parity (-1)^n.
Mat parity_op(const FockSpace& space);

// exp(alpha a^dag - conj(alpha) a), computed by eigendecomposition of the
// Hermitian generator. When the truncation makes the result deviate from
// unitarity by more than 1e-8 the defect is reported through
// *unitarity_defect (or a warning is printed if no out-parameter is given).
Mat displacement(Complex alpha, const FockSpace& space,
                 double* unitarity_defect = nullptr);

// D(alpha) P D(-alpha).
Mat displaced_parity(Complex alpha, const FockSpace& space);

double expectation(const Mat& op, const DensityMatrix& rho);
Complex expectation_c(const Mat& op, const DensityMatrix& rho);

// max |A - A^dag|
double hermiticity_defect(const Mat& m);

}  // namespace erasim
