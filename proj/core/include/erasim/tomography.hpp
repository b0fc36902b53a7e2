#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "erasim/fock.hpp"

namespace erasim {

struct WignerSample {
    Complex alpha;
    double parity_expectation;  // <P(alpha)>, in [-1, 1]
    long shots = 0;
};

// CSV columns: re_alpha, im_alpha, parity_expectation, shots.
std::vector<WignerSample> load_wigner_csv(std::istream& is);
void write_wigner_csv(std::ostream& os, const std::vector<WignerSample>& samples);

// <P(alpha)> = Tr[rho D(alpha) P D(-alpha)].
double parity_expectation(const DensityMatrix& rho, Complex alpha);

// W(alpha) = (2/pi) <P(alpha)>.
double wigner(const DensityMatrix& rho, Complex alpha);

// The five displacements whose projected parities span the logical Pauli
// operators on span{|0>,|2>}, and the eight-point extension covering the
// {|0>,|1>,|2>} qutrit.
std::array<Complex, 5> five_point_alphas();
std::array<Complex, 8> eight_point_alphas();

struct PauliVector {
    double i, x, y, z;
};

// Inputs are raw parity expectations <P(alpha)> at five_point_alphas(), NOT
// Wigner values: the 2/pi scale is stripped at this boundary.
PauliVector logical_paulis_from_parity(const std::array<double, 5>& parities);

struct MleOptions {
    int max_iterations = 10000;
    double gradient_tol = 1e-10;
    int oracle_dim = 30;  // truncation used to evaluate the parity operators
};

struct MleResult {
    DensityMatrix rho;  // subspace-dim state; basis {|0>,|2>} or {|0>,|1>,|2>}
    bool converged = false;
    double residual = 0.0;
    int iterations = 0;
};

// Least-squares state reconstruction constrained to physical states through
// a Cholesky-factor parameterization; deterministic start at the maximally
// mixed state.
MleResult mle_state(const std::vector<WignerSample>& samples, int subspace_dim,
                    const MleOptions& options = {});

enum class ChiBasis { qutrit9, logical4 };

struct ChiMatrix {
    Mat elements;
    ChiBasis basis;
};

// Orthogonal qutrit operator basis with Tr(E_m^dag E_n) = 3 delta_mn; the
// first four elements act within the logical subspace.
const std::array<Mat, 9>& qutrit_operator_basis();

// Logical-subspace counterpart {I_L, X_L, -iY_L, Z_L} (Tr(E^dag E) = 2).
const std::array<Mat, 4>& logical_operator_basis();

// The nine qutrit input states used for process tomography.
std::vector<DensityMatrix> process_input_states();

// Linear inversion of rho_out = sum chi_mn E_m rho_in E_n^dag over the nine
// state pairs, followed by projection onto Hermitian positive semidefinite.
ChiMatrix process_tomography(const std::vector<DensityMatrix>& inputs,
                             const std::vector<DensityMatrix>& outputs);

struct ReducedChi {
    ChiMatrix chi;              // 4x4 in the logical operator basis
    double logical_weight;      // trace retained within the code space
    bool leakage_dominated;     // logical_weight below 0.25
};

// Restriction of a qutrit process matrix to the logical subspace,
// discarding operations that act through the leakage state.
ReducedChi reduced_logical_chi(const ChiMatrix& chi9);

// |Tr(a b^dag)| / sqrt(Tr(a a^dag) Tr(b b^dag))
double process_fidelity(const ChiMatrix& a, const ChiMatrix& b);

// (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2
double state_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

// chi matrix of a qutrit unitary in the qutrit operator basis.
ChiMatrix chi_of_qutrit_unitary(const Mat& u);

// exp(-i pi/4 X_L) on {|0>,|1>,|2>}: the elementary logical half rotation.
Mat xl_half_unitary();

// Ideal parity expectations of a state for a displacement list, evaluated in
// a large truncation (tomography oracle / synthetic data source).
std::vector<WignerSample> synthesize_wigner_samples(const DensityMatrix& subspace_rho,
                                                    const std::vector<Complex>& alphas,
                                                    int subspace_dim, int oracle_dim = 30);

}  // namespace erasim
