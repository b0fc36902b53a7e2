#pragma once

#include <utility>
#include <vector>

#include "erasim/fock.hpp"

namespace erasim {

// Device parameter record. Mode frequencies, Kerrs and linewidths are stored
// as linear frequencies in Hz (omega/2pi); coherence times in seconds;
// thermal populations dimensionless.
struct SystemParams {
    double omega_q = 5.249e9;
    double omega_c = 6.592e9;
    double omega_r = 8.540e9;

    double K_q = 222.96e6;
    double K_c = 3.98e3;
    double chi_qc = 1.69e6;
    double chi_qr = 1.01e6;
    double chi_qc_2 = 1.45e3;

    double T1_c = 466e-6;
    double T2R_c = 735e-6;
    double Tphi_c = 3073e-6;

    double T1_q = 141e-6;
    double T2R_q = 117e-6;
    double Tphi_q = 200e-6;

    double kappa_r = 1.542e6;

    double nth_c = 0.0072;
    double nth_q = 0.0534;

    // Sign applied to the Kerr/cross-Kerr block of the dispersive
    // Hamiltonian. +1 keeps the terms as written (negative); the observables
    // simulated here do not resolve the convention, so it stays switchable.
    double kerr_sign = 1.0;

    static SystemParams defaults() { return SystemParams{}; }

    double kappa_c() const { return 1.0 / T1_c; }

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

// Finite operator-sum map. trace_preserving channels satisfy
// sum E^dag E = I within 1e-9; otherwise sum E^dag E <= I.
class KrausChannel {
public:
    KrausChannel(std::vector<Mat> operators, bool trace_preserving);

    const std::vector<Mat>& operators() const { return ops_; }
    bool trace_preserving() const { return trace_preserving_; }
    int dim() const { return static_cast<int>(ops_.front().rows()); }

    // max |sum E^dag E - I|
    double completeness_defect() const;

private:
    std::vector<Mat> ops_;
    bool trace_preserving_;
};

struct LindbladSpec {
    Mat hamiltonian;  // angular units (rad/s); may be zero-sized for none
    std::vector<std::pair<Mat, double>> collapse_operators;  // (operator, rate 1/s)

    void validate() const;
};

// Single-photon-loss channel over an interval tau at rate kappa, truncated
// to jump orders 0..max_jumps. Trace preserving iff max_jumps >= dim-1.
KrausChannel photon_loss_kraus(double kappa, double tau, const FockSpace& space, int max_jumps);

// Rotating-frame dispersive Hamiltonian on the transmon (x) cavity product
// space, in rad/s. Mode-frequency terms are dropped (co-rotating frame).
// The second-order cross-Kerr enters as -chi'_qc/2 * n_q n_c (n_c - 1).
Mat dispersive_hamiltonian(const SystemParams& params, int transmon_levels, int cavity_levels,
                           bool include_second_order = true);

// {(a, (1+n_th)/T1), (a^dag, n_th/T1)}
std::vector<std::pair<Mat, double>> thermal_loss_collapse_ops(double T1, double n_th,
                                                              const FockSpace& space);

// (a^dag a, 2/T_phi): the rate is fixed by requiring the {0,1} subspace to
// reproduce 1/T2 = 1/(2 T1) + 1/T_phi.
std::pair<Mat, double> dephasing_collapse_op(double T_phi, const FockSpace& space);

// Liouvillian of the spec acting on column-stacked density matrices.
Mat liouvillian(const LindbladSpec& spec, int dim);

// Fixed-step RK4 integration of the master equation. Rejects dt when
// dt * (max rate + spectral norm of H) > 0.1.
DensityMatrix lindblad_evolve(const DensityMatrix& rho, const LindbladSpec& spec, double duration,
                              double dt);

// Exact propagation through the eigendecomposition of the Liouvillian;
// intended for small dims as an internal cross-check and for precomputing
// cycle superoperators.
DensityMatrix lindblad_evolve_exact(const DensityMatrix& rho, const LindbladSpec& spec,
                                    double duration);

// exp(L * t) for the spec's Liouvillian.
Mat evolution_superoperator(const LindbladSpec& spec, int dim, double t);

struct ChannelApplication {
    DensityMatrix state;
    double probability;
};

// sum_k E_k rho E_k^dag and its trace. The output is renormalized iff the
// channel is trace-non-increasing and normalize is set.
ChannelApplication apply_channel(const KrausChannel& channel, const DensityMatrix& rho,
                                 bool normalize = true);

}  // namespace erasim
