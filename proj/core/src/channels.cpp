#include "erasim/channels.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace erasim {

namespace {

void require_field(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw std::invalid_argument("SystemParams." + field + ": " + what);
}

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

}  // namespace

void SystemParams::validate() const {
    require_field(T1_c > 0, "T1_c", "must be positive");
    require_field(T2R_c > 0, "T2R_c", "must be positive");
    require_field(Tphi_c > 0, "Tphi_c", "must be positive");
    require_field(T1_q > 0, "T1_q", "must be positive");
    require_field(T2R_q > 0, "T2R_q", "must be positive");
    require_field(Tphi_q > 0, "Tphi_q", "must be positive");
    require_field(nth_c >= 0 && nth_c < 1, "nth_c", "must lie in [0, 1)");
    require_field(nth_q >= 0 && nth_q < 1, "nth_q", "must lie in [0, 1)");
    // 1/T2R >= 1/(2 T1) up to a small slack
    require_field(1.0 / T2R_c >= 0.5 / T1_c - 1e-6 / T1_c, "T2R_c", "violates T2 <= 2 T1");
    require_field(1.0 / T2R_q >= 0.5 / T1_q - 1e-6 / T1_q, "T2R_q", "violates T2 <= 2 T1");
}

KrausChannel::KrausChannel(std::vector<Mat> operators, bool trace_preserving)
    : ops_(std::move(operators)), trace_preserving_(trace_preserving) {
    if (ops_.empty()) throw std::invalid_argument("KrausChannel: no operators");
    const auto rows = ops_.front().rows();
    for (const Mat& e : ops_)
        if (e.rows() != rows || e.cols() != rows)
            throw std::invalid_argument("KrausChannel: operator dimensions disagree");

    Mat sum = Mat::Zero(rows, rows);
    for (const Mat& e : ops_) sum += e.adjoint() * e;
    if (trace_preserving_) {
        if ((sum - Mat::Identity(rows, rows)).cwiseAbs().maxCoeff() > 1e-9)
            throw std::invalid_argument("KrausChannel: completeness relation violated");
    } else {
        Eigen::SelfAdjointEigenSolver<Mat> es(sum);
        if (es.eigenvalues().maxCoeff() > 1.0 + 1e-9)
            throw std::invalid_argument("KrausChannel: map increases trace");
    }
}

double KrausChannel::completeness_defect() const {
    const auto n = ops_.front().rows();
    Mat sum = Mat::Zero(n, n);
    for (const Mat& e : ops_) sum += e.adjoint() * e;
    return (sum - Mat::Identity(n, n)).cwiseAbs().maxCoeff();
}

void LindbladSpec::validate() const {
    if (hamiltonian.size() > 0 && hermiticity_defect(hamiltonian) > default_tolerance())
        throw std::invalid_argument("LindbladSpec: Hamiltonian must be Hermitian");
    for (const auto& [op, rate] : collapse_operators)
        if (rate < 0) throw std::invalid_argument("LindbladSpec: negative rate");
}

KrausChannel photon_loss_kraus(double kappa, double tau, const FockSpace& space, int max_jumps) {
    if (kappa < 0) throw std::invalid_argument("photon_loss_kraus: kappa must be >= 0");
    if (tau < 0) throw std::invalid_argument("photon_loss_kraus: tau must be >= 0");
    if (max_jumps < 0 || max_jumps >= space.dim)
        throw std::invalid_argument("photon_loss_kraus: max_jumps must lie in [0, dim)");

    const double kt = kappa * tau;
    const double jump_weight = 1.0 - std::exp(-kt);

    // e^{-kt n/2} diagonal
    Vec no_jump(space.dim);
    for (int n = 0; n < space.dim; ++n) no_jump(n) = std::exp(-kt * n / 2.0);

    const Mat a = annihilation(space);
    std::vector<Mat> ops;
    Mat a_pow = Mat::Identity(space.dim, space.dim);
    for (int k = 0; k <= max_jumps; ++k) {
        const double coeff = std::sqrt(std::pow(jump_weight, k) / factorial(k));
        ops.push_back(coeff * no_jump.asDiagonal() * a_pow);
        a_pow = a * a_pow;
    }
    return KrausChannel(std::move(ops), max_jumps >= space.dim - 1);
}

Mat dispersive_hamiltonian(const SystemParams& params, int transmon_levels, int cavity_levels,
                           bool include_second_order) {
    if (transmon_levels < 1 || transmon_levels > 3 || cavity_levels < 2 || cavity_levels > 6)
        throw std::invalid_argument("dispersive_hamiltonian: dims limited to <= 3 x 6");

    const int dim = transmon_levels * cavity_levels;
    Mat h = Mat::Zero(dim, dim);
    const double two_pi = 2.0 * M_PI;
    // diagonal in the product number basis |n_q, n_c>
    for (int nq = 0; nq < transmon_levels; ++nq) {
        for (int nc = 0; nc < cavity_levels; ++nc) {
            double e = 0.0;
            e -= params.K_q / 2.0 * nq * (nq - 1);
            e -= params.K_c / 2.0 * nc * (nc - 1);
            e -= params.chi_qc * nq * nc;
            if (include_second_order) e -= params.chi_qc_2 / 2.0 * nq * nc * (nc - 1);
            const int idx = nq * cavity_levels + nc;
            h(idx, idx) = params.kerr_sign * two_pi * e;
        }
    }
    return h;
}

std::vector<std::pair<Mat, double>> thermal_loss_collapse_ops(double T1, double n_th,
                                                              const FockSpace& space) {
    if (T1 <= 0) throw std::invalid_argument("thermal_loss_collapse_ops: T1 must be positive");
    if (n_th < 0 || n_th >= 1)
        throw std::invalid_argument("thermal_loss_collapse_ops: n_th must lie in [0, 1)");
    std::vector<std::pair<Mat, double>> ops;
    ops.emplace_back(annihilation(space), (1.0 + n_th) / T1);
    if (n_th > 0) ops.emplace_back(creation(space), n_th / T1);
    return ops;
}

std::pair<Mat, double> dephasing_collapse_op(double T_phi, const FockSpace& space) {
    const double rate = std::isinf(T_phi) ? 0.0 : 2.0 / T_phi;
    return {number_op(space), rate};
}

Mat liouvillian(const LindbladSpec& spec, int dim) {
    const int d2 = dim * dim;
    Mat l = Mat::Zero(d2, d2);
    const Mat id = Mat::Identity(dim, dim);
    if (spec.hamiltonian.size() > 0) {
        const Mat& h = spec.hamiltonian;
        l += Complex(0.0, -1.0) *
             (Eigen::kroneckerProduct(id, h) - Eigen::kroneckerProduct(h.transpose(), id));
    }
    for (const auto& [c, rate] : spec.collapse_operators) {
        const Mat cdc = c.adjoint() * c;
        l += rate * (Eigen::kroneckerProduct(c.conjugate(), c).eval() -
                     0.5 * Eigen::kroneckerProduct(id, cdc).eval() -
                     0.5 * Eigen::kroneckerProduct(cdc.transpose(), id).eval());
    }
    return l;
}

namespace {

double step_scale(const LindbladSpec& spec) {
    double scale = 0.0;
    for (const auto& [c, rate] : spec.collapse_operators) scale = std::max(scale, rate);
    if (spec.hamiltonian.size() > 0) {
        Eigen::SelfAdjointEigenSolver<Mat> es(spec.hamiltonian);
        scale += es.eigenvalues().cwiseAbs().maxCoeff();
    }
    return scale;
}

}  // namespace

DensityMatrix lindblad_evolve(const DensityMatrix& rho, const LindbladSpec& spec, double duration,
                              double dt) {
    if (dt <= 0) throw std::invalid_argument("lindblad_evolve: dt must be positive");
    if (duration < 0) throw std::invalid_argument("lindblad_evolve: duration must be >= 0");
    spec.validate();
    if (duration == 0.0) return rho;
    if (dt * step_scale(spec) > 0.1)
        throw std::invalid_argument("lindblad_evolve: dt too large for the spec's rates");

    const int dim = rho.dim();
    const Mat l = liouvillian(spec, dim);
    const auto steps = static_cast<long>(std::ceil(duration / dt));
    const double h = duration / static_cast<double>(steps);

    Vec v = Eigen::Map<const Vec>(rho.matrix().data(), dim * dim);
    for (long s = 0; s < steps; ++s) {
        const Vec k1 = l * v;
        const Vec k2 = l * (v + 0.5 * h * k1);
        const Vec k3 = l * (v + 0.5 * h * k2);
        const Vec k4 = l * (v + h * k3);
        v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    Mat out = Eigen::Map<const Mat>(v.data(), dim, dim);
    out = (out + out.adjoint()) / 2.0;  // discard integration skew
    return DensityMatrix::from_matrix(std::move(out), false);
}

DensityMatrix lindblad_evolve_exact(const DensityMatrix& rho, const LindbladSpec& spec,
                                    double duration) {
    spec.validate();
    const int dim = rho.dim();
    const Mat s = evolution_superoperator(spec, dim, duration);
    Vec v = Eigen::Map<const Vec>(rho.matrix().data(), dim * dim);
    v = s * v;
    Mat out = Eigen::Map<const Mat>(v.data(), dim, dim);
    out = (out + out.adjoint()) / 2.0;
    return DensityMatrix::from_matrix(std::move(out), false);
}

Mat evolution_superoperator(const LindbladSpec& spec, int dim, double t) {
    return (liouvillian(spec, dim) * t).exp();
}

ChannelApplication apply_channel(const KrausChannel& channel, const DensityMatrix& rho,
                                 bool normalize) {
    if (channel.dim() != rho.dim())
        throw std::invalid_argument("apply_channel: dimension mismatch");
    Mat out = Mat::Zero(rho.dim(), rho.dim());
    for (const Mat& e : channel.operators()) out += e * rho.matrix() * e.adjoint();
    const double prob = out.trace().real();
    if (!channel.trace_preserving() && normalize) {
        if (prob < 1e-12) throw std::runtime_error("apply_channel: state fully suppressed");
        out /= prob;
    }
    return {DensityMatrix::from_matrix(std::move(out), false), prob};
}

}  // namespace erasim
