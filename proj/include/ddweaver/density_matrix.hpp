#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace ddweaver {

/**
 * Mixed state of up to a handful of qubits. Qubit i is bit i of the basis
 * index (qubit 0 is least significant).
 */
class DensityMatrix {
public:
    /// |0...0><0...0|
    explicit DensityMatrix(std::size_t n_qubits);
    /// Takes ownership of a 2^n x 2^n matrix; does not check physicality.
    static DensityMatrix from_matrix(Eigen::MatrixXcd rho);

    [[nodiscard]] std::size_t n_qubits() const noexcept { return n_; }
    [[nodiscard]] Eigen::Index dim() const noexcept { return rho_.rows(); }
    [[nodiscard]] const Eigen::MatrixXcd& matrix() const noexcept { return rho_; }

    /// rho -> U rho U^dagger. Throws SimulationError unless U is unitary within 1e-12.
    void apply_unitary(const Eigen::Matrix2cd& u, std::size_t q);
    /// Two-qubit U in the local basis |a b> (index 2*a + b).
    void apply_unitary(const Eigen::Matrix4cd& u, std::size_t a, std::size_t b);
    /// rho -> sum_k K rho K^dagger on one qubit.
    void apply_kraus(const std::vector<Eigen::Matrix2cd>& kraus, std::size_t q);
    /// Diagonal unitary diag(d): rho_ij -> d_i conj(d_j) rho_ij. |d_i| must be 1.
    void apply_diagonal(const Eigen::VectorXcd& d);
    /**
     * Closed form of decoherence_kraus on q: |1> population decays by
     * `gamma` into |0>, coherences are multiplied by `coherence`.
     */
    void apply_damping(double gamma, double coherence, std::size_t q);
    /// Linear map on q's 2x2 blocks in the column-stacked basis (rho00, rho10, rho01, rho11).
    void apply_superoperator(const Eigen::Matrix4cd& s, std::size_t q);
    /// apply_unitary without the unitarity check, for precomputed gates.
    void apply_unitary_unchecked(const Eigen::Matrix2cd& u, std::size_t q);
    void apply_diagonal_unchecked(const Eigen::VectorXcd& d);

    [[nodiscard]] double probability_zero(std::size_t q) const;
    [[nodiscard]] double trace_error() const;
    /// max |rho - rho^dagger|
    [[nodiscard]] double hermiticity_error() const;
    [[nodiscard]] double min_eigenvalue() const;
    [[nodiscard]] double purity() const;

private:
    DensityMatrix() = default;
    void check_qubit(std::size_t q) const;

    std::size_t n_ = 0;
    Eigen::MatrixXcd rho_;
};

[[nodiscard]] bool is_unitary(const Eigen::MatrixXcd& u, double tol = 1e-12);

namespace gates {
[[nodiscard]] Eigen::Matrix2cd hadamard();
[[nodiscard]] Eigen::Matrix2cd pauli_x();
/// diag(1, e^{i phi})
[[nodiscard]] Eigen::Matrix2cd phase(double phi);
/// diag(e^{-i theta/2}, e^{i theta/2})
[[nodiscard]] Eigen::Matrix2cd rz(double theta);
/// control is the first (high) local qubit
[[nodiscard]] Eigen::Matrix4cd cnot();
[[nodiscard]] Eigen::Matrix4cd swap();
} // namespace gates

/// Angular frequency in rad/ns of a frequency in kHz.
[[nodiscard]] constexpr double khz_to_rad_per_ns(double khz) noexcept {
    return 2.0 * 3.14159265358979323846 * khz * 1e-6;
}

/**
 * Kraus operators of amplitude damping (p = 1 - e^{-t/T1}) followed by pure
 * dephasing at 1/T2 - 1/(2 T1). Pass infinity to disable either constant;
 * with T1 = inf, T2 is the pure dephasing time. Throws InvariantError if
 * T2 > 2 T1.
 */
[[nodiscard]] std::vector<Eigen::Matrix2cd> decoherence_kraus(double t_ns, double t1_us, double t2_us);

/// The two numbers decoherence_kraus is built from.
struct DampingParams {
    double gamma = 0.0;     ///< 1 - e^{-t/T1}
    double coherence = 1.0; ///< off-diagonal factor, sqrt(1 - gamma) e^{-t/T_phi}
};
[[nodiscard]] DampingParams damping_params(double t_ns, double t1_us, double t2_us);
/// max |sum K^dagger K - I|
[[nodiscard]] double kraus_completeness_error(const std::vector<Eigen::Matrix2cd>& kraus);

void decoherence_channel(DensityMatrix& rho, std::size_t q, double t_ns, double t1_us, double t2_us);
/// Phase e^{-i 2 pi zeta t} on |11> of (a, b).
void zz_evolution(DensityMatrix& rho, std::size_t a, std::size_t b, double t_ns, double zeta_khz);
/// Rz(2 pi delta t) on q.
void stark_shift(DensityMatrix& rho, std::size_t q, double t_ns, double delta_khz);

/**
 * exp(-i (dt/2) (Omega X + 2 pi Delta Z)) with Omega = pi / t_p. dt = t_p
 * gives the whole pulse; shorter dt evolves part of it.
 */
[[nodiscard]] Eigen::Matrix2cd finite_pulse_unitary(double dt_ns, double t_p_ns, double delta_khz);
void finite_pulse_x(DensityMatrix& rho, std::size_t q, double t_p_ns, double delta_khz);

/**
 * Propagator of the pulse Hamiltonian of finite_pulse_unitary together with
 * T1 decay and pure dephasing over dt, for apply_superoperator. Drive and
 * decay act at once rather than one after the other.
 */
[[nodiscard]] Eigen::Matrix4cd driven_decay_superoperator(double dt_ns, double t_p_ns, double delta_khz, double t1_us,
                                                          double t2_us);

} // namespace ddweaver
