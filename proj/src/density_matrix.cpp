#include "ddweaver/density_matrix.hpp"

#include "ddweaver/error.hpp"

#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <limits>

namespace ddweaver {

using cd = std::complex<double>;

DensityMatrix::DensityMatrix(std::size_t n_qubits) : n_(n_qubits) {
    const Eigen::Index d = Eigen::Index{1} << n_qubits;
    rho_ = Eigen::MatrixXcd::Zero(d, d);
    rho_(0, 0) = 1.0;
}

DensityMatrix DensityMatrix::from_matrix(Eigen::MatrixXcd rho) {
    if (rho.rows() != rho.cols() || rho.rows() == 0 || (rho.rows() & (rho.rows() - 1)) != 0)
        throw SimulationError("density matrix must be square with power-of-two size");
    DensityMatrix out;
    while ((Eigen::Index{1} << out.n_) < rho.rows())
        ++out.n_;
    out.rho_ = std::move(rho);
    return out;
}

void DensityMatrix::check_qubit(std::size_t q) const {
    if (q >= n_)
        throw SimulationError(fmt::format("qubit {} out of range for {}-qubit state", q, n_));
}

bool is_unitary(const Eigen::MatrixXcd& u, double tol) {
    if (u.rows() != u.cols())
        return false;
    const Eigen::MatrixXcd e = u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
    return e.cwiseAbs().maxCoeff() <= tol;
}

void DensityMatrix::apply_unitary(const Eigen::Matrix2cd& u, std::size_t q) {
    if (!is_unitary(u))
        throw SimulationError("single-qubit operator is not unitary");
    apply_kraus({u}, q);
}

void DensityMatrix::apply_kraus(const std::vector<Eigen::Matrix2cd>& kraus, std::size_t q) {
    check_qubit(q);
    const Eigen::Index d = dim();
    const Eigen::Index bit = Eigen::Index{1} << q;
    // act on every 2x2 block {r, r|bit} x {c, c|bit}
    for (Eigen::Index r = 0; r < d; ++r) {
        if (r & bit)
            continue;
        for (Eigen::Index c = 0; c < d; ++c) {
            if (c & bit)
                continue;
            Eigen::Matrix2cd b;
            b << rho_(r, c), rho_(r, c | bit), rho_(r | bit, c), rho_(r | bit, c | bit);
            Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
            for (const auto& k : kraus)
                out.noalias() += k * b * k.adjoint();
            rho_(r, c) = out(0, 0);
            rho_(r, c | bit) = out(0, 1);
            rho_(r | bit, c) = out(1, 0);
            rho_(r | bit, c | bit) = out(1, 1);
        }
    }
}

void DensityMatrix::apply_unitary(const Eigen::Matrix4cd& u, std::size_t a, std::size_t b) {
    check_qubit(a);
    check_qubit(b);
    if (a == b)
        throw SimulationError("two-qubit unitary needs distinct qubits");
    if (!is_unitary(u))
        throw SimulationError("two-qubit operator is not unitary");
    const Eigen::Index d = dim();
    const Eigen::Index ba = Eigen::Index{1} << a, bb = Eigen::Index{1} << b;
    auto idx = [&](Eigen::Index base, int local) {
        return base | ((local & 2) ? ba : 0) | ((local & 1) ? bb : 0);
    };
    // rows: rho <- U rho
    for (Eigen::Index base = 0; base < d; ++base) {
        if (base & (ba | bb))
            continue;
        for (Eigen::Index c = 0; c < d; ++c) {
            Eigen::Vector4cd v;
            for (int l = 0; l < 4; ++l)
                v(l) = rho_(idx(base, l), c);
            v = u * v;
            for (int l = 0; l < 4; ++l)
                rho_(idx(base, l), c) = v(l);
        }
    }
    // columns: rho <- rho U^dagger
    const Eigen::Matrix4cd ut = u.conjugate();
    for (Eigen::Index base = 0; base < d; ++base) {
        if (base & (ba | bb))
            continue;
        for (Eigen::Index r = 0; r < d; ++r) {
            Eigen::Vector4cd v;
            for (int l = 0; l < 4; ++l)
                v(l) = rho_(r, idx(base, l));
            v = ut * v;
            for (int l = 0; l < 4; ++l)
                rho_(r, idx(base, l)) = v(l);
        }
    }
}

void DensityMatrix::apply_diagonal(const Eigen::VectorXcd& diag) {
    if (diag.size() != dim())
        throw SimulationError("diagonal size does not match the state");
    for (Eigen::Index i = 0; i < diag.size(); ++i)
        if (std::abs(std::abs(diag(i)) - 1.0) > 1e-12)
            throw SimulationError("diagonal operator is not unitary");
    apply_diagonal_unchecked(diag);
}

void DensityMatrix::apply_diagonal_unchecked(const Eigen::VectorXcd& diag) {
    const Eigen::Index d = dim();
    for (Eigen::Index c = 0; c < d; ++c) {
        const cd dc = std::conj(diag(c));
        for (Eigen::Index r = 0; r < d; ++r)
            rho_(r, c) *= diag(r) * dc;
    }
}

void DensityMatrix::apply_unitary_unchecked(const Eigen::Matrix2cd& u, std::size_t q) {
    check_qubit(q);
    const Eigen::Index d = dim();
    const Eigen::Index bit = Eigen::Index{1} << q;
    for (Eigen::Index c = 0; c < d; ++c)
        for (Eigen::Index r = 0; r < d; ++r) {
            if (r & bit)
                continue;
            const cd a = rho_(r, c), b = rho_(r | bit, c);
            rho_(r, c) = u(0, 0) * a + u(0, 1) * b;
            rho_(r | bit, c) = u(1, 0) * a + u(1, 1) * b;
        }
    const Eigen::Matrix2cd v = u.conjugate();
    for (Eigen::Index c = 0; c < d; ++c) {
        if (c & bit)
            continue;
        for (Eigen::Index r = 0; r < d; ++r) {
            const cd a = rho_(r, c), b = rho_(r, c | bit);
            rho_(r, c) = v(0, 0) * a + v(0, 1) * b;
            rho_(r, c | bit) = v(1, 0) * a + v(1, 1) * b;
        }
    }
}

void DensityMatrix::apply_damping(double gamma, double coherence, std::size_t q) {
    check_qubit(q);
    const Eigen::Index d = dim();
    const Eigen::Index bit = Eigen::Index{1} << q;
    for (Eigen::Index c = 0; c < d; ++c) {
        for (Eigen::Index r = 0; r < d; ++r) {
            const bool r1 = r & bit, c1 = c & bit;
            if (r1 && c1) {
                const cd moved = gamma * rho_(r, c);
                rho_(r & ~bit, c & ~bit) += moved;
                rho_(r, c) -= moved;
            } else if (r1 != c1) {
                rho_(r, c) *= coherence;
            }
        }
    }
}

void DensityMatrix::apply_superoperator(const Eigen::Matrix4cd& s, std::size_t q) {
    check_qubit(q);
    const Eigen::Index d = dim();
    const Eigen::Index bit = Eigen::Index{1} << q;
    Eigen::Vector4cd v;
    for (Eigen::Index c = 0; c < d; ++c) {
        if (c & bit)
            continue;
        for (Eigen::Index r = 0; r < d; ++r) {
            if (r & bit)
                continue;
            v << rho_(r, c), rho_(r | bit, c), rho_(r, c | bit), rho_(r | bit, c | bit);
            v = s * v;
            rho_(r, c) = v(0);
            rho_(r | bit, c) = v(1);
            rho_(r, c | bit) = v(2);
            rho_(r | bit, c | bit) = v(3);
        }
    }
}

double DensityMatrix::probability_zero(std::size_t q) const {
    check_qubit(q);
    const Eigen::Index bit = Eigen::Index{1} << q;
    double p = 0.0;
    for (Eigen::Index i = 0; i < dim(); ++i)
        if (!(i & bit))
            p += rho_(i, i).real();
    return p;
}

double DensityMatrix::trace_error() const {
    return std::abs(rho_.trace() - cd(1.0));
}

double DensityMatrix::hermiticity_error() const {
    return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
    const Eigen::MatrixXcd h = 0.5 * (rho_ + rho_.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double DensityMatrix::purity() const {
    return (rho_ * rho_).trace().real();
}

namespace gates {

Eigen::Matrix2cd hadamard() {
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::Matrix2cd m;
    m << s, s, s, -s;
    return m;
}

Eigen::Matrix2cd pauli_x() {
    Eigen::Matrix2cd m;
    m << 0, 1, 1, 0;
    return m;
}

Eigen::Matrix2cd phase(double phi) {
    Eigen::Matrix2cd m;
    m << 1, 0, 0, std::polar(1.0, phi);
    return m;
}

Eigen::Matrix2cd rz(double theta) {
    Eigen::Matrix2cd m;
    m << std::polar(1.0, -theta / 2), 0, 0, std::polar(1.0, theta / 2);
    return m;
}

Eigen::Matrix4cd cnot() {
    Eigen::Matrix4cd m;
    m << 1, 0, 0, 0,
         0, 1, 0, 0,
         0, 0, 0, 1,
         0, 0, 1, 0;
    return m;
}

Eigen::Matrix4cd swap() {
    Eigen::Matrix4cd m;
    m << 1, 0, 0, 0,
         0, 0, 1, 0,
         0, 1, 0, 0,
         0, 0, 0, 1;
    return m;
}

} // namespace gates

namespace {

struct RawDamping {
    double gamma;
    double lambda; // pure-dephasing factor
};

RawDamping raw_damping(double t_ns, double t1_us, double t2_us) {
    if (t_ns < 0)
        throw InvariantError("decoherence time must be non-negative");
    if (!(t1_us > 0) || !(t2_us > 0))
        throw InvariantError(fmt::format("T1 and T2 must be positive (T1={}, T2={})", t1_us, t2_us));
    if (t2_us > 2 * t1_us)
        throw InvariantError(fmt::format("T2={} us exceeds 2*T1={} us", t2_us, 2 * t1_us));

    const double t_us = t_ns * 1e-3;
    const double gamma = std::isinf(t1_us) ? 0.0 : -std::expm1(-t_us / t1_us);
    const double rate_phi = (std::isinf(t2_us) ? 0.0 : 1.0 / t2_us) - (std::isinf(t1_us) ? 0.0 : 0.5 / t1_us);
    const double lambda = std::isinf(t2_us) ? 1.0 : std::exp(-t_us * std::max(rate_phi, 0.0));
    return {gamma, lambda};
}

} // namespace

DampingParams damping_params(double t_ns, double t1_us, double t2_us) {
    const auto [gamma, lambda] = raw_damping(t_ns, t1_us, t2_us);
    return {gamma, std::sqrt(1.0 - gamma) * lambda};
}

std::vector<Eigen::Matrix2cd> decoherence_kraus(double t_ns, double t1_us, double t2_us) {
    const auto [gamma, lambda] = raw_damping(t_ns, t1_us, t2_us);
    Eigen::Matrix2cd a0, a1, z;
    a0 << 1, 0, 0, std::sqrt(1.0 - gamma);
    a1 << 0, std::sqrt(gamma), 0, 0;
    z << 1, 0, 0, -1;
    const double c0 = std::sqrt((1.0 + lambda) / 2), c1 = std::sqrt((1.0 - lambda) / 2);

    std::vector<Eigen::Matrix2cd> out{c0 * a0};
    if (gamma > 0)
        out.push_back(c0 * a1);
    if (c1 > 0) {
        out.push_back(c1 * z * a0);
        if (gamma > 0)
            out.push_back(c1 * z * a1);
    }
    return out;
}

double kraus_completeness_error(const std::vector<Eigen::Matrix2cd>& kraus) {
    Eigen::Matrix2cd s = -Eigen::Matrix2cd::Identity();
    for (const auto& k : kraus)
        s += k.adjoint() * k;
    return s.cwiseAbs().maxCoeff();
}

void decoherence_channel(DensityMatrix& rho, std::size_t q, double t_ns, double t1_us, double t2_us) {
    rho.apply_kraus(decoherence_kraus(t_ns, t1_us, t2_us), q);
}

void zz_evolution(DensityMatrix& rho, std::size_t a, std::size_t b, double t_ns, double zeta_khz) {
    if (a == b)
        throw SimulationError("ZZ coupling needs two distinct qubits");
    const Eigen::Index ma = Eigen::Index{1} << a, mb = Eigen::Index{1} << b;
    const cd ph = std::polar(1.0, -khz_to_rad_per_ns(zeta_khz) * t_ns);
    Eigen::VectorXcd d = Eigen::VectorXcd::Ones(rho.dim());
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if ((i & ma) && (i & mb))
            d(i) = ph;
    rho.apply_diagonal(d);
}

void stark_shift(DensityMatrix& rho, std::size_t q, double t_ns, double delta_khz) {
    rho.apply_unitary(gates::rz(khz_to_rad_per_ns(delta_khz) * t_ns), q);
}

Eigen::Matrix4cd driven_decay_superoperator(double dt_ns, double t_p_ns, double delta_khz, double t1_us,
                                            double t2_us) {
    if (!(t_p_ns > 0))
        throw SimulationError("pulse width must be positive");
    (void)raw_damping(dt_ns, t1_us, t2_us); // validates T1, T2 and dt
    const cd i(0.0, 1.0);
    Eigen::Matrix2cd x, z, lower, id = Eigen::Matrix2cd::Identity();
    x << 0, 1, 1, 0;
    z << 1, 0, 0, -1;
    lower << 0, 1, 0, 0;
    const Eigen::Matrix2cd h = 0.5 * (3.14159265358979323846 / t_p_ns * x + khz_to_rad_per_ns(delta_khz) * z);

    // vec(A rho B) = (B^T kron A) vec(rho)
    auto kron = [](const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
        Eigen::Matrix4cd k;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                k.block<2, 2>(2 * r, 2 * c) = a(r, c) * b;
        return k;
    };
    auto dissipator = [&](const Eigen::Matrix2cd& l) {
        const Eigen::Matrix2cd ll = l.adjoint() * l;
        return Eigen::Matrix4cd(kron(l.conjugate(), l) - 0.5 * kron(id, ll) - 0.5 * kron(ll.transpose(), id));
    };
    // rates per ns
    const double rate_1 = std::isinf(t1_us) ? 0.0 : 1e-3 / t1_us;
    const double rate_phi =
        std::max(0.0, (std::isinf(t2_us) ? 0.0 : 1e-3 / t2_us) - (std::isinf(t1_us) ? 0.0 : 0.5e-3 / t1_us));
    Eigen::Matrix4cd gen = -i * (kron(id, h) - kron(h.transpose(), id));
    gen += rate_1 * dissipator(lower) + 0.5 * rate_phi * dissipator(z);
    return (gen * dt_ns).exp();
}

Eigen::Matrix2cd finite_pulse_unitary(double dt_ns, double t_p_ns, double delta_khz) {
    if (!(t_p_ns > 0))
        throw SimulationError("pulse width must be positive");
    // exp(-i theta n.sigma) with theta n = (dt/2) (Omega, 0, 2 pi Delta)
    const double hx = 0.5 * dt_ns * 3.14159265358979323846 / t_p_ns;
    const double hz = 0.5 * dt_ns * khz_to_rad_per_ns(delta_khz);
    const double theta = std::hypot(hx, hz);
    if (theta == 0.0)
        return Eigen::Matrix2cd::Identity();
    const double c = std::cos(theta), s = std::sin(theta) / theta;
    const cd i(0.0, 1.0);
    Eigen::Matrix2cd u;
    u << c - i * s * hz, -i * s * hx, -i * s * hx, c + i * s * hz;
    return u;
}

void finite_pulse_x(DensityMatrix& rho, std::size_t q, double t_p_ns, double delta_khz) {
    rho.apply_unitary(finite_pulse_unitary(t_p_ns, t_p_ns, delta_khz), q);
}

} // namespace ddweaver
