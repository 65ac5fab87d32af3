#include "ddweaver/fit.hpp"

#include "ddweaver/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ddweaver {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

// p = (a, b, B, f, g): a cos(2 pi f k) e^{-g k} - b sin(2 pi f k) e^{-g k} + B
using Params = Eigen::Matrix<double, 5, 1>;

Eigen::VectorXd residuals(const Params& p, const Eigen::VectorXd& k, const Eigen::VectorXd& y) {
    Eigen::VectorXd r(k.size());
    for (Eigen::Index i = 0; i < k.size(); ++i) {
        const double th = kTwoPi * p(3) * k(i), e = std::exp(-p(4) * k(i));
        r(i) = y(i) - (p(0) * std::cos(th) * e - p(1) * std::sin(th) * e + p(2));
    }
    return r;
}

Eigen::MatrixXd jacobian(const Params& p, const Eigen::VectorXd& k) {
    Eigen::MatrixXd j(k.size(), 5);
    for (Eigen::Index i = 0; i < k.size(); ++i) {
        const double th = kTwoPi * p(3) * k(i), e = std::exp(-p(4) * k(i));
        const double c = std::cos(th), s = std::sin(th);
        j(i, 0) = c * e;
        j(i, 1) = -s * e;
        j(i, 2) = 1.0;
        j(i, 3) = (-p(0) * s - p(1) * c) * e * kTwoPi * k(i);
        j(i, 4) = -k(i) * (p(0) * c - p(1) * s) * e;
    }
    return j;
}

struct GridBest {
    Params p;
    double cost = std::numeric_limits<double>::infinity();
};

GridBest grid_search(const Eigen::VectorXd& k, const Eigen::VectorXd& y) {
    GridBest best;
    const double span = std::max(k.maxCoeff() - k.minCoeff(), 1.0);
    Eigen::MatrixXd basis(k.size(), 3);
    for (int fi = 0; fi <= 500; ++fi) {
        const double f = 0.5 * fi / 500.0;
        for (int gi = 0; gi < 16; ++gi) {
            // decay from none up to ~e^-8 over the span
            const double g = gi == 0 ? 0.0 : 8.0 / span * std::pow(2.0, gi - 15);
            for (Eigen::Index i = 0; i < k.size(); ++i) {
                const double th = kTwoPi * f * k(i), e = std::exp(-g * k(i));
                basis(i, 0) = std::cos(th) * e;
                basis(i, 1) = -std::sin(th) * e;
                basis(i, 2) = 1.0;
            }
            Eigen::Vector3d lin = basis.colPivHouseholderQr().solve(y);
            const double cost = (y - basis * lin).squaredNorm();
            if (cost < best.cost) {
                best.cost = cost;
                best.p << lin(0), lin(1), lin(2), f, g;
            }
        }
    }
    return best;
}

RamseyFit to_fit(const Params& p, double cost) {
    RamseyFit fit;
    double a = p(0), b = p(1), f = p(3);
    if (f < 0) {
        f = -f;
        b = -b;
    }
    fit.frequency = f;
    fit.amplitude = std::hypot(a, b);
    fit.phase = std::atan2(b, a);
    fit.offset = p(2);
    fit.decay = p(4);
    fit.residual = std::sqrt(cost);
    return fit;
}

} // namespace

double RamseyFit::operator()(double k) const {
    return amplitude * std::cos(kTwoPi * frequency * k + phase) * std::exp(-decay * k) + offset;
}

RamseyFit fit_damped_cosine(const std::vector<double>& ks, const std::vector<double>& ys) {
    if (ks.size() != ys.size())
        throw Error("fit: k and y series differ in length");
    if (ks.size() < 8)
        throw Error("fit: need at least 8 points");
    const auto n = static_cast<Eigen::Index>(ks.size());
    const Eigen::VectorXd k = Eigen::Map<const Eigen::VectorXd>(ks.data(), n);
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(ys.data(), n);
    for (Eigen::Index i = 0; i < n; ++i)
        if (!std::isfinite(k(i)) || !std::isfinite(y(i)))
            throw Error("fit: series contains non-finite values");

    const double mean = y.mean();
    if ((y.array() - mean).abs().maxCoeff() <= 1e-12 * std::max(1.0, std::abs(mean))) {
        RamseyFit flat;
        flat.offset = mean;
        flat.converged = true;
        return flat;
    }

    const GridBest grid = grid_search(k, y);
    Params p = grid.p;
    double cost = residuals(p, k, y).squaredNorm();
    const double floor = 1e-28 * y.squaredNorm();

    double lambda = 1e-3;
    bool converged = false;
    std::size_t it = 0;
    for (; it < 200 && !converged; ++it) {
        if (cost <= floor) {
            converged = true;
            break;
        }
        const Eigen::MatrixXd j = jacobian(p, k);
        const Eigen::VectorXd r = residuals(p, k, y);
        const Eigen::Matrix<double, 5, 5> jtj = j.transpose() * j;
        const Params g = j.transpose() * r;
        bool stepped = false;
        while (lambda < 1e16) {
            // Marquardt scaling by diag(J^T J) keeps the step scale-equivariant
            Eigen::Matrix<double, 5, 5> a = jtj;
            a.diagonal() += lambda * jtj.diagonal();
            const Params delta = a.ldlt().solve(g);
            const Params trial = p + delta;
            const double trial_cost = residuals(trial, k, y).squaredNorm();
            if (std::isfinite(trial_cost) && trial_cost < cost) {
                const double gain = (cost - trial_cost) / cost;
                p = trial;
                cost = trial_cost;
                lambda = std::max(lambda / 10.0, 1e-12);
                stepped = true;
                if (gain < 1e-12)
                    converged = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!stepped)
            converged = true; // no descent direction left: at a minimum
    }

    RamseyFit fit;
    if (!converged || !std::isfinite(cost) || cost > grid.cost) {
        fit = to_fit(grid.p, grid.cost);
        fit.converged = false;
        p = grid.p;
        cost = grid.cost;
    } else {
        fit = to_fit(p, cost);
        fit.converged = true;
    }
    fit.iterations = it;

    if (n > 5) {
        const Eigen::MatrixXd j = jacobian(p, k);
        const Eigen::Matrix<double, 5, 5> jtj = j.transpose() * j;
        Eigen::FullPivLU<Eigen::Matrix<double, 5, 5>> lu(jtj);
        if (lu.isInvertible()) {
            const double s2 = cost / static_cast<double>(n - 5);
            fit.frequency_stderr = std::sqrt(std::max(0.0, s2 * lu.inverse()(3, 3)));
        }
    }
    return fit;
}

} // namespace ddweaver
