#pragma once

#include <cstddef>
#include <vector>

namespace ddweaver {

/// y(k) = amplitude * cos(2 pi frequency k + phase) * exp(-decay k) + offset
struct RamseyFit {
    double frequency = 0.0; ///< cycles per repetition, >= 0
    double frequency_stderr = 0.0;
    double decay = 0.0; ///< per repetition
    double amplitude = 0.0;
    double phase = 0.0;
    double offset = 0.0;
    double residual = 0.0; ///< root of the residual sum of squares
    bool converged = false;
    std::size_t iterations = 0;

    [[nodiscard]] double operator()(double k) const;
};

/**
 * Least-squares damped-cosine fit. A grid over (frequency, decay) with the
 * linear parameters solved exactly seeds a Levenberg-Marquardt refinement.
 * If the refinement does not converge the grid optimum is returned with
 * `converged == false`. Needs at least 8 points.
 */
[[nodiscard]] RamseyFit fit_damped_cosine(const std::vector<double>& k, const std::vector<double>& y);

/// Cycles per repetition to kHz for a repetition lasting `rep_ns`.
[[nodiscard]] constexpr double cycles_to_khz(double cycles_per_rep, double rep_ns) noexcept {
    return cycles_per_rep / rep_ns * 1e6;
}

} // namespace ddweaver
