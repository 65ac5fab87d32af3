#include "ddweaver/error.hpp"
#include "ddweaver/fit.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace ddweaver;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> ks(std::size_t n = 50) {
    std::vector<double> out;
    for (std::size_t k = 1; k <= n; ++k)
        out.push_back(static_cast<double>(k));
    return out;
}

std::vector<double> damped(const std::vector<double>& k, double a, double f, double tau, double b, double phase = 0) {
    std::vector<double> y;
    for (double x : k)
        y.push_back(b + a * std::cos(2 * kPi * f * x + phase) * std::exp(-x / tau));
    return y;
}

} // namespace

TEST(Fit, NoiselessSynthetic) {
    auto k = ks();
    auto fit = fit_damped_cosine(k, damped(k, 0.4, 0.1, 40.0, 0.5));
    EXPECT_TRUE(fit.converged);
    EXPECT_NEAR(fit.frequency, 0.1, 1e-3);
    EXPECT_NEAR(fit.frequency, 0.1, 1e-9);
    EXPECT_NEAR(fit.decay, 1.0 / 40.0, 1e-9);
    EXPECT_NEAR(std::abs(fit.amplitude), 0.4, 1e-9);
    EXPECT_NEAR(fit.offset, 0.5, 1e-9);
    EXPECT_LT(fit.residual, 1e-9);
    EXPECT_NEAR(fit(7.0), damped({7.0}, 0.4, 0.1, 40.0, 0.5)[0], 1e-9);
}

TEST(Fit, PhaseAndLowFrequency) {
    auto k = ks();
    for (double f : {0.013, 0.0427, 0.2, 0.31, 0.47})
        for (double phase : {0.0, 1.0, -2.5}) {
            auto fit = fit_damped_cosine(k, damped(k, 0.3, f, 60.0, 0.6, phase));
            EXPECT_NEAR(fit.frequency, f, 1e-6) << f << " " << phase;
            EXPECT_GE(fit.frequency, 0.0);
        }
}

TEST(Fit, ConstantSeries) {
    auto k = ks();
    std::vector<double> y(k.size(), 0.73);
    auto fit = fit_damped_cosine(k, y);
    EXPECT_DOUBLE_EQ(fit.frequency, 0.0);
    EXPECT_NEAR(fit.amplitude, 0.0, 1e-12);
    EXPECT_NEAR(fit.offset, 0.73, 1e-12);
    EXPECT_TRUE(std::isfinite(fit.residual));
}

TEST(Fit, NoisyTrials) {
    auto k = ks();
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> noise(0.0, 0.01);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        auto y = damped(k, 0.4, 0.1, 40.0, 0.5);
        for (auto& v : y)
            v += noise(rng);
        auto fit = fit_damped_cosine(k, y);
        worst = std::max(worst, std::abs(fit.frequency - 0.1));
        EXPECT_TRUE(std::isfinite(fit.residual));
        EXPECT_GT(fit.frequency_stderr, 0.0);
    }
    EXPECT_LE(worst, 2e-3);
}

TEST(Fit, ScaleEquivariance) {
    auto k = ks();
    auto y = damped(k, 0.35, 0.137, 25.0, 0.55, 0.4);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> noise(0.0, 0.005);
    for (auto& v : y)
        v += noise(rng);
    auto base = fit_damped_cosine(k, y);
    for (double s : {0.01, 0.5, 3.0, 1000.0}) {
        std::vector<double> ys;
        for (double v : y)
            ys.push_back(s * v);
        auto fit = fit_damped_cosine(k, ys);
        EXPECT_NEAR(fit.frequency, base.frequency, 1e-9) << s;
        EXPECT_NEAR(fit.amplitude, s * base.amplitude, 1e-7 * std::max(1.0, s)) << s;
        EXPECT_NEAR(fit.offset, s * base.offset, 1e-7 * std::max(1.0, s)) << s;
    }
}

TEST(Fit, Errors) {
    EXPECT_THROW((void)fit_damped_cosine(ks(7), std::vector<double>(7, 0.5)), Error);
    EXPECT_THROW((void)fit_damped_cosine(ks(10), std::vector<double>(9, 0.5)), Error);
    auto y = std::vector<double>(10, 0.5);
    y[3] = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW((void)fit_damped_cosine(ks(10), y), Error);
}

TEST(Fit, CyclesToKhz) {
    EXPECT_DOUBLE_EQ(cycles_to_khz(0.0, 300.0), 0.0);
    // 14.6 kHz over a 300 ns repetition is 4.38e-3 cycles
    EXPECT_NEAR(cycles_to_khz(4.38e-3, 300.0), 14.6, 1e-12);
}
