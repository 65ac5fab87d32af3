#pragma once

#include "ddweaver/dd_pass.hpp"
#include "ddweaver/fit.hpp"
#include "ddweaver/noise_sim.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ddweaver {

enum class Experiment { Motivational, CnotDelay, Swap, SwapDelay, Ramsey };

inline constexpr Experiment kAllExperiments[] = {Experiment::Motivational, Experiment::CnotDelay, Experiment::Swap,
                                                 Experiment::SwapDelay, Experiment::Ramsey};

/// motivational, cnot-delay, swap, swap-delay, ramsey
[[nodiscard]] std::string_view experiment_name(Experiment e) noexcept;
[[nodiscard]] std::optional<Experiment> parse_experiment(std::string_view name) noexcept;

/// Strategies each sweep compares by default.
[[nodiscard]] std::vector<Strategy> default_strategies(Experiment e);

/// "a:b:s" (inclusive) or "a:b" with step 1. Throws ParseError.
[[nodiscard]] std::vector<std::size_t> parse_ks(std::string_view text);

/// q0 -> Q0 with spectators on Q1,Q2 (adjacent) and on Q4,Q5 (distant).
[[nodiscard]] Mapping crosstalk_mapping();
[[nodiscard]] Mapping idle_idle_mapping();

/**
 * The three-qubit template of an experiment, with the repeated block between
 * two barriers. q0 is the main qubit; q1, q2 are spectators. Delays in the
 * block last as long as one CNOT on the spectator edge (`cx_ns`).
 */
[[nodiscard]] Circuit experiment_template(Experiment e, Nanoseconds cx_ns);

/// Template repeated k times, SWAPs decomposed into CNOTs.
[[nodiscard]] Circuit experiment_circuit(Experiment e, std::size_t k, const DeviceModel& device,
                                         const Mapping& mapping);

struct ExperimentSetup {
    DeviceModel device;
    Mapping mapping;
    std::vector<std::size_t> ks{10, 20, 30, 40, 50};
    SimConfig config;
    DDOptions dd;
};

/// One strategy's p0(k) series.
struct SweepResult {
    std::string experiment;
    Strategy strategy = Strategy::Baseline;
    std::vector<std::size_t> ks;
    std::vector<double> p0;
    std::vector<double> std_error;
    // metadata
    std::string device;
    Mapping mapping;
    NoiseToggles toggles;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    InvariantStats invariants;

    [[nodiscard]] double mean_p0() const;
    bool operator==(const SweepResult& o) const;
};

/// Schedules, fills and simulates one strategy over every k.
[[nodiscard]] SweepResult run_series(Experiment e, Strategy strategy, const ExperimentSetup& setup);

/// run_series for every strategy, in the given order. Ramsey is not a sweep; use ramsey_suite.
[[nodiscard]] std::vector<SweepResult> run_sweep(Experiment e, const ExperimentSetup& setup,
                                                 const std::vector<Strategy>& strategies);
[[nodiscard]] std::vector<SweepResult> run_sweep(Experiment e, const ExperimentSetup& setup);

struct RamseySetup {
    DeviceModel device;
    std::size_t main = 6;
    std::array<std::size_t, 2> spectators{5, 4};
    std::vector<std::size_t> ks = default_ks();
    double phase_step = 2.0 * 3.14159265358979323846 * 0.08;
    SimConfig config;

    static std::vector<std::size_t> default_ks();
};

/**
 * Ramsey circuit on logical qubits: q0 main, q1/q2 spectators. Variants
 * 1..4 are: q1 in |0>, q1 in |1>, q1 in |0> with CNOT(q1,q2) during the
 * delay, q1 in |1> with the CNOT. Variants 1 and 2 use two qubits only.
 */
[[nodiscard]] Circuit ramsey_circuit(int variant, std::size_t k, double phase_step, Nanoseconds delay_ns);

struct RamseyReport {
    std::array<SweepResult, 4> series;
    std::array<RamseyFit, 4> fits;
    std::array<double, 4> frequency_khz{};
    std::array<double, 4> frequency_stderr_khz{};
    /// Wall time of one repeated block.
    double rep_ns = 0.0;
    /// |f2 - f1|: ZZ shift from a neighbour in |1>.
    double zz_shift_khz = 0.0;
    /// |f3 - f1|: Stark shift from a CNOT on an adjacent pair.
    double cr_shift_khz = 0.0;
};

[[nodiscard]] RamseyReport ramsey_suite(const RamseySetup& setup);

} // namespace ddweaver
