#pragma once

#include "ddweaver/schedule.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ddweaver {

/// Which physical effects the simulator applies.
struct NoiseToggles {
    bool t1 = true;
    bool t2 = true;
    bool zz = true;
    bool cr_shift = true;
    bool quasi_static = true;
    /// Off: DD pulses are instantaneous ideal X at the pulse midpoint.
    bool finite_pulse = true;

    static NoiseToggles all() { return {}; }
    static NoiseToggles none() { return {false, false, false, false, false, false}; }

    bool operator==(const NoiseToggles&) const = default;
};

/**
 * Comma-separated list applied left to right: "all", "none", a toggle name
 * to enable it, "-name" to disable it. Names: t1, t2, zz, cr_shift,
 * quasi_static, finite_pulse. An empty string means "all".
 */
[[nodiscard]] NoiseToggles parse_toggles(std::string_view text);
[[nodiscard]] std::string render_toggles(const NoiseToggles& t);

struct SimConfig {
    std::size_t samples = 1000;
    std::uint64_t seed = 1;
    NoiseToggles toggles;
    std::optional<std::size_t> shots;
    /// Check trace, Hermiticity and positivity after every channel.
    bool check_invariants = false;
    /// Worker cap; 0 means DD_WEAVER_THREADS or the hardware count.
    std::size_t threads = 0;
    /// Fixed detuning per physical qubit, applied regardless of toggles.
    std::map<std::size_t, double> static_detuning_khz;
};

struct InvariantStats {
    std::size_t checks = 0;
    double max_trace_error = 0.0;
    double max_hermiticity_error = 0.0;
    double min_eigenvalue = 1.0;
    double max_kraus_error = 0.0;

    void merge(const InvariantStats& other);
};

struct ShotCounts {
    std::size_t zeros = 0;
    std::size_t shots = 0;
};

struct SimResult {
    double p0 = 0.0;
    /// Standard error of p0 over the quasi-static samples.
    double std_error = 0.0;
    std::vector<double> per_sample;
    std::optional<ShotCounts> counts;
    InvariantStats invariants;
};

/// Worker count honouring DD_WEAVER_THREADS; never 0.
[[nodiscard]] std::size_t worker_threads(std::size_t requested = 0);

[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x) noexcept;

/**
 * Evolves |0...0> through the schedule once per quasi-static sample and
 * returns the mean probability of reading 0 on the main qubit at its
 * measurement. Gates act ideally at their start time. Every interval
 * between events runs half of the decoherence, then pulses and the ZZ,
 * quasi-static and Stark phases, then the other half; a qubit under a
 * finite pulse decays and is driven together. Throws
 * SimulationError for more than 5 active qubits, a missing main qubit or
 * overlapping instructions.
 */
[[nodiscard]] SimResult simulate(const Schedule& schedule, const SimConfig& config);

/// Binomial readout of result.p0; deterministic in `seed`.
[[nodiscard]] ShotCounts sample_shots(const SimResult& result, std::size_t shots, std::uint64_t seed);

} // namespace ddweaver
