#pragma once

#include "ddweaver/circuit.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ddweaver {

/// Undirected coupling between two physical qubits, stored with a < b.
struct Edge {
    std::size_t a = 0;
    std::size_t b = 0;

    Edge() = default;
    Edge(std::size_t p, std::size_t q) : a(p < q ? p : q), b(p < q ? q : p) {}

    auto operator<=>(const Edge&) const = default;
};

/**
 * Hardware description. Units: durations in ns, T1/T2 in microseconds,
 * frequencies (ZZ, Stark shifts, quasi-static spread) in kHz.
 *
 * `zz` is the shift of a qubit's transition frequency when a coupled
 * neighbour is in |1> rather than |0>. `cr_shift` is the Stark shift seen by
 * a spectator adjacent to a running CNOT. `pulse_cr_shift` is the detuning a
 * finite-width DD pulse sees under the same condition, and is what makes
 * pulses that straddle a CNOT boundary imperfect.
 */
struct DeviceModel {
    std::string name = "custom";
    std::size_t n_qubits = 0;
    std::vector<Edge> edges;
    Nanoseconds dur_1q = 35;
    Nanoseconds dur_measure = 700;
    Nanoseconds pulse = 35;
    std::map<Edge, Nanoseconds> dur_cx;
    std::vector<double> t1_us;
    std::vector<double> t2_us;
    std::map<Edge, double> zz_khz;
    double cr_shift_khz = 14.2;
    double pulse_cr_shift_khz = 80.0;
    double sigma_qs_khz = 10.0;

    [[nodiscard]] bool has_edge(std::size_t p, std::size_t q) const;
    [[nodiscard]] std::vector<std::size_t> neighbors(std::size_t q) const;
    /// Throws UnroutedGateError when (p,q) is not an edge.
    [[nodiscard]] Nanoseconds cx_duration(std::size_t p, std::size_t q) const;
    [[nodiscard]] double zz(std::size_t p, std::size_t q) const;

    /// Throws InvariantError naming the offending field.
    void validate() const;

    bool operator==(const DeviceModel&) const = default;
};

/// Default values used by the Lagos preset and by device files that omit them.
struct DeviceDefaults {
    static constexpr Nanoseconds dur_cx = 300;
    static constexpr double t1_us = 200.0;
    static constexpr double t2_us = 80.0;
    static constexpr double zz_khz = 14.6;
};

/// Seven-qubit heavy-hex fragment: 0-1, 1-2, 1-3, 3-5, 4-5, 5-6.
[[nodiscard]] DeviceModel preset_lagos();

[[nodiscard]] DeviceModel load_device(std::string_view text);
[[nodiscard]] std::string render_device(const DeviceModel& device);

/// Resolves "lagos" to the preset, anything else is read as a device file.
[[nodiscard]] DeviceModel device_from_spec(const std::string& preset_or_path);

/// Hop count on the coupling graph; nullopt when unreachable.
[[nodiscard]] std::optional<std::size_t> distance(const DeviceModel& device, std::size_t a, std::size_t b);

/// Logical-to-physical qubit assignment.
struct Mapping {
    std::vector<std::size_t> physical;

    [[nodiscard]] static Mapping identity(std::size_t n);
    /// Parses "0,1,2".
    [[nodiscard]] static Mapping parse(std::string_view text);

    [[nodiscard]] std::size_t operator()(std::size_t logical) const { return physical.at(logical); }
    [[nodiscard]] std::optional<std::size_t> logical_of(std::size_t phys) const;
    [[nodiscard]] std::size_t size() const noexcept { return physical.size(); }

    void validate(const DeviceModel& device) const;

    bool operator==(const Mapping&) const = default;
};

} // namespace ddweaver
