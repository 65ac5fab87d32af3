#pragma once

#include "ddweaver/schedule.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ddweaver {

enum class IdleClass { CrosstalkIdle, IdleIdle };

[[nodiscard]] std::string_view idle_class_name(IdleClass c) noexcept;

/// Two-qubit gate time inside a window, with the gates it covers.
struct GateSpan {
    std::vector<TimedInstruction> gates;
};

struct Segment {
    Nanoseconds start = 0;
    Nanoseconds end = 0;
    std::optional<GateSpan> gate_span; ///< empty for a free span

    [[nodiscard]] Nanoseconds length() const noexcept { return end - start; }
    [[nodiscard]] bool is_gate() const noexcept { return gate_span.has_value(); }
};

struct WindowSegments {
    std::vector<Segment> segments;

    [[nodiscard]] std::size_t gate_count() const noexcept;
    [[nodiscard]] std::size_t free_count() const noexcept;
    /// Compact form, e.g. "gate:300;free:300".
    [[nodiscard]] std::string describe() const;
};

/// CrosstalkIdle iff a concurrent two-qubit gate has an operand adjacent to
/// the idle qubit. Single-qubit gates and delays are ignored.
[[nodiscard]] IdleClass classify_window(const IdleWindow& window, const DeviceModel& device);

/**
 * Partitions the window into maximal gate spans (union of concurrent
 * two-qubit gates; spans separated by less than one pulse width are merged)
 * and the free spans between them.
 */
[[nodiscard]] WindowSegments segment_window(const IdleWindow& window, const DeviceModel& device);

struct CrosstalkEntry {
    IdleWindow window;
    IdleClass cls = IdleClass::IdleIdle;
    WindowSegments segments;
    std::vector<Edge> offending_edges;
    /// Hop distance from the idle qubit to the nearest operand of each
    /// concurrent two-qubit gate, in window order.
    std::vector<std::optional<std::size_t>> distances;
};

using CrosstalkReport = std::vector<CrosstalkEntry>;

[[nodiscard]] CrosstalkEntry analyze_window(const IdleWindow& window, const DeviceModel& device);

/// Analyzes every window of `qubits` in the schedule.
[[nodiscard]] CrosstalkReport crosstalk_report(const Schedule& schedule, const std::vector<std::size_t>& qubits);

/// qubit,start_ns,end_ns,class,segments
[[nodiscard]] std::string crosstalk_csv(const CrosstalkReport& report);

} // namespace ddweaver
