#pragma once

#include "ddweaver/circuit.hpp"
#include "ddweaver/device.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace ddweaver {

/// An instruction on physical qubits, placed in time.
struct TimedInstruction {
    Instruction instruction;
    Nanoseconds start = 0;
    Nanoseconds duration = 0;
    /// Index of the originating circuit instruction; empty for inserted DD.
    std::optional<std::size_t> source;

    [[nodiscard]] Nanoseconds end() const noexcept { return start + duration; }
    [[nodiscard]] bool overlaps(Nanoseconds from, Nanoseconds to) const noexcept {
        return duration > 0 && start < to && end() > from;
    }

    bool operator==(const TimedInstruction&) const = default;
};

struct Schedule {
    DeviceModel device;
    Mapping mapping;
    /// Sorted by start; ties keep circuit order, inserted DD after originals.
    std::vector<TimedInstruction> instructions;
    Nanoseconds makespan = 0;
    std::optional<std::size_t> main_qubit;
    /// Physical qubits the circuit occupies, ascending.
    std::vector<std::size_t> active_qubits;
};

struct IdleWindow {
    std::size_t qubit = 0;
    Nanoseconds start = 0;
    Nanoseconds end = 0;
    /// Instructions with non-zero duration on other qubits overlapping [start, end).
    std::vector<TimedInstruction> concurrent;

    [[nodiscard]] Nanoseconds length() const noexcept { return end - start; }
};

/// Duration the device assigns to an instruction. Phase and Barrier are
/// virtual (0 ns); DD-tagged X pulses use the pulse width.
[[nodiscard]] Nanoseconds instruction_duration(const Instruction& inst, const DeviceModel& device);

/**
 * As-soon-as-possible schedule. Barriers synchronise their qubits and
 * measurements are deferred to the end of the circuit. Throws
 * UnroutedGateError for a two-qubit gate on an uncoupled pair.
 */
[[nodiscard]] Schedule schedule_asap(const Circuit& circuit, const DeviceModel& device, const Mapping& mapping);

/// Restores the ordering invariant after instructions were appended.
void sort_schedule(Schedule& schedule);

/**
 * Maximal gaps on `qubit` from time 0 to its measurement (or the makespan),
 * excluding the measurement itself. Zero-duration instructions split
 * windows. Empty for qubits the circuit does not use.
 */
[[nodiscard]] std::vector<IdleWindow> idle_windows(const Schedule& schedule, std::size_t qubit);

/// CSV dump: qubit,start_ns,duration_ns,gate,qubits,tag (one row per qubit touched).
[[nodiscard]] std::string schedule_csv(const Schedule& schedule);

} // namespace ddweaver
