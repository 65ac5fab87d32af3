#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ddweaver {

/// All durations in the IR are integer nanoseconds.
using Nanoseconds = std::int64_t;

enum class GateKind { H, X, Phase, CNOT, SWAP, Delay, Barrier, Measure };

[[nodiscard]] std::string_view gate_name(GateKind kind) noexcept;

/// True for CNOT and SWAP.
[[nodiscard]] constexpr bool is_two_qubit(GateKind kind) noexcept {
    return kind == GateKind::CNOT || kind == GateKind::SWAP;
}

inline constexpr std::string_view kDDPulseTag = "dd-pulse";
inline constexpr std::string_view kDDDelayTag = "dd-delay";

/**
 * One gate application. `angle` is meaningful for Phase only and `delay` for
 * Delay only; both stay zero otherwise so that defaulted equality is
 * structural. An empty `qubits` list on a Barrier means "every qubit".
 */
struct Instruction {
    GateKind kind = GateKind::Barrier;
    std::vector<std::size_t> qubits;
    double angle = 0.0;
    Nanoseconds delay = 0;
    std::string tag;

    static Instruction h(std::size_t q, std::string tag = {});
    static Instruction x(std::size_t q, std::string tag = {});
    static Instruction phase(double radians, std::size_t q, std::string tag = {});
    static Instruction cx(std::size_t control, std::size_t target, std::string tag = {});
    static Instruction swap(std::size_t a, std::size_t b, std::string tag = {});
    static Instruction delay_for(Nanoseconds ns, std::size_t q, std::string tag = {});
    static Instruction barrier(std::vector<std::size_t> qubits = {});
    static Instruction measure(std::size_t q);

    [[nodiscard]] bool is_dd() const noexcept { return tag == kDDPulseTag || tag == kDDDelayTag; }
    [[nodiscard]] bool acts_on(std::size_t q) const noexcept;

    bool operator==(const Instruction&) const = default;
};

struct Circuit {
    std::size_t n_qubits = 0;
    std::vector<Instruction> instructions;
    std::optional<std::size_t> main_qubit;

    /// Throws InvariantError on arity, range, duplicate-qubit or
    /// double-measure violations.
    void validate() const;

    bool operator==(const Circuit&) const = default;
};

/// Parses the line-oriented circuit text format. Throws ParseError carrying
/// the offending line number.
[[nodiscard]] Circuit parse_circuit(std::string_view text);

/// Inverse of parse_circuit. The main qubit is not part of the text format.
[[nodiscard]] std::string render_circuit(const Circuit& circuit);

/**
 * Replicates the single barrier-delimited region `k` times in place. Copies
 * are separated by a copy of the closing barrier, so the result contains
 * k + 1 barriers.
 */
[[nodiscard]] Circuit repeat_segment(const Circuit& circuit, std::size_t k);

/// Replaces every SWAP(a,b) by CNOT(a,b) CNOT(b,a) CNOT(a,b).
[[nodiscard]] Circuit decompose_swap(const Circuit& circuit);

} // namespace ddweaver
