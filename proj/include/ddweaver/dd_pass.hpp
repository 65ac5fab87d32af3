#pragma once

#include "ddweaver/idle_analysis.hpp"
#include "ddweaver/schedule.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ddweaver {

enum class Strategy {
    Baseline,         ///< leave the window free
    SingleDD,         ///< one CPMG over the whole window
    ProtectGateOnly,  ///< CPMG over gate spans, free spans untouched
    ProtectDelayOnly, ///< CPMG over free spans, gate spans untouched
    PerSegmentDD,     ///< independent CPMG per segment
    PerCnotDD,        ///< independent CPMG per CNOT inside gate spans
};

inline constexpr Strategy kAllStrategies[] = {Strategy::Baseline,         Strategy::SingleDD,
                                              Strategy::ProtectGateOnly,  Strategy::ProtectDelayOnly,
                                              Strategy::PerSegmentDD,     Strategy::PerCnotDD};

/// Machine name used in files and flags: baseline, single, protect_gate, ...
[[nodiscard]] std::string_view strategy_name(Strategy s) noexcept;
/// Plot label: Baseline, DD, DD_Delay, Delay_DD, DD_DD, DD*3.
[[nodiscard]] std::string_view strategy_label(Strategy s) noexcept;
[[nodiscard]] std::optional<Strategy> parse_strategy(std::string_view name) noexcept;

enum class PulseSpacing {
    Symmetric,   ///< free time split 1:2:1 around the pulses
    EdgeAligned, ///< pulses flush with the window edges
};

struct DDOptions {
    PulseSpacing spacing = PulseSpacing::Symmetric;
    /// Number of X-X cycles per fill.
    std::size_t repetitions = 1;
};

/// CPMG pulse layout relative to the start of the filled interval.
struct DDSequence {
    std::vector<Nanoseconds> offsets;
    Nanoseconds pulse = 0;
    Nanoseconds total = 0;

    /// Free gaps before, between and after the pulses.
    [[nodiscard]] std::vector<Nanoseconds> gaps() const;
};

/**
 * Places 2 * repetitions X pulses of width `pulse` in `duration`. Integer
 * rounding leftovers go to the trailing gap. Throws WindowTooShort when the
 * pulses do not fit.
 */
[[nodiscard]] DDSequence cpmg_fill(Nanoseconds duration, Nanoseconds pulse, const DDOptions& options = {});

/// Throws InapplicableStrategy with the reason when `strategy` does not fit the segment shape.
void check_applicable(Strategy strategy, const WindowSegments& segments);
[[nodiscard]] bool is_applicable(Strategy strategy, const WindowSegments& segments);

/**
 * Fills `window` per `strategy` with dd-pulse X gates and dd-delay padding.
 * Sub-intervals too short for a sequence are skipped and reported through
 * `warnings`. Start times of existing instructions and the makespan are
 * unchanged.
 */
[[nodiscard]] Schedule insert_dd(const Schedule& schedule, const IdleWindow& window, Strategy strategy,
                                 const DDOptions& options = {}, std::vector<std::string>* warnings = nullptr);

enum class ClassPattern { Any, Crosstalk, Idle };
enum class ShapePattern { Any, Multi, GateOnly, FreeOnly };

struct PolicyRule {
    ClassPattern cls = ClassPattern::Any;
    ShapePattern shape = ShapePattern::Any;
    Strategy strategy = Strategy::SingleDD;
};

/// First matching rule wins. Parsed policies are checked to be total.
struct Policy {
    std::vector<PolicyRule> rules;

    /// crosstalk multi -> per_segment; crosstalk gate_only -> single; idle * -> single
    [[nodiscard]] static Policy guidelines();

    [[nodiscard]] std::optional<Strategy> choose(IdleClass cls, const WindowSegments& segments) const;
};

[[nodiscard]] Policy parse_policy(std::string_view text);
[[nodiscard]] std::string render_policy(const Policy& policy);

struct WindowDecision {
    CrosstalkEntry analysis;
    Strategy strategy = Strategy::Baseline;
    std::size_t pulses = 0;
    std::vector<std::string> warnings;
};

struct PassResult {
    Schedule schedule;
    std::vector<WindowDecision> decisions;
};

/// Qubits the pass targets: the main qubit when set, else every active qubit.
[[nodiscard]] std::vector<std::size_t> dd_targets(const Schedule& schedule);

/// Classifies, segments and fills every target window per the policy.
/// Inapplicable choices fall back to SingleDD with a warning.
[[nodiscard]] PassResult apply_policy(const Schedule& schedule, const Policy& policy, const DDOptions& options = {});

/**
 * Applies one strategy to every target window. With `strict` an
 * inapplicable window throws; otherwise it is left untouched with a warning.
 */
[[nodiscard]] PassResult apply_strategy(const Schedule& schedule, Strategy strategy, bool strict,
                                        const DDOptions& options = {});

/// window report: qubit,start_ns,end_ns,class,segments,strategy,pulses,warnings
[[nodiscard]] std::string decisions_csv(const std::vector<WindowDecision>& decisions);

/**
 * Writes the inserted DD instructions back into `original` (logical
 * indices), each placed just before the next instruction on its qubit, so
 * that rescheduling reproduces the filled schedule. Regions that start after
 * the qubit frees up get a dd-delay pad in front.
 */
[[nodiscard]] Circuit to_circuit(const Schedule& filled, const Circuit& original);

} // namespace ddweaver
