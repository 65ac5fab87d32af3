#include "ddweaver/dd_pass.hpp"

#include "ddweaver/error.hpp"
#include "text_util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>

namespace ddweaver {

std::string_view strategy_name(Strategy s) noexcept {
    switch (s) {
    case Strategy::Baseline: return "baseline";
    case Strategy::SingleDD: return "single";
    case Strategy::ProtectGateOnly: return "protect_gate";
    case Strategy::ProtectDelayOnly: return "protect_delay";
    case Strategy::PerSegmentDD: return "per_segment";
    case Strategy::PerCnotDD: return "per_cnot";
    }
    return "?";
}

std::string_view strategy_label(Strategy s) noexcept {
    switch (s) {
    case Strategy::Baseline: return "Baseline";
    case Strategy::SingleDD: return "DD";
    case Strategy::ProtectGateOnly: return "DD_Delay";
    case Strategy::ProtectDelayOnly: return "Delay_DD";
    case Strategy::PerSegmentDD: return "DD_DD";
    case Strategy::PerCnotDD: return "DD*3";
    }
    return "?";
}

std::optional<Strategy> parse_strategy(std::string_view name) noexcept {
    for (auto s : kAllStrategies)
        if (strategy_name(s) == name)
            return s;
    return std::nullopt;
}

std::vector<Nanoseconds> DDSequence::gaps() const {
    std::vector<Nanoseconds> out;
    Nanoseconds cursor = 0;
    for (auto off : offsets) {
        out.push_back(off - cursor);
        cursor = off + pulse;
    }
    out.push_back(total - cursor);
    return out;
}

DDSequence cpmg_fill(Nanoseconds duration, Nanoseconds pulse, const DDOptions& options) {
    if (options.repetitions == 0)
        throw InvariantError("DD repetitions must be positive");
    const auto n = static_cast<Nanoseconds>(2 * options.repetitions);
    if (pulse < 0 || duration < n * pulse) {
        throw WindowTooShort(
            fmt::format("window of {} ns cannot hold {} pulses of {} ns", duration, n, pulse));
    }
    const Nanoseconds free = duration - n * pulse;

    std::vector<Nanoseconds> gaps;
    if (options.spacing == PulseSpacing::Symmetric) {
        // tau/2, tau, ..., tau, tau/2
        gaps.push_back(free / (2 * n));
        for (Nanoseconds i = 1; i < n; ++i)
            gaps.push_back(free / n);
    } else {
        gaps.push_back(0);
        for (Nanoseconds i = 1; i < n; ++i)
            gaps.push_back(free / (n - 1));
    }
    Nanoseconds used = 0;
    for (auto g : gaps)
        used += g;
    gaps.push_back(free - used);

    DDSequence seq{{}, pulse, duration};
    Nanoseconds cursor = 0;
    for (Nanoseconds i = 0; i < n; ++i) {
        cursor += gaps[static_cast<std::size_t>(i)];
        seq.offsets.push_back(cursor);
        cursor += pulse;
    }
    return seq;
}

namespace {

std::size_t cnot_count(const TimedInstruction& ti) {
    return ti.instruction.kind == GateKind::SWAP ? 3 : 1;
}

std::size_t cnot_count(const Segment& seg) {
    std::size_t n = 0;
    if (seg.gate_span)
        for (const auto& g : seg.gate_span->gates)
            n += cnot_count(g);
    return n;
}

struct Interval {
    Nanoseconds start;
    Nanoseconds end;
};

/// Splits a gate span at every constituent CNOT boundary inside it.
std::vector<Interval> split_per_cnot(const Segment& seg) {
    std::vector<Nanoseconds> cuts;
    for (const auto& g : seg.gate_span->gates) {
        const auto parts = static_cast<Nanoseconds>(cnot_count(g));
        for (Nanoseconds i = 1; i <= parts; ++i) {
            auto t = g.start + g.duration * i / parts;
            if (t > seg.start && t < seg.end)
                cuts.push_back(t);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<Interval> out;
    Nanoseconds cursor = seg.start;
    for (auto c : cuts) {
        out.push_back({cursor, c});
        cursor = c;
    }
    out.push_back({cursor, seg.end});
    return out;
}

std::vector<Interval> fill_regions(const IdleWindow& window, const WindowSegments& segs, Strategy strategy) {
    std::vector<Interval> out;
    switch (strategy) {
    case Strategy::Baseline:
        break;
    case Strategy::SingleDD:
        out.push_back({window.start, window.end});
        break;
    case Strategy::ProtectGateOnly:
    case Strategy::ProtectDelayOnly:
        for (const auto& s : segs.segments)
            if (s.is_gate() == (strategy == Strategy::ProtectGateOnly))
                out.push_back({s.start, s.end});
        break;
    case Strategy::PerSegmentDD:
        for (const auto& s : segs.segments)
            out.push_back({s.start, s.end});
        break;
    case Strategy::PerCnotDD:
        for (const auto& s : segs.segments)
            if (s.is_gate())
                for (auto iv : split_per_cnot(s))
                    out.push_back(iv);
        break;
    }
    return out;
}

} // namespace

void check_applicable(Strategy strategy, const WindowSegments& segments) {
    switch (strategy) {
    case Strategy::Baseline:
    case Strategy::SingleDD:
        return;
    case Strategy::ProtectGateOnly:
        if (segments.gate_count() == 0)
            throw InapplicableStrategy("protect_gate needs a two-qubit gate span in the window");
        return;
    case Strategy::ProtectDelayOnly:
        if (segments.free_count() == 0)
            throw InapplicableStrategy("protect_delay needs a free span in the window");
        return;
    case Strategy::PerSegmentDD:
        if (segments.segments.size() < 2)
            throw InapplicableStrategy("per_segment needs at least two segments");
        return;
    case Strategy::PerCnotDD:
        for (const auto& s : segments.segments)
            if (cnot_count(s) >= 2)
                return;
        throw InapplicableStrategy("per_cnot needs a gate span of at least two CNOTs");
    }
}

bool is_applicable(Strategy strategy, const WindowSegments& segments) {
    try {
        check_applicable(strategy, segments);
        return true;
    } catch (const InapplicableStrategy&) {
        return false;
    }
}

Schedule insert_dd(const Schedule& schedule, const IdleWindow& window, Strategy strategy, const DDOptions& options,
                   std::vector<std::string>* warnings) {
    if (window.end <= window.start)
        throw InvariantError("empty idle window");
    for (const auto& ti : schedule.instructions) {
        if (ti.instruction.acts_on(window.qubit) && ti.overlaps(window.start, window.end))
            throw InvariantError(fmt::format("window [{}, {}) on Q{} is not idle in this schedule", window.start,
                                             window.end, window.qubit));
    }

    const auto segs = segment_window(window, schedule.device);
    check_applicable(strategy, segs);

    Schedule out = schedule;
    const auto pulse = schedule.device.pulse;
    for (auto region : fill_regions(window, segs, strategy)) {
        DDSequence seq;
        try {
            seq = cpmg_fill(region.end - region.start, pulse, options);
        } catch (const WindowTooShort& e) {
            if (warnings)
                warnings->push_back(fmt::format("Q{} [{}, {}): {}; left free", window.qubit, region.start, region.end,
                                                e.what()));
            continue;
        }
        auto add = [&](Instruction inst, Nanoseconds start, Nanoseconds dur) {
            if (dur <= 0)
                return;
            out.instructions.push_back(TimedInstruction{std::move(inst), start, dur, std::nullopt});
        };
        Nanoseconds cursor = region.start;
        for (auto off : seq.offsets) {
            const auto at = region.start + off;
            add(Instruction::delay_for(at - cursor, window.qubit, std::string(kDDDelayTag)), cursor, at - cursor);
            add(Instruction::x(window.qubit, std::string(kDDPulseTag)), at, pulse);
            cursor = at + pulse;
        }
        add(Instruction::delay_for(region.end - cursor, window.qubit, std::string(kDDDelayTag)), cursor,
            region.end - cursor);
    }
    sort_schedule(out);
    return out;
}

namespace {

bool matches(ClassPattern p, IdleClass c) {
    switch (p) {
    case ClassPattern::Any: return true;
    case ClassPattern::Crosstalk: return c == IdleClass::CrosstalkIdle;
    case ClassPattern::Idle: return c == IdleClass::IdleIdle;
    }
    return false;
}

bool matches(ShapePattern p, const WindowSegments& s) {
    switch (p) {
    case ShapePattern::Any: return true;
    case ShapePattern::Multi: return s.segments.size() >= 2;
    case ShapePattern::GateOnly: return s.segments.size() == 1 && s.segments[0].is_gate();
    case ShapePattern::FreeOnly: return s.segments.size() == 1 && !s.segments[0].is_gate();
    }
    return false;
}

std::string_view class_pattern_name(ClassPattern p) {
    switch (p) {
    case ClassPattern::Any: return "*";
    case ClassPattern::Crosstalk: return "crosstalk";
    case ClassPattern::Idle: return "idle";
    }
    return "?";
}

std::string_view shape_pattern_name(ShapePattern p) {
    switch (p) {
    case ShapePattern::Any: return "*";
    case ShapePattern::Multi: return "multi";
    case ShapePattern::GateOnly: return "gate_only";
    case ShapePattern::FreeOnly: return "free_only";
    }
    return "?";
}

// Representative segment shapes used for the totality check.
WindowSegments shape_example(ShapePattern p) {
    Segment gate{0, 1, GateSpan{}};
    Segment free{1, 2, std::nullopt};
    switch (p) {
    case ShapePattern::Multi: return WindowSegments{{gate, free}};
    case ShapePattern::GateOnly: return WindowSegments{{gate}};
    default: return WindowSegments{{free}};
    }
}

} // namespace

Policy Policy::guidelines() {
    return Policy{{
        {ClassPattern::Crosstalk, ShapePattern::Multi, Strategy::PerSegmentDD},
        {ClassPattern::Crosstalk, ShapePattern::GateOnly, Strategy::SingleDD},
        {ClassPattern::Idle, ShapePattern::Any, Strategy::SingleDD},
    }};
}

std::optional<Strategy> Policy::choose(IdleClass cls, const WindowSegments& segments) const {
    for (const auto& r : rules)
        if (matches(r.cls, cls) && matches(r.shape, segments))
            return r.strategy;
    return std::nullopt;
}

Policy parse_policy(std::string_view text) {
    Policy policy;
    std::size_t line_no = 0;
    for (auto raw : detail::split_lines(text)) {
        ++line_no;
        auto tok = detail::tokenize(detail::strip_comment(raw));
        if (tok.empty())
            continue;
        if (tok.size() != 4 || tok[2] != "->")
            throw ParseError(line_no, "expected '<class> <shape> -> <strategy>'");
        PolicyRule rule;
        if (tok[0] == "crosstalk")
            rule.cls = ClassPattern::Crosstalk;
        else if (tok[0] == "idle")
            rule.cls = ClassPattern::Idle;
        else if (tok[0] != "*")
            throw ParseError(line_no, fmt::format("unknown class '{}' (crosstalk, idle, *)", tok[0]));

        if (tok[1] == "multi")
            rule.shape = ShapePattern::Multi;
        else if (tok[1] == "gate_only")
            rule.shape = ShapePattern::GateOnly;
        else if (tok[1] == "free_only")
            rule.shape = ShapePattern::FreeOnly;
        else if (tok[1] != "*")
            throw ParseError(line_no, fmt::format("unknown shape '{}' (multi, gate_only, free_only, *)", tok[1]));

        auto s = parse_strategy(tok[3]);
        if (!s)
            throw ParseError(line_no, fmt::format("unknown strategy '{}'", tok[3]));
        rule.strategy = *s;
        policy.rules.push_back(rule);
    }

    // every reachable (class, shape) pair must be covered; a crosstalk
    // window always contains a gate span, so crosstalk free_only cannot occur
    const std::pair<IdleClass, ShapePattern> reachable[] = {
        {IdleClass::CrosstalkIdle, ShapePattern::Multi}, {IdleClass::CrosstalkIdle, ShapePattern::GateOnly},
        {IdleClass::IdleIdle, ShapePattern::Multi},      {IdleClass::IdleIdle, ShapePattern::GateOnly},
        {IdleClass::IdleIdle, ShapePattern::FreeOnly},
    };
    for (auto [cls, shape] : reachable) {
        if (!policy.choose(cls, shape_example(shape)))
            throw ParseError(0, fmt::format("policy is not total: no rule for '{} {}'", idle_class_name(cls),
                                            shape_pattern_name(shape)));
    }
    return policy;
}

std::string render_policy(const Policy& policy) {
    std::string out;
    for (const auto& r : policy.rules)
        out += fmt::format("{} {} -> {}\n", class_pattern_name(r.cls), shape_pattern_name(r.shape),
                           strategy_name(r.strategy));
    return out;
}

std::vector<std::size_t> dd_targets(const Schedule& schedule) {
    if (schedule.main_qubit)
        return {*schedule.main_qubit};
    return schedule.active_qubits;
}

namespace {

std::size_t count_pulses(const Schedule& before, const Schedule& after) {
    auto pulses = [](const Schedule& s) {
        return std::count_if(s.instructions.begin(), s.instructions.end(),
                             [](const TimedInstruction& ti) { return ti.instruction.tag == kDDPulseTag; });
    };
    return static_cast<std::size_t>(pulses(after) - pulses(before));
}

template <class Choose>
PassResult run_pass(const Schedule& schedule, const DDOptions& options, Choose&& choose) {
    PassResult result{schedule, {}};
    for (auto q : dd_targets(schedule)) {
        for (const auto& w : idle_windows(schedule, q)) {
            WindowDecision d;
            d.analysis = analyze_window(w, schedule.device);
            auto strategy = choose(d);
            if (!strategy) {
                result.decisions.push_back(std::move(d));
                continue;
            }
            d.strategy = *strategy;
            auto next = insert_dd(result.schedule, w, d.strategy, options, &d.warnings);
            d.pulses = count_pulses(result.schedule, next);
            result.schedule = std::move(next);
            result.decisions.push_back(std::move(d));
        }
    }
    return result;
}

} // namespace

PassResult apply_policy(const Schedule& schedule, const Policy& policy, const DDOptions& options) {
    return run_pass(schedule, options, [&](WindowDecision& d) -> std::optional<Strategy> {
        auto s = policy.choose(d.analysis.cls, d.analysis.segments).value_or(Strategy::SingleDD);
        if (!is_applicable(s, d.analysis.segments)) {
            d.warnings.push_back(fmt::format("{} does not apply to {}; using single", strategy_name(s),
                                             d.analysis.segments.describe()));
            s = Strategy::SingleDD;
        }
        return s;
    });
}

PassResult apply_strategy(const Schedule& schedule, Strategy strategy, bool strict, const DDOptions& options) {
    return run_pass(schedule, options, [&](WindowDecision& d) -> std::optional<Strategy> {
        if (strict) {
            check_applicable(strategy, d.analysis.segments);
            return strategy;
        }
        if (!is_applicable(strategy, d.analysis.segments)) {
            d.warnings.push_back(fmt::format("{} does not apply to {}; window left free", strategy_name(strategy),
                                             d.analysis.segments.describe()));
            d.strategy = Strategy::Baseline;
            return std::nullopt;
        }
        return strategy;
    });
}

std::string decisions_csv(const std::vector<WindowDecision>& decisions) {
    std::string out = "qubit,start_ns,end_ns,class,segments,strategy,pulses,warnings\n";
    for (const auto& d : decisions) {
        std::string warn;
        for (const auto& w : d.warnings)
            warn += (warn.empty() ? "" : " | ") + w;
        std::replace(warn.begin(), warn.end(), ',', ' ');
        const auto& w = d.analysis.window;
        out += fmt::format("{},{},{},{},{},{},{},{}\n", w.qubit, w.start, w.end, idle_class_name(d.analysis.cls),
                           d.analysis.segments.describe(), strategy_name(d.strategy), d.pulses, warn);
    }
    return out;
}

Circuit to_circuit(const Schedule& filled, const Circuit& original) {
    const auto n = original.instructions.size();
    std::map<std::size_t, std::vector<Instruction>> before; // key n means "append"

    for (const auto& dd : filled.instructions) {
        if (dd.source)
            continue;
        const auto phys = dd.instruction.qubits.at(0);
        std::size_t pos = n;
        for (const auto& ti : filled.instructions)
            if (ti.source && ti.instruction.acts_on(phys) && ti.start >= dd.end())
                pos = std::min(pos, *ti.source);
        auto logical = filled.mapping.logical_of(phys);
        if (!logical)
            throw InvariantError(fmt::format("DD instruction on unmapped physical qubit Q{}", phys));
        // a region that does not start where the qubit frees up (e.g. protect_delay
        // after a gate span) needs padding, or rescheduling would pull it earlier
        Nanoseconds prev_end = 0;
        for (const auto& ti : filled.instructions)
            if (&ti != &dd && ti.instruction.acts_on(phys) && ti.instruction.kind != GateKind::Measure &&
                ti.end() <= dd.start)
                prev_end = std::max(prev_end, ti.end());
        if (dd.start > prev_end)
            before[pos].push_back(Instruction::delay_for(dd.start - prev_end, *logical, std::string(kDDDelayTag)));
        Instruction inst = dd.instruction;
        inst.qubits[0] = *logical;
        before[pos].push_back(std::move(inst)); // filled.instructions is time-ordered
    }

    Circuit out = original;
    out.instructions.clear();
    for (std::size_t i = 0; i <= n; ++i) {
        if (auto it = before.find(i); it != before.end())
            out.instructions.insert(out.instructions.end(), it->second.begin(), it->second.end());
        if (i < n)
            out.instructions.push_back(original.instructions[i]);
    }
    return out;
}

} // namespace ddweaver
