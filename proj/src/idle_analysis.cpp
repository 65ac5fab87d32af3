#include "ddweaver/idle_analysis.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace ddweaver {

std::string_view idle_class_name(IdleClass c) noexcept {
    return c == IdleClass::CrosstalkIdle ? "crosstalk" : "idle";
}

std::size_t WindowSegments::gate_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(segments.begin(), segments.end(), [](const Segment& s) { return s.is_gate(); }));
}

std::size_t WindowSegments::free_count() const noexcept {
    return segments.size() - gate_count();
}

std::string WindowSegments::describe() const {
    std::string out;
    for (const auto& s : segments)
        out += fmt::format("{}{}:{}", out.empty() ? "" : ";", s.is_gate() ? "gate" : "free", s.length());
    return out;
}

namespace {

std::optional<std::size_t> gate_distance(const TimedInstruction& gate, std::size_t qubit, const DeviceModel& device) {
    std::optional<std::size_t> best;
    for (auto q : gate.instruction.qubits) {
        auto d = distance(device, qubit, q);
        if (d && (!best || *d < *best))
            best = d;
    }
    return best;
}

} // namespace

IdleClass classify_window(const IdleWindow& window, const DeviceModel& device) {
    for (const auto& ti : window.concurrent) {
        if (!is_two_qubit(ti.instruction.kind))
            continue;
        auto d = gate_distance(ti, window.qubit, device);
        if (d && *d == 1)
            return IdleClass::CrosstalkIdle;
    }
    return IdleClass::IdleIdle;
}

WindowSegments segment_window(const IdleWindow& window, const DeviceModel& device) {
    std::vector<const TimedInstruction*> gates;
    for (const auto& ti : window.concurrent)
        if (is_two_qubit(ti.instruction.kind))
            gates.push_back(&ti);
    std::sort(gates.begin(), gates.end(), [](auto* l, auto* r) { return l->start < r->start; });

    // union of clipped gate intervals, merging gaps shorter than a pulse
    std::vector<Segment> spans;
    for (const auto* g : gates) {
        Nanoseconds s = std::max(g->start, window.start);
        Nanoseconds e = std::min(g->end(), window.end);
        if (!spans.empty() && s - spans.back().end < device.pulse) {
            spans.back().end = std::max(spans.back().end, e);
            spans.back().gate_span->gates.push_back(*g);
        } else {
            spans.push_back(Segment{s, e, GateSpan{{*g}}});
        }
    }

    WindowSegments out;
    Nanoseconds cursor = window.start;
    for (auto& span : spans) {
        if (span.start > cursor)
            out.segments.push_back(Segment{cursor, span.start, std::nullopt});
        cursor = span.end;
        out.segments.push_back(std::move(span));
    }
    if (window.end > cursor)
        out.segments.push_back(Segment{cursor, window.end, std::nullopt});
    return out;
}

CrosstalkEntry analyze_window(const IdleWindow& window, const DeviceModel& device) {
    CrosstalkEntry entry;
    entry.window = window;
    entry.cls = classify_window(window, device);
    entry.segments = segment_window(window, device);
    for (const auto& ti : window.concurrent) {
        if (!is_two_qubit(ti.instruction.kind))
            continue;
        auto d = gate_distance(ti, window.qubit, device);
        entry.distances.push_back(d);
        if (d && *d == 1) {
            Edge e(ti.instruction.qubits[0], ti.instruction.qubits[1]);
            if (std::find(entry.offending_edges.begin(), entry.offending_edges.end(), e) == entry.offending_edges.end())
                entry.offending_edges.push_back(e);
        }
    }
    return entry;
}

CrosstalkReport crosstalk_report(const Schedule& schedule, const std::vector<std::size_t>& qubits) {
    CrosstalkReport report;
    for (auto q : qubits)
        for (const auto& w : idle_windows(schedule, q))
            report.push_back(analyze_window(w, schedule.device));
    return report;
}

std::string crosstalk_csv(const CrosstalkReport& report) {
    std::string out = "qubit,start_ns,end_ns,class,segments\n";
    for (const auto& e : report)
        out += fmt::format("{},{},{},{},{}\n", e.window.qubit, e.window.start, e.window.end, idle_class_name(e.cls),
                           e.segments.describe());
    return out;
}

} // namespace ddweaver
