#include "ddweaver/schedule.hpp"

#include "ddweaver/error.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace ddweaver {

Nanoseconds instruction_duration(const Instruction& inst, const DeviceModel& device) {
    switch (inst.kind) {
    case GateKind::H:
        return device.dur_1q;
    case GateKind::X:
        return inst.tag == kDDPulseTag ? device.pulse : device.dur_1q;
    case GateKind::Phase:
    case GateKind::Barrier:
        return 0;
    case GateKind::CNOT:
        return device.cx_duration(inst.qubits[0], inst.qubits[1]);
    case GateKind::SWAP:
        return 3 * device.cx_duration(inst.qubits[0], inst.qubits[1]);
    case GateKind::Delay:
        return inst.delay;
    case GateKind::Measure:
        return device.dur_measure;
    }
    return 0;
}

void sort_schedule(Schedule& schedule) {
    std::stable_sort(schedule.instructions.begin(), schedule.instructions.end(),
                     [](const TimedInstruction& l, const TimedInstruction& r) {
                         if (l.start != r.start)
                             return l.start < r.start;
                         // originals before inserted DD at equal start
                         return l.source.has_value() && !r.source.has_value();
                     });
}

Schedule schedule_asap(const Circuit& circuit, const DeviceModel& device, const Mapping& mapping) {
    circuit.validate();
    if (mapping.size() < circuit.n_qubits)
        throw InvariantError(fmt::format("mapping covers {} qubit(s), circuit has {}", mapping.size(), circuit.n_qubits));
    mapping.validate(device);

    Schedule sched;
    sched.device = device;
    sched.mapping = mapping;
    sched.mapping.physical.resize(circuit.n_qubits);
    for (std::size_t l = 0; l < circuit.n_qubits; ++l)
        sched.active_qubits.push_back(mapping(l));
    std::sort(sched.active_qubits.begin(), sched.active_qubits.end());
    if (circuit.main_qubit)
        sched.main_qubit = mapping(*circuit.main_qubit);

    std::vector<Nanoseconds> ready(device.n_qubits, 0);
    std::vector<std::size_t> measures;

    for (std::size_t i = 0; i < circuit.instructions.size(); ++i) {
        const auto& src = circuit.instructions[i];
        if (src.kind == GateKind::Measure) {
            measures.push_back(i);
            continue;
        }
        TimedInstruction ti;
        ti.instruction = src;
        ti.source = i;
        if (src.kind == GateKind::Barrier && src.qubits.empty())
            ti.instruction.qubits = sched.active_qubits;
        else
            for (auto& q : ti.instruction.qubits)
                q = mapping(q);

        const auto& qs = ti.instruction.qubits;
        if (is_two_qubit(src.kind) && !device.has_edge(qs[0], qs[1])) {
            throw UnroutedGateError(fmt::format("unrouted gate: {} q{} q{} maps to Q{},Q{} which are not coupled",
                                                gate_name(src.kind), src.qubits[0], src.qubits[1], qs[0], qs[1]));
        }
        ti.duration = instruction_duration(ti.instruction, device);
        for (auto q : qs)
            ti.start = std::max(ti.start, ready[q]);
        for (auto q : qs)
            ready[q] = ti.end();
        sched.makespan = std::max(sched.makespan, ti.end());
        sched.instructions.push_back(std::move(ti));
    }

    const Nanoseconds measure_at = sched.makespan;
    for (auto i : measures) {
        TimedInstruction ti;
        ti.instruction = circuit.instructions[i];
        ti.instruction.qubits[0] = mapping(ti.instruction.qubits[0]);
        ti.source = i;
        ti.start = measure_at;
        ti.duration = device.dur_measure;
        sched.makespan = std::max(sched.makespan, ti.end());
        sched.instructions.push_back(std::move(ti));
    }
    sort_schedule(sched);
    return sched;
}

std::vector<IdleWindow> idle_windows(const Schedule& schedule, std::size_t qubit) {
    std::vector<IdleWindow> windows;
    if (!std::binary_search(schedule.active_qubits.begin(), schedule.active_qubits.end(), qubit))
        return windows;

    Nanoseconds limit = schedule.makespan;
    std::vector<const TimedInstruction*> own;
    for (const auto& ti : schedule.instructions) {
        if (!ti.instruction.acts_on(qubit))
            continue;
        if (ti.instruction.kind == GateKind::Measure)
            limit = std::min(limit, ti.start);
        else
            own.push_back(&ti);
    }

    auto emit = [&](Nanoseconds from, Nanoseconds to) {
        if (to <= from)
            return;
        IdleWindow w{qubit, from, to, {}};
        for (const auto& ti : schedule.instructions)
            if (!ti.instruction.acts_on(qubit) && ti.instruction.kind != GateKind::Measure && ti.overlaps(from, to))
                w.concurrent.push_back(ti);
        windows.push_back(std::move(w));
    };

    Nanoseconds cursor = 0;
    for (const auto* ti : own) {
        emit(cursor, ti->start);
        cursor = std::max(cursor, ti->end());
    }
    emit(cursor, limit);
    return windows;
}

std::string schedule_csv(const Schedule& schedule) {
    std::string out = "qubit,start_ns,duration_ns,gate,qubits,tag\n";
    for (const auto& ti : schedule.instructions) {
        std::string qs;
        for (auto q : ti.instruction.qubits)
            qs += (qs.empty() ? "" : ";") + std::to_string(q);
        for (auto q : ti.instruction.qubits)
            out += fmt::format("{},{},{},{},{},{}\n", q, ti.start, ti.duration, gate_name(ti.instruction.kind), qs,
                               ti.instruction.tag);
    }
    return out;
}

} // namespace ddweaver
