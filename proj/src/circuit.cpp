#include "ddweaver/circuit.hpp"

#include "ddweaver/error.hpp"
#include "text_util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>

namespace ddweaver {

std::string_view gate_name(GateKind kind) noexcept {
    switch (kind) {
    case GateKind::H: return "h";
    case GateKind::X: return "x";
    case GateKind::Phase: return "p";
    case GateKind::CNOT: return "cx";
    case GateKind::SWAP: return "swap";
    case GateKind::Delay: return "delay";
    case GateKind::Barrier: return "barrier";
    case GateKind::Measure: return "measure";
    }
    return "?";
}

Instruction Instruction::h(std::size_t q, std::string tag) {
    return {GateKind::H, {q}, 0.0, 0, std::move(tag)};
}
Instruction Instruction::x(std::size_t q, std::string tag) {
    return {GateKind::X, {q}, 0.0, 0, std::move(tag)};
}
Instruction Instruction::phase(double radians, std::size_t q, std::string tag) {
    return {GateKind::Phase, {q}, radians, 0, std::move(tag)};
}
Instruction Instruction::cx(std::size_t control, std::size_t target, std::string tag) {
    return {GateKind::CNOT, {control, target}, 0.0, 0, std::move(tag)};
}
Instruction Instruction::swap(std::size_t a, std::size_t b, std::string tag) {
    return {GateKind::SWAP, {a, b}, 0.0, 0, std::move(tag)};
}
Instruction Instruction::delay_for(Nanoseconds ns, std::size_t q, std::string tag) {
    return {GateKind::Delay, {q}, 0.0, ns, std::move(tag)};
}
Instruction Instruction::barrier(std::vector<std::size_t> qubits) {
    return {GateKind::Barrier, std::move(qubits), 0.0, 0, {}};
}
Instruction Instruction::measure(std::size_t q) {
    return {GateKind::Measure, {q}, 0.0, 0, {}};
}

bool Instruction::acts_on(std::size_t q) const noexcept {
    if (kind == GateKind::Barrier && qubits.empty())
        return true;
    return std::find(qubits.begin(), qubits.end(), q) != qubits.end();
}

namespace {

std::size_t expected_arity(GateKind kind) {
    return is_two_qubit(kind) ? 2 : 1;
}

void check_instruction(const Instruction& inst, std::size_t n_qubits) {
    if (inst.kind != GateKind::Barrier && inst.qubits.size() != expected_arity(inst.kind)) {
        throw InvariantError(fmt::format("{} expects {} qubit(s), got {}", gate_name(inst.kind),
                                         expected_arity(inst.kind), inst.qubits.size()));
    }
    std::set<std::size_t> seen;
    for (auto q : inst.qubits) {
        if (q >= n_qubits)
            throw InvariantError(fmt::format("qubit q{} out of range (circuit has {} qubits)", q, n_qubits));
        if (!seen.insert(q).second)
            throw InvariantError(fmt::format("{} lists q{} twice", gate_name(inst.kind), q));
    }
    if (inst.kind == GateKind::Delay && inst.delay < 0)
        throw InvariantError("delay duration must be non-negative");
    if (inst.kind == GateKind::Phase && !std::isfinite(inst.angle))
        throw InvariantError("phase angle must be finite");
}

} // namespace

void Circuit::validate() const {
    std::set<std::size_t> measured;
    for (const auto& inst : instructions) {
        check_instruction(inst, n_qubits);
        if (inst.kind == GateKind::Measure && !measured.insert(inst.qubits.front()).second)
            throw InvariantError(fmt::format("q{} is measured twice", inst.qubits.front()));
    }
    if (main_qubit && *main_qubit >= n_qubits)
        throw InvariantError(fmt::format("main qubit q{} out of range", *main_qubit));
}

namespace {

std::size_t parse_qubit(std::string_view token, std::size_t line) {
    if (token.size() < 2 || token.front() != 'q')
        throw ParseError(line, fmt::format("expected qubit like q0, got '{}'", token));
    auto index = detail::parse_unsigned(token.substr(1));
    if (!index)
        throw ParseError(line, fmt::format("bad qubit index '{}'", token));
    return *index;
}

GateKind parse_gate_name(std::string_view name, std::size_t line) {
    static constexpr GateKind kinds[] = {GateKind::H,     GateKind::X,       GateKind::Phase,
                                         GateKind::CNOT,  GateKind::SWAP,    GateKind::Delay,
                                         GateKind::Barrier, GateKind::Measure};
    for (auto kind : kinds)
        if (gate_name(kind) == name)
            return kind;
    throw ParseError(line, fmt::format("unknown gate '{}'", name));
}

} // namespace

Circuit parse_circuit(std::string_view text) {
    Circuit circuit;
    bool have_header = false;
    std::size_t line_no = 0;
    for (auto raw : detail::split_lines(text)) {
        ++line_no;
        auto tokens = detail::tokenize(detail::strip_comment(raw));
        if (tokens.empty())
            continue;

        if (!have_header) {
            if (tokens[0] != "qubits" || tokens.size() != 2)
                throw ParseError(line_no, "expected header 'qubits N'");
            auto n = detail::parse_unsigned(tokens[1]);
            if (!n || *n == 0)
                throw ParseError(line_no, fmt::format("bad qubit count '{}'", tokens[1]));
            circuit.n_qubits = *n;
            have_header = true;
            continue;
        }

        Instruction inst;
        if (tokens.back().starts_with("@tag=")) {
            inst.tag = std::string(tokens.back().substr(5));
            if (inst.tag.empty())
                throw ParseError(line_no, "empty tag");
            tokens.pop_back();
        }
        inst.kind = parse_gate_name(tokens[0], line_no);

        std::size_t first_qubit = 1;
        if (inst.kind == GateKind::Phase || inst.kind == GateKind::Delay) {
            if (tokens.size() < 2)
                throw ParseError(line_no, fmt::format("{} needs a parameter", tokens[0]));
            if (inst.kind == GateKind::Phase) {
                auto angle = detail::parse_double(tokens[1]);
                if (!angle || !std::isfinite(*angle))
                    throw ParseError(line_no, fmt::format("bad angle '{}'", tokens[1]));
                inst.angle = *angle;
            } else {
                auto ns = detail::parse_signed(tokens[1]);
                if (!ns || *ns < 0)
                    throw ParseError(line_no, fmt::format("bad delay '{}'", tokens[1]));
                inst.delay = *ns;
            }
            first_qubit = 2;
        }
        for (std::size_t i = first_qubit; i < tokens.size(); ++i)
            inst.qubits.push_back(parse_qubit(tokens[i], line_no));

        try {
            check_instruction(inst, circuit.n_qubits);
        } catch (const InvariantError& e) {
            throw ParseError(line_no, e.what());
        }
        if (inst.kind == GateKind::Measure) {
            for (const auto& prev : circuit.instructions)
                if (prev.kind == GateKind::Measure && prev.qubits == inst.qubits)
                    throw ParseError(line_no, fmt::format("q{} is measured twice", inst.qubits[0]));
        }
        circuit.instructions.push_back(std::move(inst));
    }
    if (!have_header)
        throw ParseError(0, "missing 'qubits N' header");
    return circuit;
}

std::string render_circuit(const Circuit& circuit) {
    std::string out = fmt::format("qubits {}\n", circuit.n_qubits);
    for (const auto& inst : circuit.instructions) {
        out += gate_name(inst.kind);
        if (inst.kind == GateKind::Phase)
            out += fmt::format(" {}", inst.angle);
        else if (inst.kind == GateKind::Delay)
            out += fmt::format(" {}", inst.delay);
        for (auto q : inst.qubits)
            out += fmt::format(" q{}", q);
        if (!inst.tag.empty())
            out += fmt::format(" @tag={}", inst.tag);
        out += '\n';
    }
    return out;
}

Circuit repeat_segment(const Circuit& circuit, std::size_t k) {
    if (k == 0)
        throw InvariantError("repeat count must be positive");
    std::vector<std::size_t> barriers;
    for (std::size_t i = 0; i < circuit.instructions.size(); ++i)
        if (circuit.instructions[i].kind == GateKind::Barrier)
            barriers.push_back(i);
    if (barriers.size() != 2) {
        throw InvariantError(fmt::format(
            "expected exactly one barrier-delimited region (2 barriers), found {} barrier(s)", barriers.size()));
    }

    const auto& src = circuit.instructions;
    const auto open = static_cast<std::ptrdiff_t>(barriers[0]);
    const auto close = static_cast<std::ptrdiff_t>(barriers[1]);

    Circuit out = circuit;
    out.instructions.assign(src.begin(), src.begin() + close + 1);
    for (std::size_t rep = 1; rep < k; ++rep)
        out.instructions.insert(out.instructions.end(), src.begin() + open + 1, src.begin() + close + 1);
    out.instructions.insert(out.instructions.end(), src.begin() + close + 1, src.end());
    return out;
}

Circuit decompose_swap(const Circuit& circuit) {
    Circuit out = circuit;
    out.instructions.clear();
    for (const auto& inst : circuit.instructions) {
        if (inst.kind != GateKind::SWAP) {
            out.instructions.push_back(inst);
            continue;
        }
        const auto a = inst.qubits[0];
        const auto b = inst.qubits[1];
        out.instructions.push_back(Instruction::cx(a, b, inst.tag));
        out.instructions.push_back(Instruction::cx(b, a, inst.tag));
        out.instructions.push_back(Instruction::cx(a, b, inst.tag));
    }
    return out;
}

} // namespace ddweaver
