#include "ddweaver/experiments.hpp"

#include "ddweaver/error.hpp"
#include "text_util.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numeric>

namespace ddweaver {

std::string_view experiment_name(Experiment e) noexcept {
    switch (e) {
    case Experiment::Motivational: return "motivational";
    case Experiment::CnotDelay: return "cnot-delay";
    case Experiment::Swap: return "swap";
    case Experiment::SwapDelay: return "swap-delay";
    case Experiment::Ramsey: return "ramsey";
    }
    return "?";
}

std::optional<Experiment> parse_experiment(std::string_view name) noexcept {
    for (auto e : kAllExperiments)
        if (experiment_name(e) == name)
            return e;
    return std::nullopt;
}

std::vector<Strategy> default_strategies(Experiment e) {
    using S = Strategy;
    switch (e) {
    case Experiment::Motivational: return {S::Baseline, S::SingleDD};
    case Experiment::CnotDelay:
    case Experiment::SwapDelay:
        return {S::Baseline, S::SingleDD, S::ProtectGateOnly, S::ProtectDelayOnly, S::PerSegmentDD};
    case Experiment::Swap: return {S::Baseline, S::SingleDD, S::PerCnotDD};
    case Experiment::Ramsey: return {S::Baseline};
    }
    return {};
}

std::vector<std::size_t> parse_ks(std::string_view text) {
    std::vector<std::string_view> parts;
    std::size_t from = 0;
    while (true) {
        auto colon = text.find(':', from);
        parts.push_back(text.substr(from, colon == std::string_view::npos ? std::string_view::npos : colon - from));
        if (colon == std::string_view::npos)
            break;
        from = colon + 1;
    }
    if (parts.size() < 2 || parts.size() > 3)
        throw ParseError(0, fmt::format("bad k range '{}', expected start:stop[:step]", text));
    std::vector<std::uint64_t> v;
    for (auto p : parts) {
        auto n = detail::parse_unsigned(p);
        if (!n)
            throw ParseError(0, fmt::format("bad k range '{}': '{}' is not a count", text, p));
        v.push_back(*n);
    }
    const auto step = v.size() == 3 ? v[2] : 1;
    if (v[0] == 0 || step == 0 || v[1] < v[0])
        throw ParseError(0, fmt::format("bad k range '{}': need 1 <= start <= stop and step >= 1", text));
    std::vector<std::size_t> ks;
    for (auto k = v[0]; k <= v[1]; k += step)
        ks.push_back(static_cast<std::size_t>(k));
    return ks;
}

Mapping crosstalk_mapping() {
    return Mapping{{0, 1, 2}};
}

Mapping idle_idle_mapping() {
    return Mapping{{0, 4, 5}};
}

Circuit experiment_template(Experiment e, Nanoseconds cx_ns) {
    Circuit c;
    c.n_qubits = 3;
    c.main_qubit = 0;
    auto& in = c.instructions;
    in.push_back(Instruction::h(0));
    in.push_back(Instruction::barrier());
    switch (e) {
    case Experiment::Motivational:
        in.push_back(Instruction::cx(1, 2));
        break;
    case Experiment::CnotDelay:
        in.push_back(Instruction::cx(1, 2));
        in.push_back(Instruction::delay_for(cx_ns, 1));
        in.push_back(Instruction::delay_for(cx_ns, 2));
        break;
    case Experiment::Swap:
        in.push_back(Instruction::swap(1, 2));
        break;
    case Experiment::SwapDelay:
        in.push_back(Instruction::swap(1, 2));
        in.push_back(Instruction::delay_for(3 * cx_ns, 1));
        in.push_back(Instruction::delay_for(3 * cx_ns, 2));
        break;
    case Experiment::Ramsey:
        throw InvariantError("the Ramsey experiment has its own circuits (ramsey_circuit)");
    }
    in.push_back(Instruction::barrier());
    in.push_back(Instruction::h(0));
    in.push_back(Instruction::measure(0));
    return c;
}

Circuit experiment_circuit(Experiment e, std::size_t k, const DeviceModel& device, const Mapping& mapping) {
    if (mapping.size() < 3)
        throw InvariantError("experiments need a mapping for q0, q1 and q2");
    const auto cx_ns = device.cx_duration(mapping(1), mapping(2));
    return decompose_swap(repeat_segment(experiment_template(e, cx_ns), k));
}

double SweepResult::mean_p0() const {
    if (p0.empty())
        return 0.0;
    return std::accumulate(p0.begin(), p0.end(), 0.0) / static_cast<double>(p0.size());
}

bool SweepResult::operator==(const SweepResult& o) const {
    return experiment == o.experiment && strategy == o.strategy && ks == o.ks && p0 == o.p0 &&
           std_error == o.std_error && device == o.device && mapping == o.mapping && toggles == o.toggles &&
           samples == o.samples && seed == o.seed;
}

namespace {

SweepResult blank_result(std::string name, Strategy s, const DeviceModel& device, const Mapping& mapping,
                         const SimConfig& config) {
    SweepResult r;
    r.experiment = std::move(name);
    r.strategy = s;
    r.device = device.name;
    r.mapping = mapping;
    r.toggles = config.toggles;
    r.samples = config.samples;
    r.seed = config.seed;
    return r;
}

} // namespace

SweepResult run_series(Experiment e, Strategy strategy, const ExperimentSetup& setup) {
    if (e == Experiment::Ramsey)
        throw InvariantError("use ramsey_suite for the Ramsey experiment");
    SweepResult r = blank_result(std::string(experiment_name(e)), strategy, setup.device, setup.mapping, setup.config);
    for (auto k : setup.ks) {
        const auto circuit = experiment_circuit(e, k, setup.device, setup.mapping);
        auto sched = schedule_asap(circuit, setup.device, setup.mapping);
        if (strategy != Strategy::Baseline)
            sched = apply_strategy(sched, strategy, true, setup.dd).schedule;
        const auto sim = simulate(sched, setup.config);
        r.ks.push_back(k);
        r.p0.push_back(sim.p0);
        r.std_error.push_back(sim.std_error);
        r.invariants.merge(sim.invariants);
    }
    return r;
}

std::vector<SweepResult> run_sweep(Experiment e, const ExperimentSetup& setup, const std::vector<Strategy>& strategies) {
    std::vector<SweepResult> out;
    for (auto s : strategies)
        out.push_back(run_series(e, s, setup));
    return out;
}

std::vector<SweepResult> run_sweep(Experiment e, const ExperimentSetup& setup) {
    return run_sweep(e, setup, default_strategies(e));
}

std::vector<std::size_t> RamseySetup::default_ks() {
    std::vector<std::size_t> ks(50);
    std::iota(ks.begin(), ks.end(), 1);
    return ks;
}

Circuit ramsey_circuit(int variant, std::size_t k, double phase_step, Nanoseconds delay_ns) {
    if (variant < 1 || variant > 4)
        throw InvariantError(fmt::format("Ramsey variant {} does not exist (1..4)", variant));
    const bool excited = variant == 2 || variant == 4;
    const bool with_cnot = variant >= 3;
    Circuit c;
    c.n_qubits = with_cnot ? 3 : 2;
    c.main_qubit = 0;
    auto& in = c.instructions;
    in.push_back(Instruction::h(0));
    if (excited)
        in.push_back(Instruction::x(1));
    in.push_back(Instruction::barrier());
    in.push_back(Instruction::delay_for(delay_ns, 0));
    in.push_back(Instruction::phase(phase_step, 0));
    if (with_cnot)
        in.push_back(Instruction::cx(1, 2, "spectator-cnot"));
    in.push_back(Instruction::barrier());
    in.push_back(Instruction::h(0));
    in.push_back(Instruction::measure(0));
    return repeat_segment(c, k);
}

RamseyReport ramsey_suite(const RamseySetup& setup) {
    const auto& dev = setup.device;
    const auto [sa, sb] = setup.spectators;
    if (setup.ks.size() < 8)
        throw InvariantError("the Ramsey fit needs at least 8 repetition counts");
    const Nanoseconds delay = dev.cx_duration(sa, sb);
    const Mapping two{{setup.main, sa}};
    const Mapping three{{setup.main, sa, sb}};
    two.validate(dev);
    three.validate(dev);

    RamseyReport report;
    {
        auto m1 = schedule_asap(ramsey_circuit(1, 1, setup.phase_step, delay), dev, two).makespan;
        auto m2 = schedule_asap(ramsey_circuit(1, 2, setup.phase_step, delay), dev, two).makespan;
        report.rep_ns = static_cast<double>(m2 - m1);
    }

    for (int v = 1; v <= 4; ++v) {
        const Mapping& map = v >= 3 ? three : two;
        auto& r = report.series[static_cast<std::size_t>(v - 1)];
        r = blank_result(fmt::format("ramsey-v{}", v), Strategy::Baseline, dev, map, setup.config);
        for (auto k : setup.ks) {
            const auto sched = schedule_asap(ramsey_circuit(v, k, setup.phase_step, delay), dev, map);
            const auto sim = simulate(sched, setup.config);
            r.ks.push_back(k);
            r.p0.push_back(sim.p0);
            r.std_error.push_back(sim.std_error);
            r.invariants.merge(sim.invariants);
        }
        std::vector<double> kd(r.ks.begin(), r.ks.end());
        auto& fit = report.fits[static_cast<std::size_t>(v - 1)];
        fit = fit_damped_cosine(kd, r.p0);
        report.frequency_khz[static_cast<std::size_t>(v - 1)] = cycles_to_khz(fit.frequency, report.rep_ns);
        report.frequency_stderr_khz[static_cast<std::size_t>(v - 1)] = cycles_to_khz(fit.frequency_stderr, report.rep_ns);
    }
    report.zz_shift_khz = std::abs(report.frequency_khz[1] - report.frequency_khz[0]);
    report.cr_shift_khz = std::abs(report.frequency_khz[2] - report.frequency_khz[0]);
    return report;
}

} // namespace ddweaver
