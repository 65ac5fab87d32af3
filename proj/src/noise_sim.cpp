#include "ddweaver/noise_sim.hpp"

#include "ddweaver/density_matrix.hpp"
#include "ddweaver/error.hpp"
#include "text_util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <thread>
#include <variant>

namespace ddweaver {

namespace {

constexpr std::size_t kMaxQubits = 5;

struct ToggleName {
    std::string_view name;
    bool NoiseToggles::*field;
};

constexpr ToggleName kToggleNames[] = {
    {"t1", &NoiseToggles::t1},
    {"t2", &NoiseToggles::t2},
    {"zz", &NoiseToggles::zz},
    {"cr_shift", &NoiseToggles::cr_shift},
    {"quasi_static", &NoiseToggles::quasi_static},
    {"finite_pulse", &NoiseToggles::finite_pulse},
};

} // namespace

NoiseToggles parse_toggles(std::string_view text) {
    NoiseToggles t = NoiseToggles::all();
    std::string_view rest = text;
    while (!rest.empty()) {
        auto comma = rest.find(',');
        auto item = rest.substr(0, comma);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        while (!item.empty() && item.front() == ' ')
            item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ')
            item.remove_suffix(1);
        if (item.empty())
            continue;
        if (item == "all") {
            t = NoiseToggles::all();
            continue;
        }
        if (item == "none") {
            t = NoiseToggles::none();
            continue;
        }
        bool value = true;
        if (item.front() == '-') {
            value = false;
            item.remove_prefix(1);
        }
        auto it = std::find_if(std::begin(kToggleNames), std::end(kToggleNames),
                               [&](const ToggleName& n) { return n.name == item; });
        if (it == std::end(kToggleNames))
            throw ParseError(0, fmt::format("unknown noise toggle '{}'", item));
        t.*(it->field) = value;
    }
    return t;
}

std::string render_toggles(const NoiseToggles& t) {
    std::string out;
    for (const auto& n : kToggleNames)
        if (t.*(n.field))
            out += (out.empty() ? "" : ",") + std::string(n.name);
    return out.empty() ? "none" : out;
}

void InvariantStats::merge(const InvariantStats& o) {
    checks += o.checks;
    max_trace_error = std::max(max_trace_error, o.max_trace_error);
    max_hermiticity_error = std::max(max_hermiticity_error, o.max_hermiticity_error);
    min_eigenvalue = std::min(min_eigenvalue, o.min_eigenvalue);
    max_kraus_error = std::max(max_kraus_error, o.max_kraus_error);
}

std::size_t worker_threads(std::size_t requested) {
    std::size_t n = requested;
    if (n == 0) {
        if (const char* env = std::getenv("DD_WEAVER_THREADS")) {
            auto v = detail::parse_unsigned(env);
            if (v && *v > 0)
                n = static_cast<std::size_t>(*v);
        }
    }
    if (n == 0)
        n = std::thread::hardware_concurrency();
    return std::max<std::size_t>(n, 1);
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {

struct Gate1 {
    Eigen::Matrix2cd u;
    std::size_t q;
};

struct Gate2 {
    Eigen::Matrix4cd u;
    std::size_t a, b;
};

struct Interval {
    double dt = 0.0;
    /// Number of running two-qubit gates adjacent to each local qubit.
    std::vector<int> stark;
    std::vector<bool> pulsing;
    /// Per-qubit decoherence over dt / 2; empty when both T1 and T2 are off.
    std::vector<DampingParams> half_damping;
};

using Step = std::variant<Gate1, Gate2, Interval>;

struct ZZPair {
    std::size_t a, b;
    double zeta;
};

struct Plan {
    std::size_t n = 0;
    std::size_t main = 0;
    std::vector<std::size_t> physical; // local -> physical
    std::vector<Step> steps;
    std::vector<ZZPair> zz;
    double pulse = 0.0;
    double kraus_error = 0.0;
    std::vector<double> t1, t2; // us, infinity when off
};

struct InstantEvent {
    double time;
    std::size_t order;
    Step step;
};

Plan build_plan(const Schedule& s, const NoiseToggles& toggles) {
    if (!s.main_qubit)
        throw SimulationError("schedule has no main qubit to read out");
    if (s.active_qubits.size() > kMaxQubits)
        throw SimulationError(fmt::format("{} active qubits; the simulator handles at most {}", s.active_qubits.size(),
                                          kMaxQubits));
    const auto& dev = s.device;
    Plan plan;
    plan.n = s.active_qubits.size();
    plan.physical = s.active_qubits;
    plan.pulse = static_cast<double>(dev.pulse);
    auto local = [&](std::size_t phys) {
        auto it = std::lower_bound(plan.physical.begin(), plan.physical.end(), phys);
        if (it == plan.physical.end() || *it != phys)
            throw SimulationError(fmt::format("instruction on inactive qubit Q{}", phys));
        return static_cast<std::size_t>(it - plan.physical.begin());
    };
    plan.main = local(*s.main_qubit);

    double t_end = static_cast<double>(s.makespan);
    for (const auto& ti : s.instructions)
        if (ti.instruction.kind == GateKind::Measure)
            t_end = std::min(t_end, static_cast<double>(ti.start));

    // same-qubit overlap check
    std::vector<std::vector<std::pair<Nanoseconds, Nanoseconds>>> busy(plan.n);
    for (const auto& ti : s.instructions) {
        if (ti.duration <= 0 || ti.instruction.kind == GateKind::Barrier)
            continue;
        for (auto q : ti.instruction.qubits)
            busy[local(q)].emplace_back(ti.start, ti.end());
    }
    for (std::size_t q = 0; q < plan.n; ++q) {
        auto& b = busy[q];
        std::sort(b.begin(), b.end());
        for (std::size_t i = 1; i < b.size(); ++i)
            if (b[i].first < b[i - 1].second)
                throw SimulationError(fmt::format("overlapping instructions on Q{} at {} ns", plan.physical[q],
                                                  b[i].first));
    }

    std::vector<double> times{0.0, t_end};
    std::vector<InstantEvent> instants;
    for (std::size_t i = 0; i < s.instructions.size(); ++i) {
        const auto& ti = s.instructions[i];
        const auto& inst = ti.instruction;
        const double start = static_cast<double>(ti.start);
        if (start >= t_end && !(ti.duration == 0 && start == t_end))
            continue;
        times.push_back(start);
        times.push_back(std::min(static_cast<double>(ti.end()), t_end));
        const bool dd_pulse = inst.kind == GateKind::X && inst.tag == kDDPulseTag;
        switch (inst.kind) {
        case GateKind::H:
            instants.push_back({start, i, Gate1{gates::hadamard(), local(inst.qubits[0])}});
            break;
        case GateKind::X:
            if (!dd_pulse) {
                instants.push_back({start, i, Gate1{gates::pauli_x(), local(inst.qubits[0])}});
            } else if (!toggles.finite_pulse) {
                const double mid = start + 0.5 * static_cast<double>(ti.duration);
                times.push_back(mid);
                instants.push_back({mid, i, Gate1{gates::pauli_x(), local(inst.qubits[0])}});
            }
            break;
        case GateKind::Phase:
            instants.push_back({start, i, Gate1{gates::phase(inst.angle), local(inst.qubits[0])}});
            break;
        case GateKind::CNOT:
            instants.push_back({start, i, Gate2{gates::cnot(), local(inst.qubits[0]), local(inst.qubits[1])}});
            break;
        case GateKind::SWAP:
            instants.push_back({start, i, Gate2{gates::swap(), local(inst.qubits[0]), local(inst.qubits[1])}});
            break;
        case GateKind::Delay:
        case GateKind::Barrier:
        case GateKind::Measure:
            break;
        }
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    std::stable_sort(instants.begin(), instants.end(), [](const InstantEvent& l, const InstantEvent& r) {
        return l.time != r.time ? l.time < r.time : l.order < r.order;
    });

    for (const auto& e : dev.edges) {
        if (!toggles.zz)
            break;
        auto ia = std::lower_bound(plan.physical.begin(), plan.physical.end(), e.a);
        auto ib = std::lower_bound(plan.physical.begin(), plan.physical.end(), e.b);
        if (ia != plan.physical.end() && *ia == e.a && ib != plan.physical.end() && *ib == e.b)
            plan.zz.push_back({local(e.a), local(e.b), dev.zz(e.a, e.b)});
    }

    auto& t1 = plan.t1;
    auto& t2 = plan.t2;
    t1.resize(plan.n);
    t2.resize(plan.n);
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < plan.n; ++q) {
        t1[q] = toggles.t1 ? dev.t1_us.at(plan.physical[q]) : inf;
        // without pure dephasing T2 sits at its 2*T1 ceiling
        t2[q] = toggles.t2 ? dev.t2_us.at(plan.physical[q]) : 2 * t1[q];
    }

    std::size_t next_instant = 0;
    for (std::size_t k = 0; k + 1 < times.size() && times[k] < t_end; ++k) {
        const double a = times[k], b = times[k + 1];
        while (next_instant < instants.size() && instants[next_instant].time <= a)
            plan.steps.push_back(instants[next_instant++].step);

        Interval iv;
        iv.dt = b - a;
        iv.stark.assign(plan.n, 0);
        iv.pulsing.assign(plan.n, false);
        for (const auto& ti : s.instructions) {
            if (static_cast<double>(ti.start) > a || static_cast<double>(ti.end()) <= a)
                continue;
            const auto& inst = ti.instruction;
            if (is_two_qubit(inst.kind)) {
                for (auto op : inst.qubits)
                    for (auto nb : dev.neighbors(op)) {
                        if (nb == inst.qubits[0] || nb == inst.qubits[1])
                            continue;
                        if (std::binary_search(plan.physical.begin(), plan.physical.end(), nb))
                            ++iv.stark[local(nb)];
                    }
            } else if (toggles.finite_pulse && inst.kind == GateKind::X && inst.tag == kDDPulseTag) {
                iv.pulsing[local(inst.qubits[0])] = true;
            }
        }
        if (toggles.t1 || toggles.t2) {
            for (std::size_t q = 0; q < plan.n; ++q) {
                iv.half_damping.push_back(damping_params(0.5 * iv.dt, t1[q], t2[q]));
                plan.kraus_error =
                    std::max(plan.kraus_error, kraus_completeness_error(decoherence_kraus(iv.dt, t1[q], t2[q])));
            }
        }
        plan.steps.push_back(std::move(iv));
    }
    while (next_instant < instants.size())
        plan.steps.push_back(instants[next_instant++].step);
    return plan;
}

struct SampleOutcome {
    double p0 = 0.0;
    InvariantStats stats;
};

SampleOutcome run_sample(const Plan& plan, const DeviceModel& dev, const std::vector<double>& detuning,
                         const NoiseToggles& toggles, bool check) {
    DensityMatrix rho(plan.n);
    SampleOutcome out;
    auto observe = [&] {
        if (!check)
            return;
        ++out.stats.checks;
        out.stats.max_trace_error = std::max(out.stats.max_trace_error, rho.trace_error());
        out.stats.max_hermiticity_error = std::max(out.stats.max_hermiticity_error, rho.hermiticity_error());
        out.stats.min_eigenvalue = std::min(out.stats.min_eigenvalue, rho.min_eigenvalue());
    };

    const Eigen::Index dim = rho.dim();
    std::vector<double> omega(plan.n);
    Eigen::VectorXcd diag(dim);
    for (const auto& step : plan.steps) {
        if (const auto* g = std::get_if<Gate1>(&step)) {
            rho.apply_unitary_unchecked(g->u, g->q);
            observe();
            continue;
        }
        if (const auto* g = std::get_if<Gate2>(&step)) {
            rho.apply_unitary(g->u, g->a, g->b);
            observe();
            continue;
        }
        const auto& iv = std::get<Interval>(step);

        for (std::size_t q = 0; q < plan.n; ++q) {
            const double shift = toggles.cr_shift ? iv.stark[q] * (iv.pulsing[q] ? dev.pulse_cr_shift_khz : dev.cr_shift_khz)
                                                  : 0.0;
            omega[q] = detuning[q] + shift;
        }
        // symmetric split: half the damping on either side of the coherent part;
        // a pulsing qubit decays while it is driven instead
        auto half_damping = [&] {
            for (std::size_t q = 0; q < iv.half_damping.size(); ++q) {
                if (iv.pulsing[q])
                    continue;
                rho.apply_damping(iv.half_damping[q].gamma, iv.half_damping[q].coherence, q);
                observe();
            }
        };
        half_damping();
        for (std::size_t q = 0; q < plan.n; ++q) {
            if (!iv.pulsing[q])
                continue;
            if (iv.half_damping.empty())
                rho.apply_unitary_unchecked(finite_pulse_unitary(iv.dt, plan.pulse, omega[q]), q);
            else
                rho.apply_superoperator(
                    driven_decay_superoperator(iv.dt, plan.pulse, omega[q], plan.t1[q], plan.t2[q]), q);
            observe();
        }

        bool any = !plan.zz.empty();
        for (std::size_t q = 0; q < plan.n; ++q)
            any = any || (!iv.pulsing[q] && omega[q] != 0.0);
        if (!any) {
            half_damping();
            continue;
        }
        for (Eigen::Index i = 0; i < dim; ++i) {
            double phi = 0.0;
            for (std::size_t q = 0; q < plan.n; ++q) {
                if (iv.pulsing[q])
                    continue;
                const double theta = khz_to_rad_per_ns(omega[q]) * iv.dt;
                phi += (i >> q) & 1 ? 0.5 * theta : -0.5 * theta;
            }
            for (const auto& p : plan.zz)
                if (((i >> p.a) & 1) && ((i >> p.b) & 1))
                    phi -= khz_to_rad_per_ns(p.zeta) * iv.dt;
            diag(i) = std::polar(1.0, phi);
        }
        rho.apply_diagonal_unchecked(diag);
        observe();
        half_damping();
    }
    out.p0 = std::clamp(rho.probability_zero(plan.main), 0.0, 1.0);
    return out;
}

} // namespace

SimResult simulate(const Schedule& schedule, const SimConfig& config) {
    if (config.samples == 0)
        throw SimulationError("samples must be at least 1");
    schedule.device.validate();
    const Plan plan = build_plan(schedule, config.toggles);
    const auto& dev = schedule.device;

    std::vector<double> fixed(plan.n, 0.0);
    for (const auto& [phys, khz] : config.static_detuning_khz) {
        auto it = std::lower_bound(plan.physical.begin(), plan.physical.end(), phys);
        if (it != plan.physical.end() && *it == phys)
            fixed[static_cast<std::size_t>(it - plan.physical.begin())] += khz;
    }

    const std::size_t n_samples = config.samples;
    std::vector<SampleOutcome> outcomes(n_samples);
    auto work = [&](std::size_t index) {
        std::vector<double> det = fixed;
        if (config.toggles.quasi_static && dev.sigma_qs_khz > 0) {
            std::mt19937_64 rng(splitmix64(config.seed ^ splitmix64(index)));
            std::normal_distribution<double> normal(0.0, dev.sigma_qs_khz);
            // one draw per device qubit so a qubit sees the same detuning
            // whichever other qubits are active
            for (std::size_t phys = 0, q = 0; phys < dev.n_qubits && q < plan.n; ++phys) {
                const double d = normal(rng);
                if (plan.physical[q] == phys)
                    det[q++] += d;
            }
        }
        outcomes[index] = run_sample(plan, dev, det, config.toggles, config.check_invariants);
    };

    const std::size_t threads = std::min(worker_threads(config.threads), n_samples);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n_samples; ++i)
            work(i);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t i = t; i < n_samples; i += threads)
                        work(i);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool)
            th.join();
        for (auto& e : errors)
            if (e)
                std::rethrow_exception(e);
    }

    SimResult result;
    result.invariants.max_kraus_error = plan.kraus_error;
    double sum = 0.0;
    for (const auto& o : outcomes) {
        result.per_sample.push_back(o.p0);
        sum += o.p0;
        result.invariants.merge(o.stats);
    }
    result.p0 = sum / static_cast<double>(n_samples);
    if (n_samples > 1) {
        double ss = 0.0;
        for (double v : result.per_sample)
            ss += (v - result.p0) * (v - result.p0);
        result.std_error = std::sqrt(ss / static_cast<double>(n_samples - 1) / static_cast<double>(n_samples));
    }
    if (config.shots)
        result.counts = sample_shots(result, *config.shots, config.seed);
    return result;
}

ShotCounts sample_shots(const SimResult& result, std::size_t shots, std::uint64_t seed) {
    if (shots == 0)
        throw SimulationError("shots must be at least 1");
    std::mt19937_64 rng(splitmix64(seed ^ 0x5eedc0de5eedc0deULL));
    std::binomial_distribution<std::size_t> dist(shots, std::clamp(result.p0, 0.0, 1.0));
    return ShotCounts{dist(rng), shots};
}

} // namespace ddweaver
