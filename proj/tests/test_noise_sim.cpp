#include "ddweaver/dd_pass.hpp"
#include "ddweaver/error.hpp"
#include "ddweaver/fit.hpp"
#include "ddweaver/noise_sim.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ddweaver;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Single-qubit Ramsey on Q0 with zero-duration Hadamards, so that the whole
// free evolution lies inside the idle window [0, T).
Schedule instant_ramsey(Nanoseconds t) {
    Schedule s;
    s.device = preset_lagos();
    s.mapping = Mapping{{0}};
    s.active_qubits = {0};
    s.main_qubit = 0;
    s.instructions = {
        TimedInstruction{Instruction::h(0), 0, 0, std::size_t{0}},
        TimedInstruction{Instruction::h(0), t, 0, std::size_t{1}},
        TimedInstruction{Instruction::measure(0), t, s.device.dur_measure, std::size_t{2}},
    };
    s.makespan = t + s.device.dur_measure;
    return s;
}

Schedule with_single_dd(const Schedule& s) {
    return insert_dd(s, idle_windows(s, 0).at(0), Strategy::SingleDD);
}

Schedule block_schedule(const char* body, std::size_t k, const Mapping& map) {
    auto c = parse_circuit(std::string("qubits 3\nh q0\nbarrier\n") + body + "barrier\nh q0\nmeasure q0\n");
    c.main_qubit = 0;
    return schedule_asap(decompose_swap(repeat_segment(c, k)), preset_lagos(), map);
}

SimConfig config_with(NoiseToggles toggles, std::size_t samples = 1) {
    SimConfig cfg;
    cfg.toggles = toggles;
    cfg.samples = samples;
    cfg.threads = 1;
    return cfg;
}

} // namespace

TEST(Toggles, ParseAndRender) {
    EXPECT_EQ(parse_toggles(""), NoiseToggles::all());
    EXPECT_EQ(parse_toggles("all"), NoiseToggles::all());
    EXPECT_EQ(parse_toggles("none"), NoiseToggles::none());
    auto t = parse_toggles("none,zz,quasi_static");
    EXPECT_TRUE(t.zz);
    EXPECT_TRUE(t.quasi_static);
    EXPECT_FALSE(t.t1);
    EXPECT_EQ(render_toggles(t), "zz,quasi_static");
    EXPECT_EQ(render_toggles(NoiseToggles::none()), "none");
    auto u = parse_toggles("-finite_pulse");
    EXPECT_FALSE(u.finite_pulse);
    EXPECT_TRUE(u.t1);
    EXPECT_EQ(parse_toggles("none," + render_toggles(u)), u);
    EXPECT_THROW((void)parse_toggles("t3"), ParseError);
}

TEST(Simulate, NoiselessIsIdentity) {
    for (auto k : {1u, 10u, 50u}) {
        auto s = block_schedule("cx q1 q2\ndelay 300 q1\ndelay 300 q2\n", k, Mapping{{0, 1, 2}});
        auto r = simulate(s, config_with(NoiseToggles::none()));
        EXPECT_NEAR(r.p0, 1.0, 1e-9);
        auto dd = apply_policy(s, Policy::guidelines()).schedule;
        EXPECT_NEAR(simulate(dd, config_with(NoiseToggles::none())).p0, 1.0, 1e-9);
        NoiseToggles pulses_only = NoiseToggles::none();
        pulses_only.finite_pulse = true;
        EXPECT_NEAR(simulate(dd, config_with(pulses_only)).p0, 1.0, 1e-9);
    }
}

TEST(Simulate, DDMatchesBaselineWithoutNoise) {
    for (auto strategy : {Strategy::SingleDD, Strategy::ProtectGateOnly, Strategy::ProtectDelayOnly,
                          Strategy::PerSegmentDD}) {
        auto s = block_schedule("h q1\ncx q1 q2\ndelay 300 q1\ndelay 300 q2\n", 3, Mapping{{0, 1, 2}});
        auto dd = apply_strategy(s, strategy, true).schedule;
        EXPECT_NEAR(simulate(dd, config_with(NoiseToggles::none())).p0,
                    simulate(s, config_with(NoiseToggles::none())).p0, 1e-9);
    }
}

TEST(Simulate, StaticDetuningBaselineClosedForm) {
    for (double delta : {3.0, 14.6, 120.0, -40.0})
        for (Nanoseconds t : {300, 2000, 17'000}) {
            auto cfg = config_with(NoiseToggles::none());
            cfg.static_detuning_khz[0] = delta;
            auto r = simulate(instant_ramsey(t), cfg);
            const double want = (1 + std::cos(2 * kPi * delta * 1e-6 * static_cast<double>(t))) / 2;
            EXPECT_NEAR(r.p0, want, 1e-12) << delta << " " << t;
        }
}

TEST(Simulate, SingleDDRefocusesStaticDetuning) {
    for (double delta : {3.0, 14.6, 120.0, -400.0})
        for (Nanoseconds t : {300, 2000, 17'000}) {
            auto cfg = config_with(NoiseToggles::none());
            cfg.static_detuning_khz[0] = delta;
            EXPECT_NEAR(simulate(with_single_dd(instant_ramsey(t)), cfg).p0, 1.0, 1e-9) << delta << " " << t;
        }
}

TEST(Simulate, QuasiStaticFullyRefocusedByIdealDD) {
    NoiseToggles qs = NoiseToggles::none();
    qs.quasi_static = true;
    auto r = simulate(with_single_dd(instant_ramsey(20'000)), config_with(qs, 200));
    EXPECT_NEAR(r.p0, 1.0, 1e-9);
}

// Average of (1 + cos 2 pi e t)/2 over e ~ Normal(0, sigma) is (1 + exp(-2 (pi sigma t)^2))/2.
TEST(Simulate, QuasiStaticGaussianEnvelope) {
    NoiseToggles qs = NoiseToggles::none();
    qs.quasi_static = true;
    const double sigma = preset_lagos().sigma_qs_khz * 1e-6; // cycles per ns
    auto envelope = [&](Nanoseconds t) {
        const double x = kPi * sigma * static_cast<double>(t);
        return (1 + std::exp(-2 * x * x)) / 2;
    };
    for (Nanoseconds t : {2'500, 5'000, 10'000, 15'000}) {
        auto r = simulate(instant_ramsey(t), config_with(qs, 1000));
        EXPECT_NEAR(r.p0, envelope(t), 0.02 * envelope(t)) << t;
    }
    // once decayed, 1000 samples scatter by about 1%, so check against the sampling error
    for (Nanoseconds t : {20'000, 30'000}) {
        auto r = simulate(instant_ramsey(t), config_with(qs, 1000));
        EXPECT_NEAR(r.p0, envelope(t), 3 * r.std_error) << t;
    }
    auto many = simulate(instant_ramsey(30'000), config_with(qs, 20000));
    EXPECT_NEAR(many.p0, envelope(30'000), 0.02 * envelope(30'000));
}

TEST(Simulate, RamseyFrequencyMatchesConfiguredDetuning) {
    auto c = parse_circuit("qubits 1\nh q0\nbarrier\ndelay 300 q0\nbarrier\nh q0\nmeasure q0\n");
    c.main_qubit = 0;
    const double delta = 100.0;
    std::vector<double> ks, ys;
    for (std::size_t k = 1; k <= 50; ++k) {
        auto cfg = config_with(NoiseToggles::none());
        cfg.static_detuning_khz[0] = delta;
        ks.push_back(static_cast<double>(k));
        ys.push_back(simulate(schedule_asap(repeat_segment(c, k), preset_lagos(), Mapping{{0}}), cfg).p0);
    }
    auto fit = fit_damped_cosine(ks, ys);
    EXPECT_NEAR(cycles_to_khz(fit.frequency, 300.0), delta, 0.01);
}

TEST(Simulate, BaselineDecaysTowardHalf) {
    auto cfg = config_with(NoiseToggles::all(), 200);
    auto p10 = simulate(block_schedule("cx q1 q2\n", 10, Mapping{{0, 1, 2}}), cfg).p0;
    auto p50 = simulate(block_schedule("cx q1 q2\n", 50, Mapping{{0, 1, 2}}), cfg).p0;
    EXPECT_GT(p10, p50);
    EXPECT_GT(p50, 0.5);
    EXPECT_LT(p50, 0.7);
}

TEST(Simulate, InvariantsHoldAfterEveryChannel) {
    auto s = block_schedule("cx q1 q2\ndelay 300 q1\ndelay 300 q2\n", 5, Mapping{{0, 1, 2}});
    auto dd = apply_policy(s, Policy::guidelines()).schedule;
    auto cfg = config_with(NoiseToggles::all(), 8);
    cfg.check_invariants = true;
    auto r = simulate(dd, cfg);
    EXPECT_GT(r.invariants.checks, 0u);
    EXPECT_LE(r.invariants.max_trace_error, 1e-10);
    EXPECT_LE(r.invariants.max_hermiticity_error, 1e-10);
    EXPECT_GE(r.invariants.min_eigenvalue, -1e-9);
    EXPECT_LE(r.invariants.max_kraus_error, 1e-12);
    for (double p : r.per_sample) {
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
    }
}

TEST(Simulate, DeterministicAcrossThreadCounts) {
    auto s = apply_policy(block_schedule("cx q1 q2\ndelay 300 q1\ndelay 300 q2\n", 4, Mapping{{0, 1, 2}}),
                          Policy::guidelines())
                 .schedule;
    auto cfg = config_with(NoiseToggles::all(), 64);
    cfg.seed = 99;
    auto one = simulate(s, cfg);
    cfg.threads = 3;
    auto three = simulate(s, cfg);
    cfg.threads = 8;
    auto eight = simulate(s, cfg);
    EXPECT_EQ(one.per_sample, three.per_sample);
    EXPECT_EQ(one.per_sample, eight.per_sample);
    EXPECT_EQ(one.p0, eight.p0);
    cfg.seed = 100;
    EXPECT_NE(simulate(s, cfg).per_sample, one.per_sample);
}

TEST(Simulate, MainQubitSeesSameDrawWhateverIsActive) {
    NoiseToggles qs = NoiseToggles::none();
    qs.quasi_static = true;
    auto c1 = parse_circuit("qubits 2\nh q0\nbarrier\ndelay 2000 q0\nbarrier\nh q0\nmeasure q0\n");
    c1.main_qubit = 0;
    auto a = simulate(schedule_asap(c1, preset_lagos(), Mapping{{6, 5}}), config_with(qs, 16));
    auto c2 = parse_circuit("qubits 3\nh q0\nbarrier\ndelay 2000 q0\nbarrier\nh q0\nmeasure q0\n");
    c2.main_qubit = 0;
    auto b = simulate(schedule_asap(c2, preset_lagos(), Mapping{{6, 5, 4}}), config_with(qs, 16));
    for (std::size_t i = 0; i < 16; ++i)
        EXPECT_NEAR(a.per_sample[i], b.per_sample[i], 1e-14);
}

TEST(Simulate, Errors) {
    auto c = parse_circuit("qubits 6\nh q0\nh q1\nh q2\nh q3\nh q4\nh q5\nmeasure q0\n");
    c.main_qubit = 0;
    auto big = schedule_asap(c, preset_lagos(), Mapping::identity(6));
    EXPECT_THROW((void)simulate(big, config_with(NoiseToggles::none())), SimulationError);

    auto s = instant_ramsey(300);
    auto cfg = config_with(NoiseToggles::none());
    cfg.samples = 0;
    EXPECT_THROW((void)simulate(s, cfg), SimulationError);

    s.main_qubit.reset();
    EXPECT_THROW((void)simulate(s, config_with(NoiseToggles::none())), SimulationError);

    auto overlap = instant_ramsey(300);
    overlap.instructions.push_back(TimedInstruction{Instruction::x(0), 100, 35, std::size_t{3}});
    overlap.instructions.push_back(TimedInstruction{Instruction::x(0), 120, 35, std::size_t{4}});
    sort_schedule(overlap);
    EXPECT_THROW((void)simulate(overlap, config_with(NoiseToggles::none())), SimulationError);
}

TEST(Shots, Sampling) {
    SimResult one;
    one.p0 = 1.0;
    auto c = sample_shots(one, 1000, 5);
    EXPECT_EQ(c.zeros, 1000u);
    EXPECT_EQ(c.shots, 1000u);

    SimResult half;
    half.p0 = 0.5;
    auto h = sample_shots(half, 1'000'000, 5);
    EXPECT_NEAR(static_cast<double>(h.zeros) / 1e6, 0.5, 0.002);
    EXPECT_EQ(sample_shots(half, 1000, 11).zeros, sample_shots(half, 1000, 11).zeros);
    EXPECT_THROW((void)sample_shots(half, 0, 1), SimulationError);

    auto cfg = config_with(NoiseToggles::none());
    cfg.shots = 500;
    auto r = simulate(instant_ramsey(300), cfg);
    ASSERT_TRUE(r.counts.has_value());
    EXPECT_EQ(r.counts->zeros, 500u);
}

TEST(Threads, EnvironmentOverride) {
    EXPECT_EQ(worker_threads(3), 3u);
    ::setenv("DD_WEAVER_THREADS", "2", 1);
    EXPECT_EQ(worker_threads(0), 2u);
    ::unsetenv("DD_WEAVER_THREADS");
    EXPECT_GE(worker_threads(0), 1u);
}
