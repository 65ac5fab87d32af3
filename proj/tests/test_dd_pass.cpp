#include "ddweaver/dd_pass.hpp"
#include "ddweaver/density_matrix.hpp"
#include "ddweaver/error.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace ddweaver;

namespace {

const char* kMotivational = "qubits 3\nh q0\nbarrier\ncx q1 q2\nbarrier\nh q0\nmeasure q0\n";
const char* kCnotDelay = "qubits 3\nh q0\nbarrier\ncx q1 q2\ndelay 300 q1\ndelay 300 q2\nbarrier\nh q0\nmeasure q0\n";
const char* kSwap = "qubits 3\nh q0\nbarrier\nswap q1 q2\nbarrier\nh q0\nmeasure q0\n";

Schedule schedule_of(const char* text, const Mapping& map = Mapping{{0, 1, 2}}, bool decompose = false) {
    auto c = parse_circuit(text);
    c.main_qubit = 0;
    if (decompose)
        c = decompose_swap(c);
    return schedule_asap(c, preset_lagos(), map);
}

std::vector<Nanoseconds> pulse_starts(const Schedule& s) {
    std::vector<Nanoseconds> out;
    for (const auto& ti : s.instructions)
        if (ti.instruction.tag == kDDPulseTag)
            out.push_back(ti.start);
    return out;
}

Schedule transpile(const Circuit& c, const Mapping& map, Circuit* out = nullptr) {
    auto s = schedule_asap(c, preset_lagos(), map);
    auto r = apply_policy(s, Policy::guidelines());
    if (out)
        *out = to_circuit(r.schedule, c);
    return r.schedule;
}

} // namespace

TEST(Cpmg, ZeroWidthPulses) {
    auto seq = cpmg_fill(400, 0);
    EXPECT_EQ(seq.offsets, (std::vector<Nanoseconds>{100, 300}));
}

TEST(Cpmg, IntegerRoundingGoesToTrailingGap) {
    auto seq = cpmg_fill(400, 35);
    EXPECT_EQ(seq.offsets, (std::vector<Nanoseconds>{82, 282}));
    EXPECT_EQ(seq.gaps(), (std::vector<Nanoseconds>{82, 165, 83}));
    auto g = seq.gaps();
    EXPECT_EQ(g[0] + g[1] + g[2], 330);
}

TEST(Cpmg, TooShort) {
    EXPECT_THROW((void)cpmg_fill(60, 35), WindowTooShort);
    EXPECT_NO_THROW((void)cpmg_fill(70, 35));
    EXPECT_THROW((void)cpmg_fill(400, 35, DDOptions{PulseSpacing::Symmetric, 0}), InvariantError);
}

TEST(Cpmg, EdgeAlignedSpacing) {
    auto seq = cpmg_fill(400, 35, DDOptions{PulseSpacing::EdgeAligned, 1});
    EXPECT_EQ(seq.offsets, (std::vector<Nanoseconds>{0, 365}));
}

TEST(Cpmg, RepetitionsScalePulseCount) {
    auto seq = cpmg_fill(1000, 35, DDOptions{PulseSpacing::Symmetric, 3});
    EXPECT_EQ(seq.offsets.size(), 6u);
}

// offsets increase, pulses fit, even count, and the ideal pulses multiply to identity
TEST(Cpmg, SequenceInvariants) {
    for (Nanoseconds d = 0; d < 2000; d += 7)
        for (Nanoseconds tp : {0, 1, 20, 35})
            for (auto spacing : {PulseSpacing::Symmetric, PulseSpacing::EdgeAligned})
                for (std::size_t reps : {1u, 2u, 3u}) {
                    DDOptions opt{spacing, reps};
                    if (d < static_cast<Nanoseconds>(2 * reps) * tp) {
                        EXPECT_THROW((void)cpmg_fill(d, tp, opt), WindowTooShort);
                        continue;
                    }
                    auto seq = cpmg_fill(d, tp, opt);
                    ASSERT_EQ(seq.offsets.size(), 2 * reps);
                    EXPECT_GE(seq.offsets.front(), 0);
                    for (std::size_t i = 1; i < seq.offsets.size(); ++i)
                        EXPECT_GE(seq.offsets[i], seq.offsets[i - 1] + tp);
                    if (tp > 0) {
                        EXPECT_LE(seq.offsets.back() + tp, d);
                    }
                    Nanoseconds sum = 0;
                    for (auto g : seq.gaps()) {
                        EXPECT_GE(g, 0);
                        sum += g;
                    }
                    EXPECT_EQ(sum + static_cast<Nanoseconds>(seq.offsets.size()) * tp, d);
                    Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
                    for (std::size_t i = 0; i < seq.offsets.size(); ++i)
                        u = gates::pauli_x() * u;
                    EXPECT_LE((u - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff(), 1e-15);
                }
}

TEST(InsertDD, SingleOverWholeWindow) {
    auto s = schedule_of(kCnotDelay);
    auto w = idle_windows(s, 0).at(0);
    auto out = insert_dd(s, w, Strategy::SingleDD);
    EXPECT_EQ(pulse_starts(out), (std::vector<Nanoseconds>{35 + 132, 35 + 132 + 35 + 265}));
    EXPECT_EQ(out.makespan, s.makespan);
    EXPECT_TRUE(idle_windows(out, 0).empty());
}

TEST(InsertDD, PerSegmentFourPulses) {
    auto s = schedule_of(kCnotDelay);
    auto out = insert_dd(s, idle_windows(s, 0).at(0), Strategy::PerSegmentDD);
    auto p = pulse_starts(out);
    ASSERT_EQ(p.size(), 4u);
    EXPECT_LT(p[1] + 35, 335 + 1);
    EXPECT_GE(p[2], 335);
}

TEST(InsertDD, ProtectOnlyOneSide) {
    auto s = schedule_of(kCnotDelay);
    auto w = idle_windows(s, 0).at(0);
    auto gate = pulse_starts(insert_dd(s, w, Strategy::ProtectGateOnly));
    auto delay = pulse_starts(insert_dd(s, w, Strategy::ProtectDelayOnly));
    ASSERT_EQ(gate.size(), 2u);
    ASSERT_EQ(delay.size(), 2u);
    EXPECT_TRUE(std::all_of(gate.begin(), gate.end(), [](auto t) { return t + 35 <= 335; }));
    EXPECT_TRUE(std::all_of(delay.begin(), delay.end(), [](auto t) { return t >= 335; }));
}

TEST(InsertDD, PerCnotOnSwapWindow) {
    auto s = schedule_of(kSwap, Mapping{{0, 1, 2}}, true);
    auto w = idle_windows(s, 0).at(0);
    auto p = pulse_starts(insert_dd(s, w, Strategy::PerCnotDD));
    ASSERT_EQ(p.size(), 6u);
    for (int i = 0; i < 3; ++i) {
        const Nanoseconds lo = 35 + 300 * i, hi = lo + 300;
        EXPECT_GE(p[2 * i], lo);
        EXPECT_LE(p[2 * i + 1] + 35, hi);
    }
}

TEST(InsertDD, BaselineIsNoOp) {
    auto s = schedule_of(kCnotDelay);
    auto out = insert_dd(s, idle_windows(s, 0).at(0), Strategy::Baseline);
    EXPECT_EQ(out.instructions, s.instructions);
}

TEST(InsertDD, InapplicableStrategies) {
    auto s = schedule_of(kMotivational);
    auto w = idle_windows(s, 0).at(0);
    EXPECT_THROW((void)insert_dd(s, w, Strategy::PerSegmentDD), InapplicableStrategy);
    EXPECT_THROW((void)insert_dd(s, w, Strategy::PerCnotDD), InapplicableStrategy);
    EXPECT_THROW((void)insert_dd(s, w, Strategy::ProtectDelayOnly), InapplicableStrategy);
    EXPECT_NO_THROW((void)insert_dd(s, w, Strategy::ProtectGateOnly));
}

TEST(InsertDD, ShortSubregionWarnsAndStaysFree) {
    auto c = parse_circuit("qubits 3\nh q0\nbarrier\ncx q1 q2\ndelay 50 q1\ndelay 50 q2\nbarrier\nh q0\nmeasure q0\n");
    c.main_qubit = 0;
    auto s = schedule_asap(c, preset_lagos(), Mapping{{0, 1, 2}});
    std::vector<std::string> warnings;
    auto out = insert_dd(s, idle_windows(s, 0).at(0), Strategy::PerSegmentDD, {}, &warnings);
    EXPECT_EQ(pulse_starts(out).size(), 2u);
    ASSERT_EQ(warnings.size(), 1u);
    EXPECT_NE(warnings[0].find("left free"), std::string::npos);
}

TEST(InsertDD, RejectsBusyWindow) {
    auto s = schedule_of(kMotivational);
    IdleWindow w{0, 0, 100, {}};
    EXPECT_THROW((void)insert_dd(s, w, Strategy::SingleDD), InvariantError);
}

TEST(Policy, GuidelineChoices) {
    const auto p = Policy::guidelines();
    auto choose = [&](const char* text, const Mapping& map, bool dec = false) {
        auto s = schedule_of(text, map, dec);
        auto w = idle_windows(s, 0).at(0);
        auto a = analyze_window(w, s.device);
        return p.choose(a.cls, a.segments);
    };
    EXPECT_EQ(choose(kCnotDelay, Mapping{{0, 1, 2}}), Strategy::PerSegmentDD);
    EXPECT_EQ(choose(kSwap, Mapping{{0, 1, 2}}, true), Strategy::SingleDD);
    EXPECT_EQ(choose(kCnotDelay, Mapping{{0, 4, 5}}), Strategy::SingleDD);
    EXPECT_EQ(choose(kSwap, Mapping{{0, 4, 5}}, true), Strategy::SingleDD);
    EXPECT_EQ(choose(kMotivational, Mapping{{0, 1, 2}}), Strategy::SingleDD);
}

TEST(Policy, ParseRenderRoundTrip) {
    const char* text = "# comment\ncrosstalk multi -> per_segment\ncrosstalk gate_only -> single\nidle * -> single\n";
    auto p = parse_policy(text);
    ASSERT_EQ(p.rules.size(), 3u);
    EXPECT_EQ(render_policy(p), "crosstalk multi -> per_segment\ncrosstalk gate_only -> single\nidle * -> single\n");
    EXPECT_EQ(render_policy(parse_policy(render_policy(Policy::guidelines()))), render_policy(Policy::guidelines()));
}

TEST(Policy, ParseErrors) {
    try {
        (void)parse_policy("* * -> single\ncrosstalk multi => per_segment\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    EXPECT_THROW((void)parse_policy("* * -> nonsense\n"), ParseError);
    EXPECT_THROW((void)parse_policy("warm * -> single\n"), ParseError);
    EXPECT_THROW((void)parse_policy("* round -> single\n"), ParseError);
}

TEST(Policy, MustBeTotal) {
    EXPECT_THROW((void)parse_policy("crosstalk * -> single\n"), ParseError);
    EXPECT_THROW((void)parse_policy("crosstalk * -> single\nidle multi -> single\nidle gate_only -> single\n"),
                 ParseError);
    EXPECT_NO_THROW((void)parse_policy(
        "crosstalk * -> single\nidle multi -> single\nidle gate_only -> single\nidle free_only -> baseline\n"));
    EXPECT_NO_THROW((void)parse_policy("* * -> baseline\n"));
}

TEST(Policy, InapplicableChoiceFallsBackToSingle) {
    auto s = schedule_of(kMotivational);
    auto r = apply_policy(s, parse_policy("* * -> per_cnot\n"));
    ASSERT_EQ(r.decisions.size(), 1u);
    EXPECT_EQ(r.decisions[0].strategy, Strategy::SingleDD);
    EXPECT_EQ(r.decisions[0].pulses, 2u);
    ASSERT_EQ(r.decisions[0].warnings.size(), 1u);
    EXPECT_NE(r.decisions[0].warnings[0].find("using single"), std::string::npos);
}

TEST(ApplyStrategy, StrictThrowsLenientSkips) {
    auto s = schedule_of(kMotivational);
    EXPECT_THROW((void)apply_strategy(s, Strategy::PerSegmentDD, true), InapplicableStrategy);
    auto r = apply_strategy(s, Strategy::PerSegmentDD, false);
    EXPECT_EQ(r.schedule.instructions, s.instructions);
    ASSERT_EQ(r.decisions.size(), 1u);
    EXPECT_EQ(r.decisions[0].strategy, Strategy::Baseline);
    EXPECT_FALSE(r.decisions[0].warnings.empty());
}

TEST(DecisionsCsv, Format) {
    auto r = apply_policy(schedule_of(kCnotDelay), Policy::guidelines());
    EXPECT_EQ(decisions_csv(r.decisions), "qubit,start_ns,end_ns,class,segments,strategy,pulses,warnings\n"
                                          "0,35,635,crosstalk,gate:300;free:300,per_segment,4,\n");
}

TEST(Targets, MainQubitOrAllActive) {
    auto s = schedule_of(kMotivational, Mapping{{0, 4, 5}});
    EXPECT_EQ(dd_targets(s), std::vector<std::size_t>{0});
    s.main_qubit.reset();
    EXPECT_EQ(dd_targets(s), (std::vector<std::size_t>{0, 4, 5}));
}

TEST(ToCircuit, ProtectDelayIsPaddedSoReschedulingMatches) {
    auto c = parse_circuit(kCnotDelay);
    c.main_qubit = 0;
    const Mapping map{{0, 1, 2}};
    auto s = schedule_asap(c, preset_lagos(), map);
    auto filled = apply_strategy(s, Strategy::ProtectDelayOnly, true).schedule;
    auto again = schedule_asap(to_circuit(filled, c), preset_lagos(), map);
    EXPECT_EQ(pulse_starts(again), pulse_starts(filled));
    EXPECT_EQ(again.makespan, filled.makespan);
}

TEST(ToCircuit, RenderedPulsesOnLogicalQubit) {
    auto c = parse_circuit(kMotivational);
    c.main_qubit = 0;
    Circuit out;
    (void)transpile(c, Mapping{{0, 4, 5}}, &out);
    auto text = render_circuit(out);
    std::size_t n = 0;
    for (std::size_t pos = 0; (pos = text.find("x q0 @tag=dd-pulse", pos)) != std::string::npos; ++pos)
        ++n;
    EXPECT_EQ(n, 2u);
}

// Makespan and original start times survive the pass; the emitted circuit
// reschedules to the same layout; a second pass adds nothing; pulse counts are even.
TEST(PassProperties, ThousandRandomCircuits) {
    std::mt19937_64 rng(31);
    const auto dev = preset_lagos();
    const std::vector<Mapping> maps{Mapping{{0, 1, 2, 3}}, Mapping{{0, 4, 5, 6}}, Mapping{{5, 3, 1, 0}}};
    for (int trial = 0; trial < 1000; ++trial) {
        const auto& map = maps[trial % maps.size()];
        auto c = test::random_circuit(rng, dev, map, 4, 20);
        if (trial % 2)
            c.main_qubit = static_cast<std::size_t>(rng() % 4);
        auto s = schedule_asap(c, dev, map);
        auto r = apply_policy(s, Policy::guidelines());

        ASSERT_EQ(r.schedule.makespan, s.makespan);
        for (const auto& ti : s.instructions) {
            auto it = std::find_if(r.schedule.instructions.begin(), r.schedule.instructions.end(),
                                   [&](const TimedInstruction& x) { return x.source == ti.source; });
            ASSERT_NE(it, r.schedule.instructions.end());
            EXPECT_EQ(it->start, ti.start);
        }
        for (const auto& d : r.decisions)
            EXPECT_EQ(d.pulses % 2, 0u);
        // no two instructions overlap on a qubit after filling
        for (auto q : r.schedule.active_qubits) {
            Nanoseconds prev_end = 0;
            for (const auto& ti : r.schedule.instructions)
                if (ti.instruction.acts_on(q) && ti.duration > 0) {
                    EXPECT_GE(ti.start, prev_end);
                    prev_end = ti.end();
                }
        }

        Circuit out;
        (void)transpile(c, map, &out);
        auto re = schedule_asap(out, dev, map);
        EXPECT_EQ(pulse_starts(re), pulse_starts(r.schedule));
        EXPECT_EQ(re.makespan, s.makespan);

        Circuit twice;
        (void)transpile(out, map, &twice);
        EXPECT_EQ(twice, out) << render_circuit(c);
        EXPECT_EQ(parse_circuit(render_circuit(out)).instructions, out.instructions);
    }
}
