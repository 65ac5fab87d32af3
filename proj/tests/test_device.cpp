#include "ddweaver/device.hpp"
#include "ddweaver/error.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ddweaver;

TEST(Lagos, Topology) {
    auto d = preset_lagos();
    EXPECT_EQ(d.n_qubits, 7u);
    EXPECT_EQ(d.edges.size(), 6u);
    EXPECT_EQ(d.neighbors(0), std::vector<std::size_t>{1});
    // the five spectator pairs listed for Q0 are all couplings
    for (auto [a, b] : {std::pair{1, 2}, {1, 3}, {3, 5}, {4, 5}, {5, 6}})
        EXPECT_TRUE(d.has_edge(a, b)) << a << "-" << b;
    EXPECT_FALSE(d.has_edge(0, 2));
}

TEST(Lagos, Defaults) {
    auto d = preset_lagos();
    EXPECT_NO_THROW(d.validate());
    EXPECT_EQ(d.dur_1q, 35);
    EXPECT_EQ(d.dur_measure, 700);
    EXPECT_EQ(d.pulse, 35);
    for (const auto& e : d.edges) {
        EXPECT_EQ(d.cx_duration(e.a, e.b), 300);
        EXPECT_DOUBLE_EQ(d.zz(e.a, e.b), 14.6);
    }
    EXPECT_DOUBLE_EQ(d.cr_shift_khz, 14.2);
    for (std::size_t q = 0; q < 7; ++q)
        EXPECT_LE(d.t2_us[q], 2 * d.t1_us[q]);
}

TEST(Lagos, CxDurationOnNonEdgeThrows) {
    EXPECT_THROW((void)preset_lagos().cx_duration(0, 2), UnroutedGateError);
}

TEST(LoadDevice, TopologyOnlyTakesDefaults) {
    auto d = load_device("n_qubits 3\nedge 0 1\nedge 1 2 dur=250 zz=20\n");
    EXPECT_EQ(d.cx_duration(0, 1), DeviceDefaults::dur_cx);
    EXPECT_EQ(d.cx_duration(2, 1), 250);
    EXPECT_DOUBLE_EQ(d.zz(1, 2), 20.0);
    EXPECT_DOUBLE_EQ(d.t1_us[2], DeviceDefaults::t1_us);
    EXPECT_DOUBLE_EQ(d.t2_us[0], DeviceDefaults::t2_us);
}

TEST(LoadDevice, RejectsT2AboveTwiceT1NamingField) {
    try {
        (void)load_device("n_qubits 2\nedge 0 1\nt1 0 100\nt2 0 250\n");
        FAIL();
    } catch (const InvariantError& e) {
        EXPECT_NE(std::string(e.what()).find("t2[0]"), std::string::npos) << e.what();
    }
}

TEST(LoadDevice, MalformedText) {
    EXPECT_THROW((void)load_device("n_qubits 2\nedge 0\n"), ParseError);
    EXPECT_THROW((void)load_device("n_qubits 2\nbogus 1\n"), ParseError);
    EXPECT_THROW((void)load_device("edge 0 1\n"), ParseError);
    EXPECT_THROW((void)load_device("n_qubits 2\nedge 0 5\n"), Error);
    EXPECT_THROW((void)load_device("n_qubits 2\nedge 0 1\npulse 50\n"), InvariantError);
}

TEST(LoadDevice, LagosRoundTrip) {
    auto d = preset_lagos();
    EXPECT_EQ(load_device(render_device(d)), d);
}

TEST(Distance, LagosExamples) {
    auto d = preset_lagos();
    EXPECT_EQ(distance(d, 0, 0), 0u);
    EXPECT_EQ(distance(d, 0, 1), 1u);
    EXPECT_EQ(distance(d, 0, 3), 2u);
    EXPECT_EQ(distance(d, 0, 4), 4u);
    EXPECT_EQ(distance(d, 6, 1), 3u);
}

TEST(Distance, DisconnectedIsUnreachable) {
    auto d = load_device("n_qubits 4\nedge 0 1\nedge 2 3\n");
    EXPECT_FALSE(distance(d, 0, 3).has_value());
    EXPECT_THROW((void)distance(d, 0, 9), Error);
}

// Floyd-Warshall oracle on random graphs; also checks metric axioms.
TEST(Distance, MatchesFloydWarshallAndIsAMetric) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + rng() % 8;
        std::string text = "n_qubits " + std::to_string(n) + "\n";
        const std::size_t inf = 1000;
        std::vector<std::vector<std::size_t>> fw(n, std::vector<std::size_t>(n, inf));
        for (std::size_t i = 0; i < n; ++i)
            fw[i][i] = 0;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b)
                if (rng() % 3 == 0) {
                    text += "edge " + std::to_string(a) + " " + std::to_string(b) + "\n";
                    fw[a][b] = fw[b][a] = 1;
                }
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    fw[i][j] = std::min(fw[i][j], fw[i][k] + fw[k][j]);
        auto d = load_device(text);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                auto dij = distance(d, i, j);
                if (fw[i][j] >= inf) {
                    EXPECT_FALSE(dij.has_value());
                    continue;
                }
                ASSERT_TRUE(dij.has_value());
                EXPECT_EQ(*dij, fw[i][j]);
                EXPECT_EQ(dij, distance(d, j, i));
                EXPECT_EQ(*dij == 0, i == j);
                for (std::size_t k = 0; k < n; ++k) {
                    auto dik = distance(d, i, k), dkj = distance(d, k, j);
                    if (dik && dkj) {
                        EXPECT_LE(*dij, *dik + *dkj);
                    }
                }
            }
    }
}

TEST(Mapping, ParseAndValidate) {
    auto m = Mapping::parse("0,4,5");
    EXPECT_EQ(m.physical, (std::vector<std::size_t>{0, 4, 5}));
    EXPECT_EQ(m.logical_of(4), 1u);
    EXPECT_FALSE(m.logical_of(3).has_value());
    EXPECT_NO_THROW(m.validate(preset_lagos()));
    EXPECT_THROW(Mapping::parse("0,0").validate(preset_lagos()), InvariantError);
    EXPECT_THROW(Mapping::parse("0,9").validate(preset_lagos()), InvariantError);
    EXPECT_THROW((void)Mapping::parse("0,a"), ParseError);
}
