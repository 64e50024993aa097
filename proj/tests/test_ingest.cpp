#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

using namespace ultrabase;
using namespace ultrabase::test;

namespace {

std::string golden(const std::string& name) {
    std::ifstream in(std::string(ULTRABASE_GOLDEN_DIR) + "/" + name, std::ios::binary);
    if (!in) {
        throw std::runtime_error("missing golden file " + name);
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

TEST(ParseDistanceCsv, UniformBody) {
    const auto s = parse_distance_csv(golden("uniform3.csv"));
    EXPECT_EQ(s.size(), 3u);
    EXPECT_EQ(s.table().size(), 1u);
    EXPECT_EQ(dimensions(s).dim1, 2u);
}

TEST(ParseDistanceCsv, SixDecimalInverseMin) {
    const auto s = parse_distance_csv(golden("inverse_min4.csv"), {1e-9, 16});
    ASSERT_EQ(s.table().size(), 3u);
    EXPECT_EQ(std::vector<std::string>(s.table().texts().begin(), s.table().texts().end()),
              (std::vector<std::string>{"0.333333", "0.500000", "1.000000"}));
    // Same rank structure as the exact 1/min space.
    const auto exact = inverse_min_space(4);
    EXPECT_EQ(std::vector<Rank>(s.ranks().begin(), s.ranks().end()),
              std::vector<Rank>(exact.ranks().begin(), exact.ranks().end()));
}

TEST(ParseDistanceCsv, ViolationCarriesWitness) {
    try {
        parse_distance_csv(golden("violating.csv"));
        FAIL();
    } catch (const NotUltrametric& e) {
        ASSERT_FALSE(e.report().violations.empty());
        EXPECT_EQ(e.report().violations[0].labels, (std::vector<std::string>{"1", "2", "3"}));
    }
}

TEST(ParseDistanceCsv, MalformedInput) {
    EXPECT_THROW(parse_distance_csv(""), InputError);
    EXPECT_THROW(parse_distance_csv("label,a,b\na,0,1\n"), InputError);
    EXPECT_THROW(parse_distance_csv("label,a,b\na,0,1\nb,1\n"), InputError);
    EXPECT_THROW(parse_distance_csv("label,a,b\na,0,1\nc,1,0\n"), InputError);
    EXPECT_THROW(parse_distance_csv("label,a,b\na,0,x\nb,1,0\n"), InputError);
    // Asymmetry and nonzero diagonal are ultrametric violations, not parse errors.
    EXPECT_THROW(parse_distance_csv("label,a,b\na,0,1\nb,2,0\n"), NotUltrametric);
    EXPECT_THROW(parse_distance_csv("label,a,b\na,1,1\nb,1,0\n"), NotUltrametric);
}

TEST(ParseDistanceCsv, ToleratesCrlfAndBlankLines) {
    const auto s = parse_distance_csv("label,a,b\r\na,0,1.5\r\n\r\nb,1.5,0\r\n\n");
    EXPECT_EQ(s.text(0, 1), "1.5");
}

TEST(ParseDistanceCsv, AsymmetryWithinEpsilonIsAccepted) {
    EXPECT_NO_THROW(parse_distance_csv("label,a,b\na,0,1\nb,1.0000000001,0\n", {1e-9, 16}));
}

TEST(WriteDistanceCsv, RoundTrips) {
    for (const auto& s : {uniform_space(3), inverse_min_space(4), random_dendrogram_space(32, 5, 6)}) {
        const auto text = write_distance_csv(s);
        const auto back = parse_distance_csv(text);
        EXPECT_EQ(back, s);
        EXPECT_EQ(write_distance_csv(back), text);
    }
}

TEST(WriteDistanceCsv, GoldenIsByteStable) {
    const auto text = golden("inverse_min4.csv");
    EXPECT_EQ(write_distance_csv(parse_distance_csv(text)), text);
    const auto uniform = golden("uniform4.csv");
    EXPECT_EQ(write_distance_csv(parse_distance_csv(uniform)), uniform);
}

TEST(CoordinateCsv, RoundTrips) {
    const auto s = inverse_min_space(4);
    const auto table = coordinates(s, pts(s, {"3", "1"}));
    const auto text = write_coordinate_csv(table);
    EXPECT_EQ(text.substr(0, text.find('\n')), "label,1,3");
    EXPECT_EQ(parse_coordinate_csv(text), table);
}

TEST(ParseNewick, BalancedFourLeaves) {
    const auto s = parse_newick(golden("balanced4.nwk"));
    EXPECT_EQ(write_distance_csv(s), golden("balanced4_distances.csv"));
    EXPECT_DOUBLE_EQ(s.value(s.at("A"), s.at("B")), 2.0);
    EXPECT_DOUBLE_EQ(s.value(s.at("C"), s.at("D")), 2.0);
    for (const char* x : {"A", "B"}) {
        for (const char* y : {"C", "D"}) {
            EXPECT_DOUBLE_EQ(s.value(s.at(x), s.at(y)), 4.0);
        }
    }
    EXPECT_TRUE(partners_by_definition(s, s.at("A"), s.at("B")));
    EXPECT_TRUE(partners_by_definition(s, s.at("C"), s.at("D")));
    const auto d = dimensions(s);
    EXPECT_EQ(d.dim1, 2u);
    EXPECT_EQ(d.dim2, 4u);
}

TEST(ParseNewick, TwoLeaves) {
    const auto s = parse_newick("(A:1,B:1);");
    ASSERT_EQ(s.size(), 2u);
    EXPECT_DOUBLE_EQ(s.value(0, 1), 2.0);
}

TEST(ParseNewick, InternalLabelsRootLengthAndWhitespace) {
    const auto s = parse_newick(" ( (A:0.5, B:0.5)ab:1.5 , C:2 )root:3 ;\n");
    EXPECT_EQ(s.size(), 3u);
    EXPECT_DOUBLE_EQ(s.value(s.at("A"), s.at("B")), 1.0);
    EXPECT_DOUBLE_EQ(s.value(s.at("A"), s.at("C")), 4.0);
}

TEST(ParseNewick, Errors) {
    EXPECT_THROW(parse_newick("(A:1,B:2);"), DomainError);
    EXPECT_THROW(parse_newick("(A:1,B:1)"), InputError);
    EXPECT_THROW(parse_newick("(A:1,B);"), InputError);
    EXPECT_THROW(parse_newick("(A:1,A:1);"), InputError);
    EXPECT_THROW(parse_newick("(A:1);"), InputError);
    EXPECT_THROW(parse_newick("(A:-1,B:-1);"), InputError);
    EXPECT_THROW(parse_newick("(A:1,B:1);x"), InputError);
    EXPECT_THROW(parse_newick("(A:1,:1);"), InputError);
    EXPECT_THROW(parse_newick("(A:1,B:1)[c];"), InputError);
    try {
        parse_newick("(A:1,B:x);");
        FAIL();
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("position 7"), std::string::npos) << e.what();
    }
}

TEST(ParseNewick, EpsilonAbsorbsRoundingNoise) {
    EXPECT_NO_THROW(parse_newick("((A:0.1,B:0.1):0.2,C:0.3);"));
    EXPECT_THROW(parse_newick("((A:0.1,B:0.1):0.2,C:0.3);", 0.0), DomainError);
}

TEST(ParseNewick, EquidistantTreesAreUltrametric) {
    // Random caterpillar/balanced trees built as text from random dendrograms.
    std::mt19937 rng(3);
    for (int round = 0; round < 20; ++round) {
        const std::size_t leaves = 2 + rng() % 12;
        std::vector<std::pair<std::string, double>> nodes; // (text, height)
        for (std::size_t i = 0; i < leaves; ++i) {
            nodes.emplace_back("L" + std::to_string(i), 0.0);
        }
        double height = 0.0;
        while (nodes.size() > 1) {
            height += 0.25 * (1 + rng() % 4);
            const std::size_t i = rng() % nodes.size();
            auto a = nodes[i];
            nodes.erase(nodes.begin() + static_cast<std::ptrdiff_t>(i));
            const std::size_t j = rng() % nodes.size();
            auto b = nodes[j];
            nodes.erase(nodes.begin() + static_cast<std::ptrdiff_t>(j));
            nodes.emplace_back("(" + a.first + ":" + Decimal::shortest_text(height - a.second) + "," + b.first + ":" +
                                   Decimal::shortest_text(height - b.second) + ")",
                               height);
        }
        const auto s = parse_newick(nodes[0].first + ";");
        EXPECT_EQ(s.size(), leaves);
    }
}

TEST(SubdominantUltrametric, AlreadyUltrametricIsUnchanged) {
    const auto s = inverse_min_space(5);
    const auto text = write_distance_csv(s);
    EXPECT_EQ(subdominant_ultrametric(parse_distance_csv_raw(text)), s);
}

TEST(SubdominantUltrametric, MinimaxPath) {
    RawMatrix m{{"1", "2", "3"}, {{"0", "1", "5"}, {"1", "0", "2"}, {"5", "2", "0"}}};
    const auto s = subdominant_ultrametric(m);
    EXPECT_EQ(s.text(s.at("1"), s.at("3")), "2");
    EXPECT_EQ(s.text(s.at("1"), s.at("2")), "1");
}

TEST(SubdominantUltrametric, RejectsMalformed) {
    EXPECT_THROW(subdominant_ultrametric(RawMatrix{{"1", "2"}, {{"0", "1"}, {"2", "0"}}}), InputError);
    EXPECT_THROW(subdominant_ultrametric(RawMatrix{{"1", "2"}, {{"1", "1"}, {"1", "1"}}}), InputError);
    EXPECT_THROW(subdominant_ultrametric(RawMatrix{{"1", "2"}, {{"0", "-1"}, {"-1", "0"}}}), InputError);
    EXPECT_THROW(subdominant_ultrametric(RawMatrix{{"1"}, {{"0"}}}), InputError);
}

TEST(SubdominantUltrametric, RandomEuclideanPoints) {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> coord(0.0, 10.0);
    for (int round = 0; round < 10; ++round) {
        const std::size_t n = 3 + round * 2;
        std::vector<std::pair<double, double>> p(n);
        for (auto& q : p) {
            q = {coord(rng), coord(rng)};
        }
        std::vector<std::string> labels;
        std::vector<std::vector<double>> d(n, std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i) {
            labels.push_back("q" + std::to_string(i));
            for (std::size_t j = 0; j < n; ++j) {
                d[i][j] = std::hypot(p[i].first - p[j].first, p[i].second - p[j].second);
            }
        }
        const auto raw = RawMatrix::from_values(labels, d);
        const auto s = subdominant_ultrametric(raw);
        ASSERT_TRUE(validate_ranks(s.labels(), s.table(), s.ranks()).ok);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                ASSERT_LE(s.value(i, j), d[i][j]);
            }
        }
        // Idempotent.
        EXPECT_EQ(subdominant_ultrametric(parse_distance_csv_raw(write_distance_csv(s))), s);
        // Maximal: for every pair, some path in the input has max step equal to d*(i,j)
        // (checked via the minimum spanning tree bottleneck, computed independently).
        std::vector<double> key(n, std::numeric_limits<double>::infinity());
        std::vector<bool> in_tree(n, false);
        std::vector<std::size_t> parent(n, n);
        key[0] = 0.0;
        for (std::size_t it = 0; it < n; ++it) {
            std::size_t u = n;
            for (std::size_t v = 0; v < n; ++v) {
                if (!in_tree[v] && (u == n || key[v] < key[u])) {
                    u = v;
                }
            }
            in_tree[u] = true;
            for (std::size_t v = 0; v < n; ++v) {
                if (!in_tree[v] && d[u][v] < key[v]) {
                    key[v] = d[u][v];
                    parent[v] = u;
                }
            }
        }
        std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
        for (std::size_t v = 1; v < n; ++v) {
            adj[v].emplace_back(parent[v], d[v][parent[v]]);
            adj[parent[v]].emplace_back(v, d[v][parent[v]]);
        }
        for (std::size_t src = 0; src < n; ++src) {
            std::vector<double> bottleneck(n, -1.0);
            bottleneck[src] = 0.0;
            std::vector<std::size_t> stack{src};
            while (!stack.empty()) {
                const auto u = stack.back();
                stack.pop_back();
                for (auto [v, w] : adj[u]) {
                    if (bottleneck[v] < 0.0) {
                        bottleneck[v] = std::max(bottleneck[u], w);
                        stack.push_back(v);
                    }
                }
            }
            for (std::size_t v = 0; v < n; ++v) {
                ASSERT_EQ(s.value(src, v), bottleneck[v]);
            }
        }
    }
}
