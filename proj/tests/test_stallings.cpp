#include <catch2/catch_amalgamated.hpp>
#include <set>

#include "nbg/stallings.hpp"
#include "nbg/synthesis.hpp"
#include "support.hpp"

using namespace nbg::stallings;
using nbg::Multigraph;
using nbg::VertexId;

namespace {

/// Full labeling pipeline on a graph with even degrees <= 2r.
LabeledGraph pipeline(const Multigraph& g, std::uint32_t r, VertexId basepoint = 0) {
    const auto aug = augment_loops(g, r);
    const auto factors = two_factorize(aug.graph, r);
    return strip_loops(label(aug.graph, factors, basepoint), aug.added_loops);
}

LabeledGraph cycle_reading_a1(VertexId n) {
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (VertexId i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
    std::vector<Letter> labels;
    for (VertexId i = 0; i < n; ++i) {
        labels.push_back(1);
        labels.push_back(-1);
    }
    return LabeledGraph{Multigraph(n, std::move(edges)), 0, std::move(labels)};
}

}  // namespace

TEST_CASE("word reduction") {
    CHECK(is_reduced({}));
    CHECK(is_reduced({1, 2, -1}));
    CHECK_FALSE(is_reduced({1, -1}));
    CHECK_FALSE(is_reduced({2, 1, -1, 2}));
    CHECK_FALSE(is_reduced({0}));
    CHECK(reduce({1, 2, -2, 3}) == Word{1, 3});
    CHECK(reduce({1, -1}) == Word{});
    CHECK(reduce({1, 2, -2, -1, 2}) == Word{2});
    CHECK_THROWS_AS(reduce({1, 0}), std::invalid_argument);
    CHECK(inverse({1, 2, -3}) == Word{3, -2, -1});
}

TEST_CASE("augment_loops on the pinned examples") {
    const auto c4 = augment_loops(testsup::cycle_graph(4), 2);
    CHECK(c4.added_loops.size() == 4);
    for (VertexId v = 0; v < 4; ++v) CHECK(c4.graph.degree(v) == 4);
    CHECK(c4.graph.edge(0) == std::pair<VertexId, VertexId>{0, 1});  // originals first

    const auto k5 = augment_loops(nbg::complete_graph(5), 2);
    CHECK(k5.added_loops.empty());
    CHECK(k5.graph.edge_count() == 10);

    CHECK_THROWS_AS(augment_loops(testsup::path_graph(3), 2), std::invalid_argument);
    CHECK_THROWS_AS(augment_loops(testsup::rose(3), 2), std::invalid_argument);
    try {
        augment_loops(testsup::path_graph(2), 2);
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("vertex 0") != std::string::npos);
    }
}

TEST_CASE("augment_loops adds exactly the loop-count identity") {
    const std::vector<std::pair<Multigraph, std::uint32_t>> cases = {
        {testsup::cycle_graph(6), 2},
        {testsup::cycle_graph(6), 3},
        {testsup::dumbbell(), 3},
        {nbg::complete_graph(5), 3},
    };
    for (const auto& [g, r] : cases) {
        std::size_t total_degree = 0;
        for (VertexId v = 0; v < g.vertex_count(); ++v) total_degree += g.degree(v);
        const auto aug = augment_loops(g, r);
        CHECK(aug.added_loops.size() ==
              (2ull * r * g.vertex_count() - total_degree) / 2);
        for (VertexId v = 0; v < g.vertex_count(); ++v) CHECK(aug.graph.degree(v) == 2 * r);
    }
}

TEST_CASE("two_factorize splits into spanning 2-regular factors") {
    const auto check_factors = [](const Multigraph& g, std::uint32_t r) {
        const auto factors = two_factorize(g, r);
        REQUIRE(factors.size() == r);
        std::vector<int> seen(g.edge_count(), 0);
        for (const auto& factor : factors) {
            std::vector<int> ends(g.vertex_count(), 0);
            for (auto e : factor) {
                ++seen[e];
                const auto [u, v] = g.edge(e);
                ++ends[u];
                ++ends[v];
            }
            for (VertexId v = 0; v < g.vertex_count(); ++v) CHECK(ends[v] == 2);
        }
        for (auto s : seen) CHECK(s == 1);
    };
    check_factors(testsup::rose(2), 2);
    check_factors(augment_loops(testsup::cycle_graph(4), 2).graph, 2);
    check_factors(nbg::complete_graph(5), 2);
    check_factors(nbg::complete_graph(7), 3);
    check_factors(testsup::dumbbell(), 2);
    check_factors(testsup::banana(4), 2);

    CHECK_THROWS_AS(two_factorize(testsup::cycle_graph(4), 2), std::invalid_argument);
    CHECK_THROWS_AS(two_factorize(Multigraph(2, {{0, 0}, {0, 0}, {1, 1}, {1, 1}}), 2),
                    std::invalid_argument);
}

TEST_CASE("label gives the rose its letters in factor order") {
    const auto factors = two_factorize(testsup::rose(2), 2);
    const LabeledGraph l = label(testsup::rose(2), factors, 0);
    CHECK(check_folded(l));
    std::multiset<Letter> letters(l.side_labels.begin(), l.side_labels.end());
    CHECK(letters == std::multiset<Letter>{-2, -1, 1, 2});
}

TEST_CASE("label output is always folded, deterministic and codeterministic") {
    const std::vector<std::pair<Multigraph, std::uint32_t>> cases = {
        {testsup::cycle_graph(4), 2}, {nbg::complete_graph(5), 2},
        {testsup::dumbbell(), 2},     {testsup::cycle_graph(3), 2},
        {nbg::complete_graph(7), 3},  {testsup::banana(2), 2},
    };
    for (const auto& [g, r] : cases) {
        const auto aug = augment_loops(g, r);
        const auto factors = two_factorize(aug.graph, r);
        const LabeledGraph l = label(aug.graph, factors, 0);
        CHECK(check_folded(l));
        // Codeterministic: every letter enters each vertex exactly once.
        for (VertexId v = 0; v < l.graph.vertex_count(); ++v) {
            std::multiset<Letter> out_letters;
            for (auto s : l.graph.sides(v)) out_letters.insert(l.side_labels[s]);
            for (std::uint32_t k = 1; k <= r; ++k) {
                CHECK(out_letters.count(Letter(k)) == 1);
                CHECK(out_letters.count(-Letter(k)) == 1);
            }
        }
    }
}

TEST_CASE("label rejects non-partitions") {
    const Multigraph g = testsup::rose(2);
    CHECK_THROWS_AS(label(g, {{0}, {0}}, 0), std::invalid_argument);
    CHECK_THROWS_AS(label(g, {{0}}, 0), std::invalid_argument);
    CHECK_THROWS_AS(label(g, {{0}, {1}}, 5), std::invalid_argument);
}

TEST_CASE("strip_loops removes exactly the scaffolding") {
    const Multigraph c4 = testsup::cycle_graph(4);
    const auto aug = augment_loops(c4, 2);
    const auto l_full = label(aug.graph, two_factorize(aug.graph, 2), 0);
    const LabeledGraph l = strip_loops(l_full, aug.added_loops);
    CHECK(l.graph.edge_count() == 4);
    CHECK(l.graph.edges() == c4.edges());
    CHECK(check_folded(l));
    // All four original edges carry the same generator, oriented around.
    for (VertexId v = 0; v < 4; ++v) {
        std::multiset<Letter> at;
        for (auto s : l.graph.sides(v)) at.insert(l.side_labels[s]);
        CHECK(at.size() == 2);
        CHECK(*at.begin() == -*at.rbegin());
    }
    CHECK_THROWS_AS(strip_loops(l_full, {0}), std::invalid_argument);
    std::vector<nbg::EdgeId> wrong = aug.added_loops;
    wrong.pop_back();
    CHECK_THROWS_AS(strip_loops(l_full, wrong), std::invalid_argument);
    // No loops added: strip is the identity.
    const LabeledGraph k5 = pipeline(nbg::complete_graph(5), 2);
    CHECK(k5.graph.edge_count() == 10);
}

TEST_CASE("check_folded spots conflicts") {
    CHECK(check_folded(LabeledGraph{Multigraph(1, {}), 0, {}}));
    const Multigraph g(2, {{0, 1}, {0, 1}});
    CHECK_FALSE(check_folded(LabeledGraph{g, 0, {1, -1, 1, -1}}));
    CHECK(check_folded(LabeledGraph{g, 0, {1, -1, -2, 2}}));
}

TEST_CASE("free_basis on the pinned examples") {
    const auto factors = two_factorize(testsup::rose(2), 2);
    const auto rose_basis = free_basis(label(testsup::rose(2), factors, 0));
    REQUIRE(rose_basis.size() == 2);
    CHECK(rose_basis[0] == Word{1});
    CHECK(rose_basis[1] == Word{2});

    const auto c3_basis = free_basis(cycle_reading_a1(3));
    REQUIRE(c3_basis.size() == 1);
    CHECK(c3_basis[0] == Word{1, 1, 1});

    const LabeledGraph k5 = pipeline(nbg::complete_graph(5), 2);
    const auto basis = free_basis(k5);
    REQUIRE(basis.size() == 6);  // 10 - 5 + 1
    std::set<Word> distinct(basis.begin(), basis.end());
    CHECK(distinct.size() == 6);
    for (const auto& w : basis) {
        CHECK(!w.empty());
        CHECK(is_reduced(w));
        CHECK(membership(k5, w));
    }
    CHECK_THROWS_AS(free_basis(LabeledGraph{Multigraph(2, {{0, 1}, {0, 1}}), 0, {1, -1, 1, -1}}),
                    std::invalid_argument);
}

TEST_CASE("membership traces words") {
    const LabeledGraph rose = pipeline(testsup::rose(2), 2);
    CHECK(membership(rose, {}));
    CHECK(membership(rose, {1, -2}));
    const LabeledGraph c3 = cycle_reading_a1(3);
    CHECK_FALSE(membership(c3, {1}));
    CHECK_FALSE(membership(c3, {1, 1}));
    CHECK(membership(c3, {1, 1, 1}));
    CHECK(membership(c3, {-1, -1, -1}));
    CHECK_FALSE(membership(c3, {2}));
    CHECK_THROWS_AS(membership(c3, {1, -1}), std::invalid_argument);
}

TEST_CASE("ball counts on the pinned examples") {
    const LabeledGraph rose = pipeline(testsup::rose(2), 2);
    const auto rose_gamma = ball_count(rose, 2);
    CHECK(rose_gamma == std::vector<nbg::BigInt>{1, 5, 17});

    const auto c3_gamma = ball_count(cycle_reading_a1(3), 7);
    CHECK(c3_gamma == std::vector<nbg::BigInt>{1, 1, 1, 3, 3, 3, 5, 5});

    // Not core: a hanging vertex away from the basepoint.
    CHECK_THROWS_AS(ball_count(LabeledGraph{testsup::path_graph(2), 0, {1, -1}}, 3),
                    std::invalid_argument);
    // The basepoint itself may have degree 1 (lollipop core).
    const Multigraph lollipop(4, {{0, 1}, {1, 2}, {2, 3}, {3, 1}});
    const LabeledGraph lolli{lollipop, 0, {1, -1, 2, -2, 1, -1, 2, -2}};
    REQUIRE(check_folded(lolli));
    CHECK_NOTHROW(ball_count(lolli, 4));
}

TEST_CASE("ball counts match exhaustive enumeration on small cores") {
    const std::vector<Multigraph> corpus = {
        testsup::rose(2),
        testsup::cycle_graph(3),
        testsup::cycle_graph(4),
        testsup::banana(2),
        testsup::dumbbell(),
        testsup::banana(4),
        testsup::cycle_graph(6),
        // Bowtie: two triangles sharing vertex 0.
        Multigraph(5, {{0, 1}, {1, 2}, {2, 0}, {0, 3}, {3, 4}, {4, 0}}),
        // Doubled C4.
        Multigraph(4,
                   {{0, 1}, {0, 1}, {1, 2}, {1, 2}, {2, 3}, {2, 3}, {3, 0}, {3, 0}}),
    };
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        REQUIRE(corpus[i].edge_count() <= 8);
        const LabeledGraph l = pipeline(corpus[i], 2);
        INFO("corpus entry " << i);
        CHECK(ball_count(l, 6) == testsup::brute_ball_count(l, 2, 6));
    }
}

TEST_CASE("subgroup_report on the pinned examples") {
    const auto rose_rep = subgroup_report(testsup::rose(2), 2, 0, 20);
    CHECK(rose_rep.rank == 2);
    CHECK(rose_rep.omega_estimate == Catch::Approx(3.0).margin(1e-6));
    CHECK(rose_rep.lambda.encloses(3.0));
    CHECK(rose_rep.gamma[0] == 1);
    for (std::size_t k = 1; k < rose_rep.gamma.size(); ++k)
        CHECK(rose_rep.gamma[k] >= rose_rep.gamma[k - 1]);

    const auto c6_rep = subgroup_report(testsup::cycle_graph(6), 2, 0, 60);
    CHECK(c6_rep.rank == 1);
    CHECK(c6_rep.omega_estimate == Catch::Approx(1.0).margin(1e-9));
    CHECK(c6_rep.lambda.lower == 1.0);
    CHECK(c6_rep.lambda.upper == 1.0);
    REQUIRE(c6_rep.generators.size() == 1);
    CHECK(c6_rep.generators[0].size() == 6);
}

TEST_CASE("subgroup_report agrees with the spectral midpoint on a synthesized graph") {
    const auto out = nbg::synthesize(2, 1.5, 0.3, 7);
    REQUIRE(out.status == nbg::SynthStatus::ok);
    const auto rep = subgroup_report(out.certificate->graph, 2, 0, 60);
    CHECK(rep.rank == out.certificate->graph.edge_count() -
                          out.certificate->graph.vertex_count() + 1);
    CHECK(std::abs(rep.omega_estimate - rep.lambda.midpoint()) <= 0.05);
    for (const auto& w : rep.generators) {
        CHECK(is_reduced(w));
        CHECK(membership(rep.core, w));
    }
}

TEST_CASE("subgroup_report rejects bad graphs with named vertices") {
    try {
        subgroup_report(testsup::path_graph(3), 2, 0, 10);
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("degree") != std::string::npos);
    }
    CHECK_THROWS_AS(subgroup_report(nbg::complete_graph(4), 2, 0, 10), std::invalid_argument);
    CHECK_THROWS_AS(subgroup_report(testsup::cycle_graph(4), 2, 9, 10), std::invalid_argument);
}

TEST_CASE("subgroup_report is deterministic") {
    const auto a = subgroup_report(nbg::complete_graph(5), 2, 0, 30);
    const auto b = subgroup_report(nbg::complete_graph(5), 2, 0, 30);
    CHECK(a.generators == b.generators);
    CHECK(a.gamma == b.gamma);
    CHECK(a.omega_estimate == b.omega_estimate);
}
