#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "core/error.hpp"
#include "graph/split.hpp"
#include "support/generators.hpp"

using namespace mdne;

namespace {

AttributedNetwork triangle_plus_isolated() {
    // A bare triangle has no non-edges to sample, so one isolated node is added.
    return AttributedNetwork({"a", "b", "c", "d"}, 2, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}},
                             {{{0, 1.0}}, {{1, 1.0}}, {{0, 1.0}}, {{1, 1.0}}});
}

std::set<std::pair<std::size_t, std::size_t>> edge_set(const std::vector<Edge>& edges) {
    std::set<std::pair<std::size_t, std::size_t>> out;
    for (const auto& e : edges) out.insert({e.u, e.v});
    return out;
}

}  // namespace

TEST_CASE("split_links hides one of three triangle edges and samples one negative") {
    const auto net = triangle_plus_isolated();
    const EvalSplit s = split_links(net, 1.0 / 3.0, 5);
    CHECK(s.kind == SplitKind::link_prediction);
    CHECK(s.hidden_edges.size() == 1);
    CHECK(s.negatives.size() == 1);
    CHECK(s.train_network.edge_count() == 2);
    CHECK_FALSE(net.has_edge(s.negatives[0].u, s.negatives[0].v));
}

TEST_CASE("a bare triangle has no negatives to offer") {
    const AttributedNetwork k3({"a", "b", "c"}, 1, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}}, {{}, {}, {}});
    CHECK_THROWS_AS(split_links(k3, 1.0 / 3.0, 5), ValidationError);
}

TEST_CASE("split_links hides round(ratio * l) edges") {
    testing::Rng rng(2);
    const auto net = testing::planted_network(rng, 300, 20, 4, 0.05, 0.005, 0.3, 0.02);
    for (double ratio : {0.05, 0.25, 0.45}) {
        const EvalSplit s = split_links(net, ratio, 11);
        const auto want = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(net.edge_count())));
        CHECK(s.hidden_edges.size() == want);
        CHECK(s.negatives.size() == want);
    }
}

TEST_CASE("split_links is deterministic per seed") {
    testing::Rng rng(3);
    const auto net = testing::planted_network(rng, 60, 10, 3, 0.2, 0.02, 0.3, 0.05);
    const EvalSplit a = split_links(net, 0.3, 99);
    const EvalSplit b = split_links(net, 0.3, 99);
    CHECK(a.hidden_edges == b.hidden_edges);
    CHECK(a.negatives == b.negatives);
    CHECK(a.train_network == b.train_network);
    const EvalSplit c = split_links(net, 0.3, 100);
    CHECK_FALSE((a.hidden_edges == c.hidden_edges && a.negatives == c.negatives));
}

TEST_CASE("split_links partitions the edges and negatives never touch an original edge") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        testing::Rng rng(seed);
        testing::NetworkShape shape;
        shape.n = testing::pick(rng, 6, 12);
        shape.edge_density = 0.4;
        const auto net = testing::random_network(rng, shape);
        if (net.edge_count() < 4) continue;
        const EvalSplit s = split_links(net, 0.3, seed);
        const auto original = edge_set(net.edges());
        const auto train = edge_set(s.train_network.edges());
        const auto hidden = edge_set(s.hidden_edges);
        std::set<std::pair<std::size_t, std::size_t>> joined = train;
        joined.insert(hidden.begin(), hidden.end());
        CHECK(joined == original);
        for (const auto& h : hidden) CHECK_FALSE(train.contains(h));
        // Exhaustive: every negative is a non-edge of the original network.
        std::set<std::pair<std::size_t, std::size_t>> negs;
        for (const auto& p : s.negatives) {
            CHECK(p.u < p.v);
            CHECK_FALSE(original.contains({p.u, p.v}));
            negs.insert({p.u, p.v});
        }
        CHECK(negs.size() == s.negatives.size());
        CHECK(s.negatives.size() == s.hidden_edges.size());
        CHECK(s.train_network.attributes() == net.attributes());
    }
}

TEST_CASE("split_links argument errors") {
    const auto net = triangle_plus_isolated();
    CHECK_THROWS_AS(split_links(net, 0.0, 1), ValidationError);
    CHECK_THROWS_AS(split_links(net, 1.0, 1), ValidationError);
    CHECK_THROWS_AS(split_links(net, 0.1, 1), ValidationError);  // rounds to zero edges
    CHECK_THROWS_AS(split_links(net, 0.99, 1), ValidationError); // would hide all edges
}

TEST_CASE("split_links fails when non-edges run out") {
    std::vector<Edge> edges;
    for (std::size_t u = 0; u < 6; ++u) {
        for (std::size_t v = u + 1; v < 6; ++v) {
            if (!(u == 0 && v == 1)) edges.push_back({u, v, 1.0});
        }
    }
    const AttributedNetwork dense(testing::numbered_ids(6), 1, edges, std::vector<AttributeRow>(6));
    CHECK_THROWS_AS(split_links(dense, 0.4, 1), ValidationError);
}

TEST_CASE("split_attributes hides round(ratio * n * m) cells") {
    const AttributedNetwork net({"a", "b"}, 4, {{0, 1, 1.0}}, {{{0, 1.0}, {2, 1.0}}, {{1, 1.0}}});
    const EvalSplit s = split_attributes(net, 0.25, 3);
    CHECK(s.kind == SplitKind::attribute_prediction);
    CHECK(s.hidden_cells.size() == 2);
}

TEST_CASE("split_attributes: restoring hidden cells gives back the original matrix") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        testing::Rng rng(seed);
        testing::NetworkShape shape;
        shape.n = 10;
        shape.m = 8;
        const auto net = testing::random_network(rng, shape);
        const EvalSplit s = split_attributes(net, 0.3, seed);
        const std::vector<std::size_t> all{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
        Matrix restored = s.train_network.attribute_rows(all);
        bool saw_one = false, saw_zero = false;
        for (const auto& c : s.hidden_cells) {
            CHECK(s.train_network.attribute(c.node, c.attribute) == 0.0);
            CHECK(c.original == net.attribute(c.node, c.attribute));
            restored(c.node, c.attribute) = c.original;
            saw_one = saw_one || c.original == 1.0;
            saw_zero = saw_zero || c.original == 0.0;
        }
        CHECK(restored == net.attribute_rows(all));
        CHECK(saw_one);
        CHECK(saw_zero);
        CHECK(s.train_network.edges() == net.edges());
        CHECK(std::is_sorted(s.hidden_cells.begin(), s.hidden_cells.end(), [](const auto& a, const auto& b) {
            return std::make_pair(a.node, a.attribute) < std::make_pair(b.node, b.attribute);
        }));
    }
}

TEST_CASE("split_attributes is deterministic per seed") {
    testing::Rng rng(8);
    testing::NetworkShape shape;
    shape.n = 9;
    const auto net = testing::random_network(rng, shape);
    CHECK(split_attributes(net, 0.2, 4).hidden_cells == split_attributes(net, 0.2, 4).hidden_cells);
    CHECK_THROWS_AS(split_attributes(net, 1.5, 4), ValidationError);
}
