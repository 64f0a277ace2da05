#include "graph/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <unordered_set>

#include "core/error.hpp"

namespace mdne {
namespace {

void check_ratio(double ratio) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw ValidationError("split ratio must be in (0, 1), got " + std::to_string(ratio));
    }
}

std::uint64_t pair_key(std::size_t u, std::size_t v) {
    return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(v);
}

}  // namespace

EvalSplit split_links(const AttributedNetwork& net, double ratio, std::uint64_t seed) {
    check_ratio(ratio);
    const std::size_t l = net.edge_count();
    const auto hide = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(l)));
    if (hide == 0 || hide >= l) {
        throw ValidationError("network too small to hide " + std::to_string(hide) + " of " +
                              std::to_string(l) + " edges");
    }
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(l);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<bool> hidden(l, false);
    for (std::size_t i = 0; i < hide; ++i) hidden[order[i]] = true;

    EvalSplit split;
    split.kind = SplitKind::link_prediction;
    split.ratio = ratio;
    std::vector<Edge> kept;
    kept.reserve(l - hide);
    for (std::size_t i = 0; i < l; ++i) {
        (hidden[i] ? split.hidden_edges : kept).push_back(net.edges()[i]);
    }

    const std::size_t n = net.node_count();
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::unordered_set<std::uint64_t> chosen;
    const std::size_t cap = 100 * hide;
    std::size_t attempts = 0;
    while (split.negatives.size() < hide) {
        if (attempts++ >= cap) {
            throw ValidationError("could not sample " + std::to_string(hide) +
                                  " unconnected node pairs within " + std::to_string(cap) + " draws");
        }
        std::size_t u = pick(rng);
        std::size_t v = pick(rng);
        if (u == v || net.has_edge(u, v)) continue;
        if (u > v) std::swap(u, v);
        if (!chosen.insert(pair_key(u, v)).second) continue;
        split.negatives.push_back({u, v});
    }

    split.train_network = AttributedNetwork(net.node_ids(), net.attribute_count(), std::move(kept),
                                            net.attributes(), net.labels());
    return split;
}

EvalSplit split_attributes(const AttributedNetwork& net, double ratio, std::uint64_t seed) {
    check_ratio(ratio);
    const std::size_t n = net.node_count();
    const std::size_t m = net.attribute_count();
    const std::size_t cells = n * m;
    const auto hide = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(cells)));
    if (hide == 0 || hide >= cells) {
        throw ValidationError("attribute matrix too small to hide " + std::to_string(hide) + " cells");
    }
    const std::size_t ones = net.nonzero_attribute_count();
    const bool need_both = ones > 0 && ones < cells && hide >= 2;

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> picked;
    constexpr int kMaxDraws = 20;
    for (int draw = 0;; ++draw) {
        if (draw == kMaxDraws) {
            throw ValidationError("hidden attribute cells never covered both values in " +
                                  std::to_string(kMaxDraws) + " draws");
        }
        // Partial Fisher-Yates over the cell indices.
        std::vector<std::size_t> pool(cells);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t i = 0; i < hide; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, cells - 1);
            std::swap(pool[i], pool[pick(rng)]);
        }
        pool.resize(hide);
        std::sort(pool.begin(), pool.end());
        if (!need_both) {
            picked = std::move(pool);
            break;
        }
        bool saw_one = false;
        bool saw_zero = false;
        for (std::size_t c : pool) {
            (net.attribute(c / m, c % m) != 0.0 ? saw_one : saw_zero) = true;
            if (saw_one && saw_zero) break;
        }
        if (saw_one && saw_zero) {
            picked = std::move(pool);
            break;
        }
    }

    EvalSplit split;
    split.kind = SplitKind::attribute_prediction;
    split.ratio = ratio;
    split.hidden_cells.reserve(hide);
    std::vector<AttributeRow> rows = net.attributes();
    for (std::size_t c : picked) {
        const std::size_t node = c / m;
        const std::size_t k = c % m;
        split.hidden_cells.push_back({node, k, net.attribute(node, k)});
    }
    for (const auto& cell : split.hidden_cells) {
        if (cell.original == 0.0) continue;
        std::erase_if(rows[cell.node], [&](const AttributeEntry& e) { return e.index == cell.attribute; });
    }
    split.train_network = AttributedNetwork(net.node_ids(), m, net.edges(), std::move(rows), net.labels());
    return split;
}

}  // namespace mdne
