#pragma once

#include <cstdint>
#include <vector>

#include "graph/network.hpp"

namespace mdne {

enum class SplitKind { link_prediction, attribute_prediction };

struct NodePair {
    std::size_t u = 0;
    std::size_t v = 0;

    bool operator==(const NodePair&) const = default;
};

struct HiddenCell {
    std::size_t node = 0;
    std::size_t attribute = 0;
    double original = 0.0;

    bool operator==(const HiddenCell&) const = default;
};

/// Held-out evaluation items plus the residual network used for training.
struct EvalSplit {
    SplitKind kind = SplitKind::link_prediction;
    AttributedNetwork train_network;
    std::vector<Edge> hidden_edges;       // link task positives
    std::vector<NodePair> negatives;      // link task negatives, u < v
    std::vector<HiddenCell> hidden_cells; // attribute task, sorted by (node, attribute)
    double ratio = 0.0;
};

/// Hides round(ratio * l) edges and samples as many node pairs that are not
/// connected in `net`. Negatives come from rejection sampling capped at
/// 100 * |positives| draws. The residual network may contain isolated nodes.
EvalSplit split_links(const AttributedNetwork& net, double ratio, std::uint64_t seed);

/// Hides round(ratio * n * m) attribute cells drawn uniformly over all cells,
/// recording their original values and zeroing them in the training network.
/// Redraws (up to 20 times) until the hidden set holds both 0 and 1 cells when
/// the matrix has both.
EvalSplit split_attributes(const AttributedNetwork& net, double ratio, std::uint64_t seed);

}  // namespace mdne
