#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "core/tensor.hpp"
#include "graph/network.hpp"
#include "graph/split.hpp"

namespace mdne {

/// dot(u, v) / (‖u‖‖v‖); 0 when either vector is all zeros.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

struct RankedPair {
    std::size_t u = 0;
    std::size_t v = 0;
    double score = 0.0;
    bool is_edge = false;
};

/// Top pairs by cosine similarity (ties by ascending (u, v)) and precision@k
/// for each requested k.
struct RankingResult {
    std::vector<RankedPair> top;  // max(k) entries, scores non-increasing
    std::vector<std::size_t> ks;
    std::vector<double> precision;  // parallel to ks
};

/// Ranks every unordered pair u < v. Throws ValidationError when a k is 0 or
/// exceeds n(n-1)/2, ShapeError when emb rows != n.
RankingResult network_reconstruction(const Matrix& emb, const AttributedNetwork& net,
                                     std::span<const std::size_t> ks);

/// (#concordant + 0.5 #tied) / (P N) over all positive/negative score pairs.
/// Throws ValidationError if either side is empty.
double auc_from_scores(std::span<const double> positives, std::span<const double> negatives);

/// Hidden edges vs sampled non-edges, scored by cosine similarity.
double link_prediction_auc(const Matrix& emb, const EvalSplit& split);

struct AttributeScores {
    std::vector<double> p;          // one per hidden cell, split order
    std::size_t neighborhood = 0;   // min(10, n - 1)
    bool shrunk = false;            // fewer than 10 other nodes were available
};

/// Neighbour-vote scores for each hidden cell (j, k): p = Σ sim over the top
/// cosine neighbours of j holding k in the training attributes, divided by Σ
/// sim over the neighbours that do not (1e-12 if that sum is 0; p = 0 when no
/// neighbour holds k).
AttributeScores attribute_scores(const Matrix& emb, const EvalSplit& split, std::size_t neighbours = 10);

/// AUC of attribute_scores with hidden cells of value 1 as positives.
double attribute_prediction_auc(const Matrix& emb, const EvalSplit& split);

}  // namespace mdne
