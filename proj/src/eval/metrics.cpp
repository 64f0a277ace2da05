#include "eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/error.hpp"

namespace mdne {
namespace {

constexpr double kZeroDenominator = 1e-12;

std::vector<double> row_norms(const Matrix& emb) {
    std::vector<double> out(emb.rows());
    for (std::size_t i = 0; i < emb.rows(); ++i) {
        double s = 0.0;
        for (double x : emb.row(i)) s += x * x;
        out[i] = std::sqrt(s);
    }
    return out;
}

// Same arithmetic as cosine_similarity, with norms precomputed.
double cosine_with_norms(const Matrix& emb, const std::vector<double>& norms, std::size_t a, std::size_t b) {
    if (norms[a] == 0.0 || norms[b] == 0.0) return 0.0;
    auto u = emb.row(a);
    auto v = emb.row(b);
    double dot = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) dot += u[k] * v[k];
    return dot / (norms[a] * norms[b]);
}

void check_rows(const Matrix& emb, std::size_t n, const char* what) {
    if (emb.rows() != n) {
        throw ShapeError(std::string(what) + ": embedding has " + std::to_string(emb.rows()) +
                         " rows, network has " + std::to_string(n) + " nodes");
    }
}

}  // namespace

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw ShapeError("cosine_similarity: length mismatch");
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        dot += u[k] * v[k];
        nu += u[k] * u[k];
        nv += v[k] * v[k];
    }
    if (nu == 0.0 || nv == 0.0) return 0.0;
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

RankingResult network_reconstruction(const Matrix& emb, const AttributedNetwork& net,
                                     std::span<const std::size_t> ks) {
    const std::size_t n = net.node_count();
    check_rows(emb, n, "network_reconstruction");
    if (ks.empty()) throw ValidationError("network_reconstruction: no k given");
    const std::size_t candidates = n < 2 ? 0 : n * (n - 1) / 2;
    std::size_t kmax = 0;
    for (std::size_t k : ks) {
        if (k == 0 || k > candidates) {
            throw ValidationError("network_reconstruction: k=" + std::to_string(k) + " outside [1, " +
                                  std::to_string(candidates) + "]");
        }
        kmax = std::max(kmax, k);
    }

    const auto norms = row_norms(emb);
    std::vector<RankedPair> pairs;
    pairs.reserve(candidates);
    for (std::size_t u = 0; u + 1 < n; ++u) {
        for (std::size_t v = u + 1; v < n; ++v) pairs.push_back({u, v, cosine_with_norms(emb, norms, u, v), false});
    }
    auto better = [](const RankedPair& a, const RankedPair& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.u != b.u) return a.u < b.u;
        return a.v < b.v;
    };
    std::partial_sort(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(kmax), pairs.end(), better);
    pairs.resize(kmax);
    for (auto& p : pairs) p.is_edge = net.has_edge(p.u, p.v);

    RankingResult out;
    out.ks.assign(ks.begin(), ks.end());
    std::vector<std::size_t> hits(kmax + 1, 0);
    for (std::size_t r = 0; r < kmax; ++r) hits[r + 1] = hits[r] + (pairs[r].is_edge ? 1 : 0);
    for (std::size_t k : ks) out.precision.push_back(static_cast<double>(hits[k]) / static_cast<double>(k));
    out.top = std::move(pairs);
    return out;
}

double auc_from_scores(std::span<const double> positives, std::span<const double> negatives) {
    if (positives.empty() || negatives.empty()) throw ValidationError("AUC needs positives and negatives");
    std::vector<double> neg(negatives.begin(), negatives.end());
    std::sort(neg.begin(), neg.end());
    // Integer counts keep the result identical to an exhaustive pair loop.
    std::uint64_t twice = 0;
    for (double p : positives) {
        const auto lo = std::lower_bound(neg.begin(), neg.end(), p);
        const auto hi = std::upper_bound(lo, neg.end(), p);
        twice += 2 * static_cast<std::uint64_t>(lo - neg.begin()) + static_cast<std::uint64_t>(hi - lo);
    }
    return static_cast<double>(twice) / (2.0 * static_cast<double>(positives.size()) *
                                         static_cast<double>(negatives.size()));
}

double link_prediction_auc(const Matrix& emb, const EvalSplit& split) {
    if (split.kind != SplitKind::link_prediction) throw ValidationError("link_prediction_auc: not a link split");
    check_rows(emb, split.train_network.node_count(), "link_prediction_auc");
    const auto norms = row_norms(emb);
    std::vector<double> pos, neg;
    for (const auto& e : split.hidden_edges) pos.push_back(cosine_with_norms(emb, norms, e.u, e.v));
    for (const auto& p : split.negatives) neg.push_back(cosine_with_norms(emb, norms, p.u, p.v));
    return auc_from_scores(pos, neg);
}

AttributeScores attribute_scores(const Matrix& emb, const EvalSplit& split, std::size_t neighbours) {
    if (split.kind != SplitKind::attribute_prediction) {
        throw ValidationError("attribute_prediction_auc: not an attribute split");
    }
    const AttributedNetwork& train = split.train_network;
    const std::size_t n = train.node_count();
    check_rows(emb, n, "attribute_prediction_auc");
    if (n < 2) throw ValidationError("attribute_prediction_auc: need at least 2 nodes");

    AttributeScores out;
    out.neighborhood = std::min(neighbours, n - 1);
    out.shrunk = out.neighborhood < neighbours;
    const auto norms = row_norms(emb);

    std::vector<std::size_t> others;
    std::vector<double> sim(n);
    std::size_t current = n;  // node whose neighbourhood is in `others`
    for (const auto& cell : split.hidden_cells) {
        if (cell.node != current) {
            current = cell.node;
            others.clear();
            for (std::size_t i = 0; i < n; ++i) {
                if (i == current) continue;
                sim[i] = cosine_with_norms(emb, norms, current, i);
                others.push_back(i);
            }
            auto closer = [&](std::size_t a, std::size_t b) {
                if (sim[a] != sim[b]) return sim[a] > sim[b];
                return a < b;
            };
            std::partial_sort(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(out.neighborhood),
                              others.end(), closer);
            others.resize(out.neighborhood);
        }
        double num = 0.0, den = 0.0;
        bool any_positive = false;
        for (std::size_t i : others) {
            if (train.attribute(i, cell.attribute) == 1.0) {
                num += sim[i];
                any_positive = true;
            } else {
                den += sim[i];
            }
        }
        if (!any_positive) out.p.push_back(0.0);
        else out.p.push_back(num / (den == 0.0 ? kZeroDenominator : den));
    }
    return out;
}

double attribute_prediction_auc(const Matrix& emb, const EvalSplit& split) {
    const AttributeScores scores = attribute_scores(emb, split);
    std::vector<double> pos, neg;
    for (std::size_t c = 0; c < split.hidden_cells.size(); ++c) {
        (split.hidden_cells[c].original == 1.0 ? pos : neg).push_back(scores.p[c]);
    }
    return auc_from_scores(pos, neg);
}

}  // namespace mdne
