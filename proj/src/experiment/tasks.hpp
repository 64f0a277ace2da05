#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "core/tensor.hpp"
#include "eval/classifier.hpp"
#include "graph/network.hpp"
#include "train/trainer.hpp"

namespace mdne {

/// One CSV line: task,dataset,param,metric,value,seed. `param` is k for
/// reconstruction and a ratio for the other tasks.
struct MetricRow {
    std::string task;
    std::string dataset;
    double param = 0.0;
    std::string metric;
    double value = 0.0;
    std::uint64_t seed = 0;
};

void write_metrics_csv(const std::vector<MetricRow>& rows, std::ostream& out);

/// precision@k for each k.
std::vector<MetricRow> eval_reconstruct(const Matrix& emb, const AttributedNetwork& net,
                                        std::span<const std::size_t> ks, const std::string& dataset,
                                        std::uint64_t seed);

/// micro_f1 and macro_f1 for each test ratio; `degenerate` is set when the
/// labels hold a single class.
std::vector<MetricRow> eval_classify(const Matrix& emb, const AttributedNetwork& net,
                                     std::span<const double> test_ratios, std::size_t repeats,
                                     const std::string& dataset, std::uint64_t seed, bool* degenerate = nullptr);

/// For each ratio: hide links (split seed = seed), train on the residual
/// network with `config`, score AUC.
std::vector<MetricRow> eval_linkpred(const AttributedNetwork& net, const TrainConfig& config,
                                     std::span<const double> ratios, const std::string& dataset,
                                     std::uint64_t seed);

/// As eval_linkpred for hidden attribute cells.
std::vector<MetricRow> eval_attrpred(const AttributedNetwork& net, const TrainConfig& config,
                                     std::span<const double> ratios, const std::string& dataset,
                                     std::uint64_t seed);

}  // namespace mdne
