#include "experiment/tasks.hpp"

#include <ostream>

#include "core/error.hpp"
#include "core/text.hpp"
#include "eval/metrics.hpp"
#include "graph/split.hpp"

namespace mdne {

void write_metrics_csv(const std::vector<MetricRow>& rows, std::ostream& out) {
    out << "task,dataset,param,metric,value,seed\n";
    for (const auto& r : rows) {
        out << r.task << "," << r.dataset << "," << text::format_double(r.param) << "," << r.metric << ","
            << text::format_double(r.value) << "," << r.seed << "\n";
    }
}

std::vector<MetricRow> eval_reconstruct(const Matrix& emb, const AttributedNetwork& net,
                                        std::span<const std::size_t> ks, const std::string& dataset,
                                        std::uint64_t seed) {
    const RankingResult r = network_reconstruction(emb, net, ks);
    std::vector<MetricRow> rows;
    for (std::size_t i = 0; i < r.ks.size(); ++i) {
        rows.push_back({"reconstruct", dataset, static_cast<double>(r.ks[i]), "precision", r.precision[i], seed});
    }
    return rows;
}

std::vector<MetricRow> eval_classify(const Matrix& emb, const AttributedNetwork& net,
                                     std::span<const double> test_ratios, std::size_t repeats,
                                     const std::string& dataset, std::uint64_t seed, bool* degenerate) {
    if (!net.labels()) throw ValidationError("classify: the network has no labels");
    std::vector<MetricRow> rows;
    for (double ratio : test_ratios) {
        const ClassificationResult c = classify(emb, *net.labels(), ratio, seed, repeats);
        if (degenerate) *degenerate = c.degenerate;
        rows.push_back({"classify", dataset, ratio, "micro_f1", c.micro_f1, seed});
        rows.push_back({"classify", dataset, ratio, "macro_f1", c.macro_f1, seed});
    }
    return rows;
}

std::vector<MetricRow> eval_linkpred(const AttributedNetwork& net, const TrainConfig& config,
                                     std::span<const double> ratios, const std::string& dataset,
                                     std::uint64_t seed) {
    std::vector<MetricRow> rows;
    for (double ratio : ratios) {
        const EvalSplit split = split_links(net, ratio, seed);
        const FitResult fitted = fit(split.train_network, config);
        rows.push_back({"linkpred", dataset, ratio, "auc", link_prediction_auc(fitted.embedding, split), seed});
    }
    return rows;
}

std::vector<MetricRow> eval_attrpred(const AttributedNetwork& net, const TrainConfig& config,
                                     std::span<const double> ratios, const std::string& dataset,
                                     std::uint64_t seed) {
    std::vector<MetricRow> rows;
    for (double ratio : ratios) {
        const EvalSplit split = split_attributes(net, ratio, seed);
        const FitResult fitted = fit(split.train_network, config);
        rows.push_back(
            {"attrpred", dataset, ratio, "auc", attribute_prediction_auc(fitted.embedding, split), seed});
    }
    return rows;
}

}  // namespace mdne
