#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "graph/network.hpp"
#include "model/model.hpp"
#include "pretrain/rbm.hpp"

namespace mdne {

struct TrainConfig {
    LossWeights weights;
    PenaltyConfig penalties;
    LayerSpec spec;
    double lr = 0.01;
    std::size_t max_iters = 400;
    /// 0 selects automatically: full batch up to 5000 nodes, 1024 above.
    std::size_t batch_size = 0;
    bool full_batch = false;
    double convergence_tol = 1e-5;
    std::uint64_t seed = 42;
    bool pretrain = true;
    RbmConfig rbm;
    int threads = 1;

    /// Throws ValidationError if anything is out of range for an n × m network.
    void validate(std::size_t n, std::size_t m) const;
    /// Resolved batch size for a network with n nodes.
    std::size_t effective_batch(std::size_t n) const;
};

struct IterationRecord {
    std::size_t iteration = 0;
    LossComponents components;
    double mix = 0.0;
    double elapsed_ms = 0.0;
};

struct TrainReport {
    std::vector<IterationRecord> iterations;
    double wall_ms = 0.0;
    std::string stop_reason;  // "max_iters" or "converged"
    std::size_t lr_retries = 0;
    double final_lr = 0.0;

    /// iteration,l_1st,l_2nd,l_att,l_reg,l_mix,elapsed_ms
    void write_csv(std::ostream& out) const;
    void save_csv(const std::filesystem::path& path) const;
};

struct FitResult {
    ModelParams params;
    Matrix embedding;  // n × d, row i is node i
    TrainReport report;
};

/// Per-iteration hook, e.g. for progress logging.
using IterationCallback = std::function<void(const IterationRecord&)>;

/// Pretrains (or randomly initializes) then runs plain SGD on the mixed loss.
///
/// One iteration is one pass over all nodes: a single step in full-batch mode,
/// one step per mini-batch otherwise. Training stops after max_iters or when
/// the relative change of the mixed loss stays below convergence_tol for 5
/// consecutive iterations. A non-finite loss restarts from the initial
/// parameters with half the learning rate, at most 3 times, after which a
/// TrainingError names the failing iteration.
FitResult fit(const AttributedNetwork& net, const TrainConfig& config,
              const IterationCallback& on_iteration = {});

/// Embeds every node of `net` with frozen parameters, in batches.
Matrix embed_all(const ModelParams& params, const AttributedNetwork& net, int threads = 1,
                 std::size_t batch = 1024);

/// Batch for the given node rows, carrying the edges fully inside it.
Batch make_batch(const AttributedNetwork& net, std::span<const std::size_t> nodes);

}  // namespace mdne
