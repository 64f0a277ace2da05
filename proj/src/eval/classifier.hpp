#pragma once

#include <cstdint>
#include <vector>

#include "core/tensor.hpp"
#include "graph/network.hpp"

namespace mdne {

struct LogisticOptions {
    double c = 1.0;       // loss weight against the ½‖w‖² penalty
    double tol = 1e-6;    // stop when ‖∇‖ <= tol · max(1, ‖∇ at start‖)
    std::size_t max_newton_steps = 100;
};

/// Binary L2-regularized logistic regression:
///   min_w ½‖w‖² + c Σ log(1 + exp(−y_i w·x_i)),  y_i ∈ {−1, +1}.
/// A constant-1 bias column is appended to x internally (and regularized), so
/// the result has x.cols() + 1 entries, bias last. Solved by Newton steps with
/// backtracking; `init` (same length as the result, or empty for zeros) only
/// changes the path, not the optimum.
std::vector<double> fit_logistic(const Matrix& x, const std::vector<int>& y, const LogisticOptions& options = {},
                                 const std::vector<double>& init = {});

/// Objective value of fit_logistic at w.
double logistic_objective(const Matrix& x, const std::vector<int>& y, const std::vector<double>& w, double c);

/// One weight vector per class, trained one-vs-rest.
struct OneVsRest {
    std::vector<std::vector<double>> weights;
    std::vector<int> classes;

    static OneVsRest fit(const Matrix& x, const std::vector<int>& labels, const LogisticOptions& options = {});
    /// Class with the largest decision value; ties go to the smaller class id.
    int predict(std::span<const double> row) const;
};

struct F1Scores {
    double micro = 0.0;
    double macro = 0.0;
};

/// Micro-F1 (pooled over classes) and macro-F1 (mean per-class F1 over the
/// classes present in truth or prediction).
F1Scores f1_scores(const std::vector<int>& truth, const std::vector<int>& predicted);

struct ClassificationResult {
    double micro_f1 = 0.0;
    double macro_f1 = 0.0;
    std::size_t repeats = 0;
    std::size_t redraws = 0;  // splits discarded for missing a training class
    bool degenerate = false;  // only one class among labelled nodes
};

/// Averages micro/macro-F1 over `repeats` random splits of the labelled nodes.
/// A split whose training part lacks a class is redrawn (at most 20 times per
/// repeat, then ValidationError). Unlabelled nodes are ignored.
ClassificationResult classify(const Matrix& emb, const Labels& labels, double test_ratio, std::uint64_t seed,
                              std::size_t repeats = 10, const LogisticOptions& options = {});

}  // namespace mdne
