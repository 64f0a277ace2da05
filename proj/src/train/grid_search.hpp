#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graph/network.hpp"
#include "train/trainer.hpp"

namespace mdne {

/// Ordered hyperparameter -> candidate values. Known names: lambda, alpha,
/// upsilon, gamma1, gamma2, lr.
using Grid = std::vector<std::pair<std::string, std::vector<double>>>;

/// Scores one configuration; larger is better. Expected to train internally.
using Objective = std::function<double(const AttributedNetwork&, const TrainConfig&)>;

struct GridCell {
    std::size_t index = 0;  // evaluation order
    std::vector<std::pair<std::string, double>> values;
    std::uint64_t seed = 0;
    std::optional<double> score;
    std::string error;  // set when the objective threw
};

struct GridOptions {
    /// Full coordinate sweeps before giving up on convergence.
    std::size_t max_rounds = 3;
    /// Cells evaluated concurrently within one coordinate step.
    int threads = 1;
};

/// Sets `name` on `config`; throws ValidationError for unknown names.
void set_hyperparameter(TrainConfig& config, const std::string& name, double value);
double get_hyperparameter(const TrainConfig& config, const std::string& name);

/// Coordinate-wise search: each hyperparameter in turn is swept over its
/// values with the others held at their current best, repeating until a full
/// round changes nothing. Every distinct combination is trained once, with
/// seed derived from (base seed, cell index). Objective failures are recorded
/// on the cell and do not stop the search. Returns all evaluated cells ranked
/// by score (failures last, ties by evaluation order).
std::vector<GridCell> grid_search(const AttributedNetwork& net, const TrainConfig& base, const Grid& grid,
                                  const Objective& objective, const GridOptions& options = {});

/// rank,cell,<param columns...>,seed,score,error
void write_grid_csv(const std::vector<GridCell>& cells, std::ostream& out);

/// Seed for an independent stream: hash of (seed, index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace mdne
