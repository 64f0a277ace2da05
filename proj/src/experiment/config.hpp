#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "graph/network.hpp"
#include "train/grid_search.hpp"
#include "train/trainer.hpp"

namespace mdne {

enum class DataFormat { cora, generic, canonical };

struct DataSource {
    DataFormat format = DataFormat::cora;
    std::string name = "dataset";
    // cora
    std::filesystem::path content;
    std::filesystem::path cites;
    // generic
    std::filesystem::path edges;
    std::filesystem::path attributes;
    std::optional<std::filesystem::path> labels;
    bool binarize = true;
    // canonical
    std::filesystem::path path;
};

struct EvalPlan {
    std::vector<std::size_t> ks{1000, 3000, 5000};
    std::vector<double> link_ratios{0.05, 0.25, 0.45};
    std::vector<double> attr_ratios{0.05, 0.25, 0.45};
    std::vector<double> test_ratios{0.1, 0.5, 0.9};
    std::size_t repeats = 10;
};

/// Everything one experiment run needs. Loaded from an INI file with sections
/// [data], [model], [loss], [train], [pretrain], [eval], [output]; unknown
/// sections or keys are errors. Relative paths resolve against the config
/// file's directory.
struct ExperimentConfig {
    DataSource data;
    TrainConfig train;
    EvalPlan eval;
    std::filesystem::path output_dir = "out";
};

ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ExperimentConfig parse_experiment_config(std::istream& in, const std::filesystem::path& base_dir);

/// Ordered grid from an INI [grid] section, one `name = v1, v2, ...` per line.
Grid load_grid(const std::filesystem::path& path);
Grid parse_grid(std::istream& in);

/// Loads the network described by `source`.
AttributedNetwork load_network(const DataSource& source, LoadDiagnostics* diagnostics = nullptr);

}  // namespace mdne
