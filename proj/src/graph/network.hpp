#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "core/tensor.hpp"

namespace mdne {

/// Undirected weighted edge, stored with u < v.
struct Edge {
    std::size_t u = 0;
    std::size_t v = 0;
    double weight = 1.0;

    bool operator==(const Edge&) const = default;
};

struct AttributeEntry {
    std::size_t index = 0;
    double value = 0.0;

    bool operator==(const AttributeEntry&) const = default;
};

/// Sparse attribute row, sorted by index, zeros never stored.
using AttributeRow = std::vector<AttributeEntry>;

struct Labels {
    static constexpr int kUnlabeled = -1;
    std::vector<int> class_of;             // per node, or kUnlabeled
    std::vector<std::string> class_names;  // dense class index -> name

    bool operator==(const Labels&) const = default;
};

/// Counters for input rows the loaders skipped instead of failing on.
struct LoadDiagnostics {
    std::size_t unknown_endpoint_edges = 0;
    std::size_t duplicate_edges = 0;
    std::size_t self_loops = 0;
};

/// Graph with sparse binary (or weighted) node attributes and optional labels.
/// Immutable once built; every constructor path normalizes edges to u < v,
/// drops self-loops, and collapses duplicates.
class AttributedNetwork {
public:
    AttributedNetwork() = default;

    /// Validates and normalizes. Duplicate edges keep the first weight seen.
    /// Throws ValidationError on out-of-range indices, non-positive weights, or
    /// attribute indices >= attribute_count.
    AttributedNetwork(std::vector<std::string> node_ids, std::size_t attribute_count,
                      std::vector<Edge> edges, std::vector<AttributeRow> attributes,
                      std::optional<Labels> labels = std::nullopt,
                      LoadDiagnostics* diagnostics = nullptr);

    std::size_t node_count() const noexcept { return node_ids_.size(); }
    std::size_t attribute_count() const noexcept { return attribute_count_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    /// Total number of nonzero attribute cells.
    std::size_t nonzero_attribute_count() const noexcept;

    const std::vector<std::string>& node_ids() const noexcept { return node_ids_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const std::vector<AttributeRow>& attributes() const noexcept { return attributes_; }
    const AttributeRow& attributes(std::size_t node) const { return attributes_.at(node); }
    const std::optional<Labels>& labels() const noexcept { return labels_; }

    bool has_edge(std::size_t a, std::size_t b) const;
    std::optional<double> edge_weight(std::size_t a, std::size_t b) const;
    double attribute(std::size_t node, std::size_t index) const;
    std::vector<std::size_t> degrees() const;
    double max_edge_weight() const noexcept;

    /// Dense adjacency rows for the given nodes, weights divided by the
    /// largest edge weight so entries fall in [0, 1].
    Matrix structure_rows(std::span<const std::size_t> nodes) const;
    /// Dense attribute rows for the given nodes.
    Matrix attribute_rows(std::span<const std::size_t> nodes) const;

    bool operator==(const AttributedNetwork& other) const;

private:
    static std::uint64_t pair_key(std::size_t a, std::size_t b) noexcept;

    std::vector<std::string> node_ids_;
    std::size_t attribute_count_ = 0;
    std::vector<Edge> edges_;
    std::vector<AttributeRow> attributes_;
    std::optional<Labels> labels_;
    std::unordered_map<std::uint64_t, double> edge_weights_;
};

struct LoadOptions {
    /// Coerce attribute values to {0, 1} by a nonzero test.
    bool binarize = true;
};

/// Loads the linqs `.content` / `.cites` pair. Citation edges are symmetrized;
/// edges naming unknown papers are dropped and counted in `diagnostics`.
AttributedNetwork load_cora_format(const std::filesystem::path& content,
                                   const std::filesystem::path& cites,
                                   LoadDiagnostics* diagnostics = nullptr);

/// Loads `<src> <dst> [weight]` edges plus `<id> <k>:<v> ...` attributes and an
/// optional `<id> <label>` file. Nodes are attribute-table ids in file order,
/// followed by ids that only occur in the edge list.
AttributedNetwork load_generic(const std::filesystem::path& edge_list,
                               const std::filesystem::path& attribute_table,
                               const std::optional<std::filesystem::path>& labels,
                               const LoadOptions& options = {},
                               LoadDiagnostics* diagnostics = nullptr);

/// Canonical single-file text form; see README for the layout.
void save_canonical(const AttributedNetwork& net, const std::filesystem::path& path);
AttributedNetwork load_canonical(const std::filesystem::path& path);

}  // namespace mdne
