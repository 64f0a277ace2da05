#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "core/tensor.hpp"

namespace mdne {

struct EmbeddingTable {
    std::vector<std::string> node_ids;
    Matrix values;  // row i belongs to node_ids[i]
};

/// `#mdne v1 n=<n> d=<d>` then `<node_id>\t<f1>\t...\t<fd>` per node, floats
/// printed in shortest round-trip form.
void write_embeddings(std::ostream& out, const std::vector<std::string>& node_ids, const Matrix& values);
void save_embeddings(const std::filesystem::path& path, const std::vector<std::string>& node_ids,
                     const Matrix& values);

/// Throws ParseError on a bad header or number, ValidationError when a row has
/// the wrong column count or the row count differs from n.
EmbeddingTable read_embeddings(std::istream& in);
EmbeddingTable load_embeddings(const std::filesystem::path& path);

}  // namespace mdne
