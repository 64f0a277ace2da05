#include "experiment/embedding_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "core/error.hpp"
#include "core/text.hpp"

namespace mdne {

void write_embeddings(std::ostream& out, const std::vector<std::string>& node_ids, const Matrix& values) {
    if (node_ids.size() != values.rows()) throw ShapeError("write_embeddings: id count differs from row count");
    out << "#mdne v1 n=" << values.rows() << " d=" << values.cols() << "\n";
    for (std::size_t i = 0; i < values.rows(); ++i) {
        if (node_ids[i].find_first_of("\t\n") != std::string::npos) {
            throw ValidationError("write_embeddings: node id '" + node_ids[i] + "' contains a tab or newline");
        }
        out << node_ids[i];
        for (double v : values.row(i)) out << '\t' << text::format_double(v);
        out << '\n';
    }
}

void save_embeddings(const std::filesystem::path& path, const std::vector<std::string>& node_ids,
                     const Matrix& values) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    write_embeddings(out, node_ids, values);
    if (!out) throw IoError("write failed for " + path.string());
}

EmbeddingTable read_embeddings(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("embeddings: empty file");
    const auto head = text::split_ws(line);
    if (head.size() != 4 || head[0] != "#mdne" || head[1] != "v1" || !head[2].starts_with("n=") ||
        !head[3].starts_with("d=")) {
        throw ParseError("embeddings: expected header '#mdne v1 n=<n> d=<d>'");
    }
    const auto n = text::parse_uint(head[2].substr(2));
    const auto d = text::parse_uint(head[3].substr(2));
    if (!n || !d) throw ParseError("embeddings: bad n or d in header");

    EmbeddingTable table;
    table.values = Matrix(*n, *d);
    std::size_t row = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        for (;;) {
            const auto tab = rest.find('\t');
            fields.push_back(rest.substr(0, tab));
            if (tab == std::string_view::npos) break;
            rest.remove_prefix(tab + 1);
        }
        if (fields.size() != *d + 1) {
            throw ValidationError("embeddings line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(*d) + " values, found " + std::to_string(fields.size() - 1));
        }
        if (row >= *n) throw ValidationError("embeddings: more than n=" + std::to_string(*n) + " rows");
        table.node_ids.emplace_back(fields[0]);
        for (std::size_t k = 0; k < *d; ++k) {
            const auto v = text::parse_double(fields[k + 1]);
            if (!v) throw ParseError("embeddings line " + std::to_string(line_no) + ": bad number");
            table.values(row, k) = *v;
        }
        ++row;
    }
    if (row != *n) {
        throw ValidationError("embeddings: header says n=" + std::to_string(*n) + " but file has " +
                              std::to_string(row) + " rows");
    }
    return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    return read_embeddings(in);
}

}  // namespace mdne
