#include "graph/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>

#include "core/error.hpp"
#include "core/text.hpp"

namespace mdne {
namespace {

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return in;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line,
                             const std::string& what) {
    throw ParseError(path.string() + ":" + std::to_string(line) + ": " + what);
}

Labels make_labels(const std::vector<std::optional<std::string>>& names) {
    std::set<std::string> distinct;
    for (const auto& n : names) {
        if (n) distinct.insert(*n);
    }
    Labels labels;
    labels.class_names.assign(distinct.begin(), distinct.end());
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < labels.class_names.size(); ++i) {
        index[labels.class_names[i]] = static_cast<int>(i);
    }
    labels.class_of.reserve(names.size());
    for (const auto& n : names) labels.class_of.push_back(n ? index[*n] : Labels::kUnlabeled);
    return labels;
}

}  // namespace

std::uint64_t AttributedNetwork::pair_key(std::size_t a, std::size_t b) noexcept {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

AttributedNetwork::AttributedNetwork(std::vector<std::string> node_ids,
                                     std::size_t attribute_count, std::vector<Edge> edges,
                                     std::vector<AttributeRow> attributes,
                                     std::optional<Labels> labels,
                                     LoadDiagnostics* diagnostics)
    : node_ids_(std::move(node_ids)),
      attribute_count_(attribute_count),
      attributes_(std::move(attributes)),
      labels_(std::move(labels)) {
    const std::size_t n = node_ids_.size();
    if (n >= (std::size_t{1} << 32)) throw ValidationError("too many nodes");
    if (attributes_.size() != n) {
        throw ValidationError("attribute rows (" + std::to_string(attributes_.size()) +
                              ") do not match node count (" + std::to_string(n) + ")");
    }
    LoadDiagnostics local;
    LoadDiagnostics& diag = diagnostics ? *diagnostics : local;

    edges_.reserve(edges.size());
    for (Edge e : edges) {
        if (e.u >= n || e.v >= n) throw ValidationError("edge endpoint out of range");
        if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
            throw ValidationError("edge weights must be positive and finite");
        }
        if (e.u == e.v) {
            ++diag.self_loops;
            continue;
        }
        if (e.u > e.v) std::swap(e.u, e.v);
        if (!edge_weights_.emplace(pair_key(e.u, e.v), e.weight).second) {
            ++diag.duplicate_edges;
            continue;
        }
        edges_.push_back(e);
    }
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
        return a.u != b.u ? a.u < b.u : a.v < b.v;
    });

    for (auto& row : attributes_) {
        std::sort(row.begin(), row.end(),
                  [](const AttributeEntry& a, const AttributeEntry& b) { return a.index < b.index; });
        std::erase_if(row, [](const AttributeEntry& e) { return e.value == 0.0; });
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (row[i].index >= attribute_count_) {
                throw ValidationError("attribute index " + std::to_string(row[i].index) +
                                      " >= attribute count " + std::to_string(attribute_count_));
            }
            if (!std::isfinite(row[i].value)) throw ValidationError("non-finite attribute value");
            if (i > 0 && row[i].index == row[i - 1].index) {
                throw ValidationError("duplicate attribute index " + std::to_string(row[i].index));
            }
        }
    }

    if (labels_) {
        if (labels_->class_of.size() != n) throw ValidationError("label count does not match nodes");
        for (int c : labels_->class_of) {
            if (c != Labels::kUnlabeled &&
                (c < 0 || static_cast<std::size_t>(c) >= labels_->class_names.size())) {
                throw ValidationError("label class index out of range");
            }
        }
    }
}

std::size_t AttributedNetwork::nonzero_attribute_count() const noexcept {
    std::size_t f = 0;
    for (const auto& row : attributes_) f += row.size();
    return f;
}

bool AttributedNetwork::has_edge(std::size_t a, std::size_t b) const {
    return a != b && edge_weights_.contains(pair_key(a, b));
}

std::optional<double> AttributedNetwork::edge_weight(std::size_t a, std::size_t b) const {
    if (a == b) return std::nullopt;
    auto it = edge_weights_.find(pair_key(a, b));
    if (it == edge_weights_.end()) return std::nullopt;
    return it->second;
}

double AttributedNetwork::attribute(std::size_t node, std::size_t index) const {
    const auto& row = attributes_.at(node);
    auto it = std::lower_bound(row.begin(), row.end(), index,
                               [](const AttributeEntry& e, std::size_t k) { return e.index < k; });
    return (it != row.end() && it->index == index) ? it->value : 0.0;
}

std::vector<std::size_t> AttributedNetwork::degrees() const {
    std::vector<std::size_t> d(node_count(), 0);
    for (const auto& e : edges_) {
        ++d[e.u];
        ++d[e.v];
    }
    return d;
}

double AttributedNetwork::max_edge_weight() const noexcept {
    double w = 0.0;
    for (const auto& e : edges_) w = std::max(w, e.weight);
    return w;
}

Matrix AttributedNetwork::structure_rows(std::span<const std::size_t> nodes) const {
    const std::size_t n = node_count();
    Matrix rows(nodes.size(), n);
    const double scale = max_edge_weight();
    if (scale == 0.0) return rows;
    std::unordered_map<std::size_t, std::vector<std::size_t>> wanted;
    for (std::size_t r = 0; r < nodes.size(); ++r) {
        if (nodes[r] >= n) throw ValidationError("structure_rows: node out of range");
        wanted[nodes[r]].push_back(r);
    }
    for (const auto& e : edges_) {
        const double w = e.weight / scale;
        if (auto it = wanted.find(e.u); it != wanted.end()) {
            for (std::size_t r : it->second) rows(r, e.v) = w;
        }
        if (auto it = wanted.find(e.v); it != wanted.end()) {
            for (std::size_t r : it->second) rows(r, e.u) = w;
        }
    }
    return rows;
}

Matrix AttributedNetwork::attribute_rows(std::span<const std::size_t> nodes) const {
    Matrix rows(nodes.size(), attribute_count_);
    for (std::size_t r = 0; r < nodes.size(); ++r) {
        for (const auto& e : attributes_.at(nodes[r])) rows(r, e.index) = e.value;
    }
    return rows;
}

bool AttributedNetwork::operator==(const AttributedNetwork& other) const {
    return node_ids_ == other.node_ids_ && attribute_count_ == other.attribute_count_ &&
           edges_ == other.edges_ && attributes_ == other.attributes_ &&
           labels_ == other.labels_;
}

AttributedNetwork load_cora_format(const std::filesystem::path& content,
                                   const std::filesystem::path& cites,
                                   LoadDiagnostics* diagnostics) {
    LoadDiagnostics local;
    LoadDiagnostics& diag = diagnostics ? *diagnostics : local;

    std::vector<std::string> ids;
    std::vector<AttributeRow> attrs;
    std::vector<std::optional<std::string>> label_names;
    std::unordered_map<std::string, std::size_t> index_of;
    std::size_t m = 0;
    bool width_known = false;

    auto in = open_input(content);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto tok = text::split_ws(line);
        if (tok.empty()) continue;
        if (tok.size() < 3) parse_fail(content, lineno, "expected <id> <bits...> <label>");
        const std::size_t width = tok.size() - 2;
        if (!width_known) {
            m = width;
            width_known = true;
        } else if (width != m) {
            parse_fail(content, lineno, "expected " + std::to_string(m) + " attribute columns, got " +
                                            std::to_string(width));
        }
        std::string id(tok.front());
        if (!index_of.emplace(id, ids.size()).second) parse_fail(content, lineno, "duplicate id " + id);
        AttributeRow row;
        for (std::size_t k = 0; k < m; ++k) {
            const auto v = text::parse_double(tok[k + 1]);
            if (!v || !std::isfinite(*v)) {
                parse_fail(content, lineno, "bad attribute value '" + std::string(tok[k + 1]) + "'");
            }
            if (*v != 0.0) row.push_back({k, 1.0});
        }
        ids.push_back(std::move(id));
        attrs.push_back(std::move(row));
        label_names.emplace_back(std::string(tok.back()));
    }
    if (ids.empty()) throw ValidationError("empty input: no nodes in " + content.string());

    std::vector<Edge> edges;
    auto cin = open_input(cites);
    lineno = 0;
    while (std::getline(cin, line)) {
        ++lineno;
        const auto tok = text::split_ws(line);
        if (tok.empty()) continue;
        if (tok.size() != 2) parse_fail(cites, lineno, "expected <cited> <citing>");
        auto a = index_of.find(std::string(tok[0]));
        auto b = index_of.find(std::string(tok[1]));
        if (a == index_of.end() || b == index_of.end()) {
            ++diag.unknown_endpoint_edges;
            continue;
        }
        edges.push_back({a->second, b->second, 1.0});
    }
    return AttributedNetwork(std::move(ids), m, std::move(edges), std::move(attrs),
                             make_labels(label_names), &diag);
}

AttributedNetwork load_generic(const std::filesystem::path& edge_list,
                               const std::filesystem::path& attribute_table,
                               const std::optional<std::filesystem::path>& labels_path,
                               const LoadOptions& options, LoadDiagnostics* diagnostics) {
    std::vector<std::string> ids;
    std::vector<AttributeRow> attrs;
    std::unordered_map<std::string, std::size_t> index_of;
    std::size_t m = 0;

    auto node = [&](std::string_view id) {
        auto [it, inserted] = index_of.emplace(std::string(id), ids.size());
        if (inserted) {
            ids.emplace_back(id);
            attrs.emplace_back();
        }
        return it->second;
    };

    std::string line;
    std::size_t lineno = 0;
    {
        auto in = open_input(attribute_table);
        while (std::getline(in, line)) {
            ++lineno;
            const auto tok = text::split_ws(line);
            if (tok.empty()) continue;
            if (index_of.contains(std::string(tok[0]))) {
                parse_fail(attribute_table, lineno, "duplicate id " + std::string(tok[0]));
            }
            const std::size_t i = node(tok[0]);
            for (std::size_t t = 1; t < tok.size(); ++t) {
                const auto colon = tok[t].find(':');
                if (colon == std::string_view::npos) {
                    parse_fail(attribute_table, lineno, "expected <index>:<value>, got '" +
                                                            std::string(tok[t]) + "'");
                }
                const auto k = text::parse_uint(tok[t].substr(0, colon));
                const auto v = text::parse_double(tok[t].substr(colon + 1));
                if (!k || !v || !std::isfinite(*v)) {
                    parse_fail(attribute_table, lineno, "bad attribute pair '" + std::string(tok[t]) + "'");
                }
                m = std::max<std::size_t>(m, *k + 1);
                if (*v == 0.0) continue;
                attrs[i].push_back({static_cast<std::size_t>(*k), options.binarize ? 1.0 : *v});
            }
        }
    }

    std::vector<Edge> edges;
    {
        auto in = open_input(edge_list);
        lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto tok = text::split_ws(line);
            if (tok.empty() || tok[0].starts_with('#')) continue;
            if (tok.size() != 2 && tok.size() != 3) parse_fail(edge_list, lineno, "expected <src> <dst> [weight]");
            double w = 1.0;
            if (tok.size() == 3) {
                const auto parsed = text::parse_double(tok[2]);
                if (!parsed || !(*parsed > 0.0) || !std::isfinite(*parsed)) {
                    parse_fail(edge_list, lineno, "edge weight must be a positive number");
                }
                w = *parsed;
            }
            const std::size_t a = node(tok[0]);
            const std::size_t b = node(tok[1]);
            edges.push_back({a, b, w});
        }
    }
    if (ids.empty()) throw ValidationError("empty input: no nodes");

    std::optional<Labels> labels;
    if (labels_path) {
        std::vector<std::optional<std::string>> names(ids.size());
        auto in = open_input(*labels_path);
        lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto tok = text::split_ws(line);
            if (tok.empty()) continue;
            if (tok.size() != 2) parse_fail(*labels_path, lineno, "expected <id> <label>");
            auto it = index_of.find(std::string(tok[0]));
            if (it == index_of.end()) parse_fail(*labels_path, lineno, "unknown id " + std::string(tok[0]));
            names[it->second] = std::string(tok[1]);
        }
        labels = make_labels(names);
    }
    for (auto& row : attrs) {
        std::sort(row.begin(), row.end(),
                  [](const AttributeEntry& a, const AttributeEntry& b) { return a.index < b.index; });
        for (std::size_t i = 1; i < row.size(); ++i) {
            if (row[i].index == row[i - 1].index) {
                throw ParseError(attribute_table.string() + ": duplicate attribute index " +
                                 std::to_string(row[i].index));
            }
        }
    }
    return AttributedNetwork(std::move(ids), m, std::move(edges), std::move(attrs),
                             std::move(labels), diagnostics);
}

// Layout:
//   #mdne-network v1 n=<n> m=<m>
//   [nodes]   one external id per line, index order
//   [edges]   <u> <v> <weight>
//   [attrs]   <node> <k>:<v> ...   (nodes with no attributes omitted)
//   [labels]  "class <name>" lines in class-index order, then <node> <class>
void save_canonical(const AttributedNetwork& net, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "#mdne-network v1 n=" << net.node_count() << " m=" << net.attribute_count() << "\n";
    out << "[nodes]\n";
    for (const auto& id : net.node_ids()) out << id << "\n";
    out << "[edges]\n";
    for (const auto& e : net.edges()) out << e.u << " " << e.v << " " << text::format_double(e.weight) << "\n";
    out << "[attrs]\n";
    for (std::size_t i = 0; i < net.node_count(); ++i) {
        const auto& row = net.attributes(i);
        if (row.empty()) continue;
        out << i;
        for (const auto& a : row) out << " " << a.index << ":" << text::format_double(a.value);
        out << "\n";
    }
    if (net.labels()) {
        out << "[labels]\n";
        for (const auto& name : net.labels()->class_names) out << "class " << name << "\n";
        for (std::size_t i = 0; i < net.node_count(); ++i) {
            const int c = net.labels()->class_of[i];
            if (c != Labels::kUnlabeled) out << i << " " << c << "\n";
        }
    }
    if (!out) throw IoError("write failed for " + path.string());
}

AttributedNetwork load_canonical(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line)) parse_fail(path, lineno, "empty file");
    const auto header = text::split_ws(line);
    if (header.size() != 4 || header[0] != "#mdne-network" || header[1] != "v1" ||
        !header[2].starts_with("n=") || !header[3].starts_with("m=")) {
        parse_fail(path, lineno, "bad header");
    }
    const auto n = text::parse_uint(header[2].substr(2));
    const auto m = text::parse_uint(header[3].substr(2));
    if (!n || !m) parse_fail(path, lineno, "bad header counts");

    std::vector<std::string> ids;
    std::vector<Edge> edges;
    std::vector<AttributeRow> attrs(*n);
    std::optional<Labels> labels;
    std::string section;
    auto index = [&](std::string_view tok) {
        const auto v = text::parse_uint(tok);
        if (!v || *v >= *n) parse_fail(path, lineno, "bad node index '" + std::string(tok) + "'");
        return static_cast<std::size_t>(*v);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto tok = text::split_ws(line);
        if (tok.empty()) continue;
        if (tok.size() == 1 && tok[0].starts_with('[')) {
            section = std::string(tok[0]);
            if (section == "[labels]") labels.emplace().class_of.assign(*n, Labels::kUnlabeled);
            else if (section != "[nodes]" && section != "[edges]" && section != "[attrs]") {
                parse_fail(path, lineno, "unknown section " + section);
            }
            continue;
        }
        if (section == "[nodes]") {
            if (tok.size() != 1) parse_fail(path, lineno, "node ids must be single tokens");
            ids.emplace_back(tok[0]);
        } else if (section == "[edges]") {
            if (tok.size() != 3) parse_fail(path, lineno, "expected <u> <v> <weight>");
            const auto w = text::parse_double(tok[2]);
            if (!w) parse_fail(path, lineno, "bad weight");
            edges.push_back({index(tok[0]), index(tok[1]), *w});
        } else if (section == "[attrs]") {
            const std::size_t i = index(tok[0]);
            for (std::size_t t = 1; t < tok.size(); ++t) {
                const auto colon = tok[t].find(':');
                const auto k = colon == std::string_view::npos ? std::nullopt
                                                               : text::parse_uint(tok[t].substr(0, colon));
                const auto v = colon == std::string_view::npos ? std::nullopt
                                                               : text::parse_double(tok[t].substr(colon + 1));
                if (!k || !v) parse_fail(path, lineno, "bad attribute pair");
                attrs[i].push_back({static_cast<std::size_t>(*k), *v});
            }
        } else if (section == "[labels]") {
            if (tok.size() != 2) parse_fail(path, lineno, "expected two tokens");
            if (tok[0] == "class") {
                labels->class_names.emplace_back(tok[1]);
            } else {
                const auto c = text::parse_uint(tok[1]);
                if (!c) parse_fail(path, lineno, "bad class index");
                labels->class_of[index(tok[0])] = static_cast<int>(*c);
            }
        } else {
            parse_fail(path, lineno, "content outside a section");
        }
    }
    if (ids.size() != *n) parse_fail(path, lineno, "node count does not match header");
    if (ids.empty()) throw ValidationError("empty input: no nodes");
    return AttributedNetwork(std::move(ids), *m, std::move(edges), std::move(attrs), std::move(labels));
}

}  // namespace mdne
