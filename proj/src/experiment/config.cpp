#include "experiment/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "core/error.hpp"
#include "core/text.hpp"

namespace mdne {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"data", {"format", "name", "content", "cites", "edges", "attributes", "labels", "binarize", "path"}},
        {"model", {"preprocess", "pre_struct_dim", "pre_attr_dim", "hidden_dims"}},
        {"loss", {"lambda", "alpha", "upsilon", "gamma1", "gamma2"}},
        {"train", {"lr", "max_iters", "batch", "convergence_tol", "seed", "threads"}},
        {"pretrain", {"enabled", "lr", "epochs", "batch"}},
        {"eval", {"ks", "link_ratios", "attr_ratios", "test_ratios", "repeats"}},
        {"output", {"dir"}},
    };
    return keys;
}

std::string where(const std::string& section, const std::string& key) { return "[" + section + "] " + key; }

double as_double(const std::string& section, const std::string& key, const std::string& raw) {
    const auto v = text::parse_double(text::trim(raw));
    if (!v) throw ParseError(where(section, key) + ": expected a number, got '" + raw + "'");
    return *v;
}

std::size_t as_count(const std::string& section, const std::string& key, const std::string& raw) {
    const auto v = text::parse_uint(text::trim(raw));
    if (!v) throw ParseError(where(section, key) + ": expected a non-negative integer, got '" + raw + "'");
    return static_cast<std::size_t>(*v);
}

bool as_bool(const std::string& section, const std::string& key, const std::string& raw) {
    const std::string_view v = text::trim(raw);
    if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "off" || v == "no" || v == "0") return false;
    throw ParseError(where(section, key) + ": expected on/off, got '" + raw + "'");
}

std::vector<std::string> split_list(const std::string& raw) {
    std::vector<std::string> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto t = text::trim(item);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

std::vector<double> as_doubles(const std::string& section, const std::string& key, const std::string& raw) {
    std::vector<double> out;
    for (const auto& s : split_list(raw)) out.push_back(as_double(section, key, s));
    if (out.empty()) throw ParseError(where(section, key) + ": empty list");
    return out;
}

std::vector<std::size_t> as_counts(const std::string& section, const std::string& key, const std::string& raw) {
    std::vector<std::size_t> out;
    for (const auto& s : split_list(raw)) out.push_back(as_count(section, key, s));
    if (out.empty()) throw ParseError(where(section, key) + ": empty list");
    return out;
}

pt::ptree read_ini(std::istream& in) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ParseError("config line " + std::to_string(e.line()) + ": " + e.message());
    }
    return tree;
}

}  // namespace

ExperimentConfig parse_experiment_config(std::istream& in, const std::filesystem::path& base_dir) {
    const pt::ptree tree = read_ini(in);
    ExperimentConfig cfg;
    auto resolve = [&](const std::string& raw) {
        std::filesystem::path p(std::string(text::trim(raw)));
        return p.is_absolute() ? p : base_dir / p;
    };

    bool have_output = false;
    for (const auto& [section, body] : tree) {
        const auto known = known_keys().find(section);
        if (known == known_keys().end()) {
            if (body.empty() && !body.data().empty()) {
                throw ValidationError("config: key '" + section + "' outside any section");
            }
            throw ValidationError("config: unknown section [" + section + "]");
        }
        for (const auto& [key, node] : body) {
            if (!known->second.contains(key)) throw ValidationError("config: unknown key " + where(section, key));
            const std::string raw = node.get_value<std::string>();
            if (section == "data") {
                if (key == "format") {
                    const auto v = text::trim(raw);
                    if (v == "cora") cfg.data.format = DataFormat::cora;
                    else if (v == "generic") cfg.data.format = DataFormat::generic;
                    else if (v == "canonical") cfg.data.format = DataFormat::canonical;
                    else throw ValidationError(where(section, key) + ": expected cora, generic or canonical");
                } else if (key == "name") cfg.data.name = std::string(text::trim(raw));
                else if (key == "content") cfg.data.content = resolve(raw);
                else if (key == "cites") cfg.data.cites = resolve(raw);
                else if (key == "edges") cfg.data.edges = resolve(raw);
                else if (key == "attributes") cfg.data.attributes = resolve(raw);
                else if (key == "labels") cfg.data.labels = resolve(raw);
                else if (key == "binarize") cfg.data.binarize = as_bool(section, key, raw);
                else if (key == "path") cfg.data.path = resolve(raw);
            } else if (section == "model") {
                auto& spec = cfg.train.spec;
                if (key == "preprocess") spec.preprocess = as_bool(section, key, raw);
                else if (key == "pre_struct_dim") spec.pre_struct_dim = as_count(section, key, raw);
                else if (key == "pre_attr_dim") spec.pre_attr_dim = as_count(section, key, raw);
                else if (key == "hidden_dims") spec.hidden_dims = as_counts(section, key, raw);
            } else if (section == "loss") {
                const double v = as_double(section, key, raw);
                if (key == "lambda") cfg.train.weights.lambda = v;
                else if (key == "alpha") cfg.train.weights.alpha = v;
                else if (key == "upsilon") cfg.train.weights.upsilon = v;
                else if (key == "gamma1") cfg.train.penalties.gamma1 = v;
                else if (key == "gamma2") cfg.train.penalties.gamma2 = v;
            } else if (section == "train") {
                if (key == "lr") cfg.train.lr = as_double(section, key, raw);
                else if (key == "max_iters") cfg.train.max_iters = as_count(section, key, raw);
                else if (key == "convergence_tol") cfg.train.convergence_tol = as_double(section, key, raw);
                else if (key == "seed") cfg.train.seed = as_count(section, key, raw);
                else if (key == "threads") cfg.train.threads = static_cast<int>(as_count(section, key, raw));
                else if (key == "batch") {
                    const auto v = text::trim(raw);
                    cfg.train.full_batch = v == "full";
                    if (v == "auto" || v == "full") cfg.train.batch_size = 0;
                    else {
                        cfg.train.batch_size = as_count(section, key, raw);
                        if (cfg.train.batch_size == 0) throw ValidationError(where(section, key) + ": must be >= 1");
                    }
                }
            } else if (section == "pretrain") {
                if (key == "enabled") cfg.train.pretrain = as_bool(section, key, raw);
                else if (key == "lr") cfg.train.rbm.lr = as_double(section, key, raw);
                else if (key == "epochs") cfg.train.rbm.epochs = as_count(section, key, raw);
                else if (key == "batch") cfg.train.rbm.batch = as_count(section, key, raw);
            } else if (section == "eval") {
                if (key == "ks") cfg.eval.ks = as_counts(section, key, raw);
                else if (key == "link_ratios") cfg.eval.link_ratios = as_doubles(section, key, raw);
                else if (key == "attr_ratios") cfg.eval.attr_ratios = as_doubles(section, key, raw);
                else if (key == "test_ratios") cfg.eval.test_ratios = as_doubles(section, key, raw);
                else if (key == "repeats") cfg.eval.repeats = as_count(section, key, raw);
            } else if (section == "output") {
                cfg.output_dir = resolve(raw);
                have_output = true;
            }
        }
    }
    if (!have_output) cfg.output_dir = base_dir / "out";

    // Checks that do not need the data.
    if (cfg.train.spec.hidden_dims.empty()) throw ValidationError("config: [model] hidden_dims is required");
    if (cfg.train.spec.preprocess && (cfg.train.spec.pre_struct_dim == 0 || cfg.train.spec.pre_attr_dim == 0)) {
        throw ValidationError("config: preprocess on needs pre_struct_dim and pre_attr_dim");
    }
    cfg.train.weights.validate();
    cfg.train.penalties.validate();
    if (!(cfg.train.lr > 0.0)) throw ValidationError("config: [train] lr must be > 0");
    if (cfg.train.max_iters < 1) throw ValidationError("config: [train] max_iters must be >= 1");
    if (cfg.train.threads < 1) throw ValidationError("config: [train] threads must be >= 1");
    if (cfg.eval.repeats < 1) throw ValidationError("config: [eval] repeats must be >= 1");
    switch (cfg.data.format) {
    case DataFormat::cora:
        if (cfg.data.content.empty() || cfg.data.cites.empty()) {
            throw ValidationError("config: cora format needs [data] content and cites");
        }
        break;
    case DataFormat::generic:
        if (cfg.data.edges.empty() || cfg.data.attributes.empty()) {
            throw ValidationError("config: generic format needs [data] edges and attributes");
        }
        break;
    case DataFormat::canonical:
        if (cfg.data.path.empty()) throw ValidationError("config: canonical format needs [data] path");
        break;
    }
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path.string());
    return parse_experiment_config(in, path.parent_path().empty() ? "." : path.parent_path());
}

Grid parse_grid(std::istream& in) {
    const pt::ptree tree = read_ini(in);
    Grid grid;
    for (const auto& [section, body] : tree) {
        if (section != "grid") throw ValidationError("grid file: only a [grid] section is allowed, got '" + section + "'");
        for (const auto& [key, node] : body) {
            grid.emplace_back(key, as_doubles("grid", key, node.get_value<std::string>()));
        }
    }
    if (grid.empty()) throw ValidationError("grid file: empty grid");
    return grid;
}

Grid load_grid(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read grid " + path.string());
    return parse_grid(in);
}

AttributedNetwork load_network(const DataSource& source, LoadDiagnostics* diagnostics) {
    switch (source.format) {
    case DataFormat::cora: return load_cora_format(source.content, source.cites, diagnostics);
    case DataFormat::generic:
        return load_generic(source.edges, source.attributes, source.labels, LoadOptions{source.binarize},
                            diagnostics);
    case DataFormat::canonical: return load_canonical(source.path);
    }
    throw ContractError("load_network: unknown format");
}

}  // namespace mdne
