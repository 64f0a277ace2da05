// mdne command-line tool. Everything goes through the C API in mdne/mdne.h.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mdne/mdne.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

// Thrown to unwind with a status from the library.
struct Failure {
    int exit_code;
    std::string message;
};

int exit_code_for(mdne_status s) {
    switch (s) {
    case MDNE_ERR_INVALID_ARGUMENT:
    case MDNE_ERR_PARSE:
    case MDNE_ERR_SHAPE:
    case MDNE_ERR_VALIDATION:
    case MDNE_ERR_IO: return kExitValidation;
    default: return kExitRuntime;
    }
}

void check(mdne_status s, const char* what) {
    if (s != MDNE_OK) {
        throw Failure{exit_code_for(s), std::string(what) + ": " + mdne_status_name(s) + ": " + mdne_last_error()};
    }
}

[[noreturn]] void usage_error(const std::string& message) { throw Failure{kExitValidation, message}; }

// Minimal RAII for the C handles.
template <typename T, void (*Free)(T*)>
struct Handle {
    T* ptr = nullptr;
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    ~Handle() { Free(ptr); }
    T** out() { return &ptr; }
    T* get() const { return ptr; }
};

using Config = Handle<mdne_config, mdne_config_free>;
using Network = Handle<mdne_network, mdne_network_free>;
using Model = Handle<mdne_model, mdne_model_free>;
using Embedding = Handle<mdne_embedding, mdne_embedding_free>;
using Report = Handle<mdne_report, mdne_report_free>;
using Metrics = Handle<mdne_metrics, mdne_metrics_free>;

std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string fmt_short(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string out;
};

void open_config(const Common& c, Config& cfg) {
    check(mdne_config_load(c.config.c_str(), cfg.out()), "config");
    if (c.seed) check(mdne_config_set_seed(cfg.get(), *c.seed), "config");
    if (c.threads) check(mdne_config_set_threads(cfg.get(), *c.threads), "config");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text)) usage_error("cannot write " + path.string());
}

int cmd_train(const Common& c) {
    Config cfg;
    open_config(c, cfg);
    if (!c.out.empty()) check(mdne_config_set_output_dir(cfg.get(), c.out.c_str()), "config");
    const char* dir = nullptr;
    check(mdne_config_output_dir(cfg.get(), &dir), "config");

    Network net;
    check(mdne_network_load(cfg.get(), net.out()), "load");
    std::size_t n = 0, m = 0, l = 0;
    check(mdne_network_info(net.get(), &n, &m, &l), "load");
    std::cerr << "loaded " << n << " nodes, " << l << " edges, " << m << " attributes\n";

    Model model;
    Embedding emb;
    Report report;
    check(mdne_train(cfg.get(), net.get(), model.out(), emb.out(), report.out()), "train");

    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) usage_error("cannot create " + std::string(dir) + ": " + ec.message());
    const std::filesystem::path out_dir(dir);
    check(mdne_model_save(model.get(), (out_dir / "checkpoint.mdne").c_str()), "save");
    check(mdne_embedding_save(emb.get(), (out_dir / "embeddings.tsv").c_str()), "save");
    check(mdne_report_save_csv(report.get(), (out_dir / "train_report.csv").c_str()), "save");

    std::size_t iters = 0;
    check(mdne_report_iterations(report.get(), &iters), "report");
    const char* reason = nullptr;
    check(mdne_report_stop_reason(report.get(), &reason), "report");
    double first[5] = {}, last[5] = {};
    if (iters > 0) {
        check(mdne_report_losses(report.get(), 0, first), "report");
        check(mdne_report_losses(report.get(), iters - 1, last), "report");
    }
    std::cerr << "trained " << iters << " iterations (" << reason << "), L_mix " << fmt_short(first[4]) << " -> "
              << fmt_short(last[4]) << "\n"
              << "wrote " << (out_dir / "checkpoint.mdne").string() << ", embeddings.tsv, train_report.csv\n";
    return kExitOk;
}

void print_summary(const mdne_metrics* metrics) {
    std::size_t rows = 0;
    check(mdne_metrics_count(metrics, &rows), "metrics");
    std::printf("%-12s %-10s %12s %12s\n", "task", "metric", "param", "value");
    for (std::size_t i = 0; i < rows; ++i) {
        const char* task = nullptr;
        const char* metric = nullptr;
        double param = 0, value = 0;
        check(mdne_metrics_row(metrics, i, &task, &metric, &param, &value), "metrics");
        std::printf("%-12s %-10s %12g %12.4f\n", task, metric, param, value);
    }
}

std::vector<double> task_params(const std::string& task, const std::vector<std::size_t>& ks,
                                const std::vector<double>& ratios) {
    if (task == "reconstruct") {
        if (!ratios.empty()) usage_error("--ratio does not apply to reconstruct; use --k");
        return {ks.begin(), ks.end()};
    }
    if (!ks.empty()) usage_error("--k only applies to reconstruct");
    return ratios;
}

int cmd_eval(const Common& c, const std::string& task_name, const std::string& embeddings_path,
             const std::string& checkpoint_path, const std::vector<std::size_t>& ks,
             const std::vector<double>& ratios) {
    mdne_task task;
    check(mdne_task_parse(task_name.c_str(), &task), "eval");
    const std::vector<double> params = task_params(task_name, ks, ratios);
    Config cfg;
    open_config(c, cfg);
    Network net;
    check(mdne_network_load(cfg.get(), net.out()), "load");

    Embedding emb;
    if (!embeddings_path.empty() && !checkpoint_path.empty()) usage_error("give --embeddings or --checkpoint, not both");
    if (!embeddings_path.empty()) {
        check(mdne_embedding_load(embeddings_path.c_str(), emb.out()), "embeddings");
    } else if (!checkpoint_path.empty()) {
        Model model;
        check(mdne_model_load(checkpoint_path.c_str(), model.out()), "checkpoint");
        int threads = c.threads.value_or(1);
        check(mdne_model_embed_network(model.get(), net.get(), threads, emb.out()), "embed");
    }

    Metrics metrics;
    check(mdne_evaluate(cfg.get(), net.get(), emb.get(), task, params.data(), params.size(), metrics.out()), "eval");
    const char* csv = nullptr;
    check(mdne_metrics_csv(metrics.get(), &csv), "metrics");

    std::filesystem::path out_path = c.out;
    if (out_path.empty()) {
        const char* dir = nullptr;
        check(mdne_config_output_dir(cfg.get(), &dir), "config");
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        out_path = std::filesystem::path(dir) / ("metrics_" + task_name + ".csv");
    }
    write_text(out_path, csv);
    print_summary(metrics.get());
    std::cerr << "wrote " << out_path.string() << "\n";
    return kExitOk;
}

// Dense whitespace-separated values, or sparse `index:value` pairs.
std::vector<double> read_vector(const std::string& path, std::size_t width, const char* what) {
    std::ifstream in(path);
    if (!in) usage_error(std::string("cannot read ") + what + " file " + path);
    std::vector<std::string> tokens;
    for (std::string tok; in >> tok;) tokens.push_back(tok);
    std::vector<double> out(width, 0.0);
    const bool sparse = !tokens.empty() && tokens.front().find(':') != std::string::npos;
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size()) usage_error(std::string(what) + " file: bad number '" + s + "'");
        return v;
    };
    if (sparse) {
        for (const auto& tok : tokens) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos) usage_error(std::string(what) + " file: mixed dense and sparse entries");
            const double idx = number(tok.substr(0, colon));
            if (idx < 0 || idx >= static_cast<double>(width) || idx != static_cast<double>(static_cast<std::size_t>(idx))) {
                usage_error(std::string(what) + " file: index " + tok.substr(0, colon) + " out of range");
            }
            out[static_cast<std::size_t>(idx)] = number(tok.substr(colon + 1));
        }
    } else {
        if (tokens.size() != width) {
            usage_error(std::string(what) + " file: expected " + std::to_string(width) + " values, found " +
                        std::to_string(tokens.size()));
        }
        for (std::size_t i = 0; i < width; ++i) out[i] = number(tokens[i]);
    }
    return out;
}

int cmd_embed_node(const std::string& checkpoint, const std::string& structure, const std::string& attributes) {
    if (structure.empty() && attributes.empty()) usage_error("embed-node needs --structure and/or --attributes");
    Model model;
    check(mdne_model_load(checkpoint.c_str(), model.out()), "checkpoint");
    std::size_t n = 0, m = 0, d = 0;
    check(mdne_model_dims(model.get(), &n, &m, &d), "checkpoint");
    std::vector<double> s, a;
    if (!structure.empty()) s = read_vector(structure, n, "structure");
    if (!attributes.empty()) a = read_vector(attributes, m, "attributes");
    std::vector<double> y(d);
    check(mdne_model_embed_node(model.get(), s.empty() ? nullptr : s.data(), a.empty() ? nullptr : a.data(),
                                y.data()),
          "embed-node");
    for (std::size_t k = 0; k < d; ++k) std::cout << (k ? "\t" : "") << fmt(y[k]);
    std::cout << "\n";
    return kExitOk;
}

int cmd_sweep(const Common& c, const std::string& grid, const std::string& task_name,
              const std::vector<std::size_t>& ks, const std::vector<double>& ratios) {
    mdne_task task;
    check(mdne_task_parse(task_name.c_str(), &task), "sweep");
    const std::vector<double> params = task_params(task_name, ks, ratios);
    Config cfg;
    open_config(c, cfg);
    Network net;
    check(mdne_network_load(cfg.get(), net.out()), "load");
    Metrics metrics;
    check(mdne_sweep(cfg.get(), net.get(), grid.c_str(), task, params.data(), params.size(), c.threads.value_or(1),
                     metrics.out()),
          "sweep");
    const char* csv = nullptr;
    check(mdne_metrics_csv(metrics.get(), &csv), "metrics");
    std::filesystem::path out_path = c.out;
    if (out_path.empty()) {
        const char* dir = nullptr;
        check(mdne_config_output_dir(cfg.get(), &dir), "config");
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        out_path = std::filesystem::path(dir) / "sweep.csv";
    }
    write_text(out_path, csv);
    std::cout << csv;
    std::cerr << "wrote " << out_path.string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Attributed network embedding with a multimodal deep autoencoder"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(mdne_version()));

    Common common;
    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("--config", common.config, "Experiment INI file");
        if (needs_config) opt->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", common.seed, "Override [train] seed");
        sub->add_option("--threads", common.threads, "Worker threads")->check(CLI::PositiveNumber);
    };

    auto* train = app.add_subcommand("train", "Train and write checkpoint, embeddings and report");
    add_common(train, true);
    train->add_option("--out", common.out, "Output directory (default: [output] dir)");

    std::string task = "reconstruct";
    std::string embeddings, checkpoint;
    std::vector<std::size_t> ks;
    std::vector<double> ratios;
    auto* eval = app.add_subcommand("eval", "Evaluate embeddings on one task and write a metrics CSV");
    add_common(eval, true);
    eval->add_option("--task", task, "reconstruct | linkpred | attrpred | classify")->required();
    eval->add_option("--embeddings", embeddings, "Embeddings file (reconstruct, classify)");
    eval->add_option("--checkpoint", checkpoint, "Checkpoint to embed the network with (reconstruct, classify)");
    eval->add_option("--k", ks, "k values for reconstruct")->delimiter(',');
    eval->add_option("--ratio", ratios, "Hidden or test ratios for the other tasks")->delimiter(',');
    eval->add_option("--out", common.out, "Metrics CSV path (default: <output dir>/metrics_<task>.csv)");

    std::string structure, attributes;
    auto* embed = app.add_subcommand("embed-node", "Embed one node from its structure and/or attribute vector");
    embed->add_option("--checkpoint", checkpoint, "Trained checkpoint")->required()->check(CLI::ExistingFile);
    embed->add_option("--structure", structure, "Adjacency row: n values, or index:value pairs");
    embed->add_option("--attributes", attributes, "Attribute row: m values, or index:value pairs");

    std::string grid;
    auto* sweep = app.add_subcommand("sweep", "Coordinate-wise hyperparameter search");
    add_common(sweep, true);
    sweep->add_option("--grid", grid, "INI file with a [grid] section")->required()->check(CLI::ExistingFile);
    sweep->add_option("--task", task, "Objective task (default reconstruct)");
    sweep->add_option("--k", ks, "k for the reconstruct objective")->delimiter(',');
    sweep->add_option("--ratio", ratios, "Ratio for the other objectives")->delimiter(',');
    sweep->add_option("--out", common.out, "Ranked CSV path (default: <output dir>/sweep.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (*train) return cmd_train(common);
        if (*eval) return cmd_eval(common, task, embeddings, checkpoint, ks, ratios);
        if (*embed) return cmd_embed_node(checkpoint, structure, attributes);
        if (*sweep) return cmd_sweep(common, grid, task, ks, ratios);
    } catch (const Failure& f) {
        std::cerr << "mdne: " << f.message << "\n";
        return f.exit_code;
    }
    return kExitValidation;
}
