#include "mdne/mdne.h"

#include <cmath>
#include <exception>
#include <new>
#include <optional>
#include <sstream>
#include <string>

#include "core/error.hpp"
#include "eval/metrics.hpp"
#include "experiment/config.hpp"
#include "experiment/embedding_io.hpp"
#include "experiment/tasks.hpp"
#include "graph/split.hpp"
#include "model/checkpoint.hpp"
#include "train/grid_search.hpp"
#include "train/trainer.hpp"

struct mdne_config {
    mdne::ExperimentConfig value;
    std::string output_dir;
};

struct mdne_network {
    mdne::AttributedNetwork value;
};

struct mdne_model {
    mdne::ModelParams value;
};

struct mdne_embedding {
    mdne::EmbeddingTable value;
};

struct mdne_report {
    mdne::TrainReport value;
};

struct mdne_metrics {
    std::vector<mdne::MetricRow> rows;
    std::string csv;
};

namespace {

thread_local std::string last_error;

mdne_status fail(mdne_status status, const std::string& message) {
    last_error = message;
    return status;
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
mdne_status guarded(Fn&& fn) {
    try {
        fn();
        return MDNE_OK;
    } catch (const mdne::ParseError& e) {
        return fail(MDNE_ERR_PARSE, e.what());
    } catch (const mdne::ShapeError& e) {
        return fail(MDNE_ERR_SHAPE, e.what());
    } catch (const mdne::ValidationError& e) {
        return fail(MDNE_ERR_VALIDATION, e.what());
    } catch (const mdne::IoError& e) {
        return fail(MDNE_ERR_IO, e.what());
    } catch (const mdne::TrainingError& e) {
        return fail(MDNE_ERR_TRAINING, e.what());
    } catch (const mdne::ContractError& e) {
        return fail(MDNE_ERR_CONTRACT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(MDNE_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(MDNE_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(MDNE_ERR_INTERNAL, "unknown error");
    }
}

#define MDNE_REQUIRE(ptr)                                                                 \
    do {                                                                                  \
        if ((ptr) == nullptr) return fail(MDNE_ERR_INVALID_ARGUMENT, #ptr " is NULL");    \
    } while (0)

const char* task_name(mdne_task task) {
    switch (task) {
    case MDNE_TASK_RECONSTRUCT: return "reconstruct";
    case MDNE_TASK_LINKPRED: return "linkpred";
    case MDNE_TASK_ATTRPRED: return "attrpred";
    case MDNE_TASK_CLASSIFY: return "classify";
    }
    return nullptr;
}

std::vector<std::size_t> to_ks(const double* params, std::size_t count, const std::vector<std::size_t>& fallback) {
    if (count == 0) return fallback;
    std::vector<std::size_t> ks;
    for (std::size_t i = 0; i < count; ++i) {
        const double k = params[i];
        if (!(k >= 1.0) || k != std::floor(k)) {
            throw mdne::ValidationError("k must be a positive integer, got " + std::to_string(k));
        }
        ks.push_back(static_cast<std::size_t>(k));
    }
    return ks;
}

std::vector<double> to_ratios(const double* params, std::size_t count, const std::vector<double>& fallback) {
    if (count == 0) return fallback;
    std::vector<double> out(params, params + count);
    for (double r : out) {
        if (!(r > 0.0 && r < 1.0)) throw mdne::ValidationError("ratio must be in (0, 1), got " + std::to_string(r));
    }
    return out;
}

void finish_metrics(mdne_metrics& m) {
    std::ostringstream out;
    mdne::write_metrics_csv(m.rows, out);
    m.csv = out.str();
}

}  // namespace

extern "C" {

const char* mdne_version(void) { return "1.0.0"; }

const char* mdne_last_error(void) { return last_error.c_str(); }

const char* mdne_status_name(mdne_status status) {
    switch (status) {
    case MDNE_OK: return "ok";
    case MDNE_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MDNE_ERR_PARSE: return "parse error";
    case MDNE_ERR_SHAPE: return "shape error";
    case MDNE_ERR_VALIDATION: return "validation error";
    case MDNE_ERR_IO: return "i/o error";
    case MDNE_ERR_TRAINING: return "training error";
    case MDNE_ERR_CONTRACT: return "contract error";
    case MDNE_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

mdne_status mdne_config_load(const char* path, mdne_config** out) {
    MDNE_REQUIRE(path);
    MDNE_REQUIRE(out);
    return guarded([&] {
        auto cfg = std::make_unique<mdne_config>();
        cfg->value = mdne::load_experiment_config(path);
        cfg->output_dir = cfg->value.output_dir.string();
        *out = cfg.release();
    });
}

mdne_status mdne_config_set_seed(mdne_config* config, uint64_t seed) {
    MDNE_REQUIRE(config);
    config->value.train.seed = seed;
    return MDNE_OK;
}

mdne_status mdne_config_set_threads(mdne_config* config, int threads) {
    MDNE_REQUIRE(config);
    if (threads < 1) return fail(MDNE_ERR_VALIDATION, "threads must be >= 1");
    config->value.train.threads = threads;
    return MDNE_OK;
}

mdne_status mdne_config_set_output_dir(mdne_config* config, const char* dir) {
    MDNE_REQUIRE(config);
    MDNE_REQUIRE(dir);
    return guarded([&] {
        config->value.output_dir = dir;
        config->output_dir = dir;
    });
}

mdne_status mdne_config_output_dir(const mdne_config* config, const char** out) {
    MDNE_REQUIRE(config);
    MDNE_REQUIRE(out);
    *out = config->output_dir.c_str();
    return MDNE_OK;
}

mdne_status mdne_config_dataset_name(const mdne_config* config, const char** out) {
    MDNE_REQUIRE(config);
    MDNE_REQUIRE(out);
    *out = config->value.data.name.c_str();
    return MDNE_OK;
}

void mdne_config_free(mdne_config* config) { delete config; }

mdne_status mdne_network_load(const mdne_config* config, mdne_network** out) {
    MDNE_REQUIRE(config);
    MDNE_REQUIRE(out);
    return guarded([&] {
        auto net = std::make_unique<mdne_network>();
        net->value = mdne::load_network(config->value.data);
        *out = net.release();
    });
}

mdne_status mdne_network_info(const mdne_network* network, size_t* nodes, size_t* attributes, size_t* edges) {
    MDNE_REQUIRE(network);
    if (nodes) *nodes = network->value.node_count();
    if (attributes) *attributes = network->value.attribute_count();
    if (edges) *edges = network->value.edge_count();
    return MDNE_OK;
}

void mdne_network_free(mdne_network* network) { delete network; }

mdne_status mdne_train(const mdne_config* config, const mdne_network* network, mdne_model** model,
                       mdne_embedding** embedding, mdne_report** report) {
    MDNE_REQUIRE(config);
    MDNE_REQUIRE(network);
    return guarded([&] {
        mdne::FitResult result = mdne::fit(network->value, config->value.train);
        std::unique_ptr<mdne_model> m;
        std::unique_ptr<mdne_embedding> e;
        std::unique_ptr<mdne_report> r;
        if (model) m.reset(new mdne_model{std::move(result.params)});
        if (embedding) {
            e.reset(new mdne_embedding{});
            e->value.node_ids = network->value.node_ids();
            e->value.values = std::move(result.embedding);
        }
        if (report) r.reset(new mdne_report{std::move(result.report)});
        if (model) *model = m.release();
        if (embedding) *embedding = e.release();
        if (report) *report = r.release();
    });
}

mdne_status mdne_report_iterations(const mdne_report* report, size_t* count) {
    MDNE_REQUIRE(report);
    MDNE_REQUIRE(count);
    *count = report->value.iterations.size();
    return MDNE_OK;
}

mdne_status mdne_report_losses(const mdne_report* report, size_t iteration, double losses[5]) {
    MDNE_REQUIRE(report);
    MDNE_REQUIRE(losses);
    if (iteration >= report->value.iterations.size()) return fail(MDNE_ERR_INVALID_ARGUMENT, "iteration out of range");
    const auto& rec = report->value.iterations[iteration];
    losses[0] = rec.components.first;
    losses[1] = rec.components.second;
    losses[2] = rec.components.attribute;
    losses[3] = rec.components.reg;
    losses[4] = rec.mix;
    return MDNE_OK;
}

mdne_status mdne_report_stop_reason(const mdne_report* report, const char** out) {
    MDNE_REQUIRE(report);
    MDNE_REQUIRE(out);
    *out = report->value.stop_reason.c_str();
    return MDNE_OK;
}

mdne_status mdne_report_save_csv(const mdne_report* report, const char* path) {
    MDNE_REQUIRE(report);
    MDNE_REQUIRE(path);
    return guarded([&] { report->value.save_csv(path); });
}

void mdne_report_free(mdne_report* report) { delete report; }

mdne_status mdne_model_save(const mdne_model* model, const char* path) {
    MDNE_REQUIRE(model);
    MDNE_REQUIRE(path);
    return guarded([&] { mdne::save_checkpoint(model->value, path); });
}

mdne_status mdne_model_load(const char* path, mdne_model** out) {
    MDNE_REQUIRE(path);
    MDNE_REQUIRE(out);
    return guarded([&] {
        auto m = std::make_unique<mdne_model>();
        m->value = mdne::load_checkpoint(path);
        *out = m.release();
    });
}

mdne_status mdne_model_dims(const mdne_model* model, size_t* nodes, size_t* attributes, size_t* embedding_dim) {
    MDNE_REQUIRE(model);
    if (nodes) *nodes = model->value.n;
    if (attributes) *attributes = model->value.m;
    if (embedding_dim) *embedding_dim = model->value.spec.embedding_dim();
    return MDNE_OK;
}

mdne_status mdne_model_embed_network(const mdne_model* model, const mdne_network* network, int threads,
                                     mdne_embedding** out) {
    MDNE_REQUIRE(model);
    MDNE_REQUIRE(network);
    MDNE_REQUIRE(out);
    if (threads < 1) return fail(MDNE_ERR_VALIDATION, "threads must be >= 1");
    return guarded([&] {
        auto e = std::make_unique<mdne_embedding>();
        e->value.values = mdne::embed_all(model->value, network->value, threads);
        e->value.node_ids = network->value.node_ids();
        *out = e.release();
    });
}

mdne_status mdne_model_embed_node(const mdne_model* model, const double* structure, const double* attributes,
                                  double* out) {
    MDNE_REQUIRE(model);
    MDNE_REQUIRE(out);
    return guarded([&] {
        std::optional<std::span<const double>> s, a;
        if (structure) s = std::span<const double>(structure, model->value.n);
        if (attributes) a = std::span<const double>(attributes, model->value.m);
        const std::vector<double> y = mdne::embed_new_node(model->value, s, a);
        std::copy(y.begin(), y.end(), out);
    });
}

void mdne_model_free(mdne_model* model) { delete model; }

mdne_status mdne_embedding_save(const mdne_embedding* embedding, const char* path) {
    MDNE_REQUIRE(embedding);
    MDNE_REQUIRE(path);
    return guarded([&] { mdne::save_embeddings(path, embedding->value.node_ids, embedding->value.values); });
}

mdne_status mdne_embedding_load(const char* path, mdne_embedding** out) {
    MDNE_REQUIRE(path);
    MDNE_REQUIRE(out);
    return guarded([&] {
        auto e = std::make_unique<mdne_embedding>();
        e->value = mdne::load_embeddings(path);
        *out = e.release();
    });
}

mdne_status mdne_embedding_dims(const mdne_embedding* embedding, size_t* rows, size_t* dim) {
    MDNE_REQUIRE(embedding);
    if (rows) *rows = embedding->value.values.rows();
    if (dim) *dim = embedding->value.values.cols();
    return MDNE_OK;
}

mdne_status mdne_embedding_row(const mdne_embedding* embedding, size_t row, double* out) {
    MDNE_REQUIRE(embedding);
    MDNE_REQUIRE(out);
    if (row >= embedding->value.values.rows()) return fail(MDNE_ERR_INVALID_ARGUMENT, "row out of range");
    const auto r = embedding->value.values.row(row);
    std::copy(r.begin(), r.end(), out);
    return MDNE_OK;
}

void mdne_embedding_free(mdne_embedding* embedding) { delete embedding; }

mdne_status mdne_task_parse(const char* name, mdne_task* out) {
    MDNE_REQUIRE(name);
    MDNE_REQUIRE(out);
    for (mdne_task t : {MDNE_TASK_RECONSTRUCT, MDNE_TASK_LINKPRED, MDNE_TASK_ATTRPRED, MDNE_TASK_CLASSIFY}) {
        if (std::string(name) == task_name(t)) {
            *out = t;
            return MDNE_OK;
        }
    }
    return fail(MDNE_ERR_VALIDATION,
                std::string("unknown task '") + name + "' (expected reconstruct, linkpred, attrpred or classify)");
}

mdne_status mdne_evaluate(const mdne_config* config, const mdne_network* network, const mdne_embedding* embedding,
                          mdne_task task, const double* params, size_t param_count, mdne_metrics** out) {
    MDNE_REQUIRE(config);
    MDNE_REQUIRE(network);
    MDNE_REQUIRE(out);
    if (param_count > 0 && params == nullptr) return fail(MDNE_ERR_INVALID_ARGUMENT, "params is NULL");
    if (task_name(task) == nullptr) return fail(MDNE_ERR_INVALID_ARGUMENT, "unknown task");
    const bool needs_embedding = task == MDNE_TASK_RECONSTRUCT || task == MDNE_TASK_CLASSIFY;
    if (needs_embedding && embedding == nullptr) {
        return fail(MDNE_ERR_INVALID_ARGUMENT, std::string(task_name(task)) + " needs an embedding");
    }
    if (!needs_embedding && embedding != nullptr) {
        return fail(MDNE_ERR_INVALID_ARGUMENT, std::string(task_name(task)) +
                                             " trains on its own residual network; do not pass an embedding");
    }
    return guarded([&] {
        const auto& cfg = config->value;
        const auto& net = network->value;
        const std::uint64_t seed = cfg.train.seed;
        auto m = std::make_unique<mdne_metrics>();
        if (embedding && embedding->value.node_ids != net.node_ids()) {
            if (embedding->value.values.rows() != net.node_count()) {
                throw mdne::ShapeError("embedding has " + std::to_string(embedding->value.values.rows()) +
                                       " rows but the network has " + std::to_string(net.node_count()) + " nodes");
            }
            throw mdne::ValidationError("embedding node ids do not match the network's node order");
        }
        switch (task) {
        case MDNE_TASK_RECONSTRUCT:
            m->rows = mdne::eval_reconstruct(embedding->value.values, net, to_ks(params, param_count, cfg.eval.ks),
                                             cfg.data.name, seed);
            break;
        case MDNE_TASK_CLASSIFY:
            m->rows = mdne::eval_classify(embedding->value.values, net,
                                          to_ratios(params, param_count, cfg.eval.test_ratios), cfg.eval.repeats,
                                          cfg.data.name, seed);
            break;
        case MDNE_TASK_LINKPRED:
            m->rows = mdne::eval_linkpred(net, cfg.train, to_ratios(params, param_count, cfg.eval.link_ratios),
                                          cfg.data.name, seed);
            break;
        case MDNE_TASK_ATTRPRED:
            m->rows = mdne::eval_attrpred(net, cfg.train, to_ratios(params, param_count, cfg.eval.attr_ratios),
                                          cfg.data.name, seed);
            break;
        }
        finish_metrics(*m);
        *out = m.release();
    });
}

mdne_status mdne_sweep(const mdne_config* config, const mdne_network* network, const char* grid_path,
                       mdne_task objective, const double* params, size_t param_count, int threads,
                       mdne_metrics** out) {
    MDNE_REQUIRE(config);
    MDNE_REQUIRE(network);
    MDNE_REQUIRE(grid_path);
    MDNE_REQUIRE(out);
    if (param_count > 0 && params == nullptr) return fail(MDNE_ERR_INVALID_ARGUMENT, "params is NULL");
    if (task_name(objective) == nullptr) return fail(MDNE_ERR_INVALID_ARGUMENT, "unknown task");
    if (threads < 1) return fail(MDNE_ERR_VALIDATION, "threads must be >= 1");
    return guarded([&] {
        const auto& cfg = config->value;
        const mdne::Grid grid = mdne::load_grid(grid_path);
        mdne::Objective score;
        switch (objective) {
        case MDNE_TASK_RECONSTRUCT: {
            const std::size_t k = to_ks(params, param_count, cfg.eval.ks).front();
            score = [k](const mdne::AttributedNetwork& net, const mdne::TrainConfig& tc) {
                const mdne::FitResult f = mdne::fit(net, tc);
                return mdne::network_reconstruction(f.embedding, net, std::span<const std::size_t>(&k, 1))
                    .precision.front();
            };
            break;
        }
        case MDNE_TASK_CLASSIFY: {
            const double ratio = to_ratios(params, param_count, cfg.eval.test_ratios).front();
            const std::size_t repeats = cfg.eval.repeats;
            score = [ratio, repeats](const mdne::AttributedNetwork& net, const mdne::TrainConfig& tc) {
                if (!net.labels()) throw mdne::ValidationError("classify: the network has no labels");
                const mdne::FitResult f = mdne::fit(net, tc);
                return mdne::classify(f.embedding, *net.labels(), ratio, tc.seed, repeats).micro_f1;
            };
            break;
        }
        case MDNE_TASK_LINKPRED: {
            const double ratio = to_ratios(params, param_count, cfg.eval.link_ratios).front();
            score = [ratio](const mdne::AttributedNetwork& net, const mdne::TrainConfig& tc) {
                const mdne::EvalSplit split = mdne::split_links(net, ratio, tc.seed);
                return mdne::link_prediction_auc(mdne::fit(split.train_network, tc).embedding, split);
            };
            break;
        }
        case MDNE_TASK_ATTRPRED: {
            const double ratio = to_ratios(params, param_count, cfg.eval.attr_ratios).front();
            score = [ratio](const mdne::AttributedNetwork& net, const mdne::TrainConfig& tc) {
                const mdne::EvalSplit split = mdne::split_attributes(net, ratio, tc.seed);
                return mdne::attribute_prediction_auc(mdne::fit(split.train_network, tc).embedding, split);
            };
            break;
        }
        }
        mdne::GridOptions options;
        options.threads = threads;
        const auto cells = mdne::grid_search(network->value, cfg.train, grid, score, options);
        auto m = std::make_unique<mdne_metrics>();
        for (const auto& c : cells) {
            m->rows.push_back({task_name(objective), cfg.data.name, static_cast<double>(c.index),
                               c.score ? "score" : "error", c.score.value_or(NAN), c.seed});
        }
        std::ostringstream csv;
        mdne::write_grid_csv(cells, csv);
        m->csv = csv.str();
        *out = m.release();
    });
}

mdne_status mdne_metrics_count(const mdne_metrics* metrics, size_t* count) {
    MDNE_REQUIRE(metrics);
    MDNE_REQUIRE(count);
    *count = metrics->rows.size();
    return MDNE_OK;
}

mdne_status mdne_metrics_row(const mdne_metrics* metrics, size_t index, const char** task, const char** metric,
                             double* param, double* value) {
    MDNE_REQUIRE(metrics);
    if (index >= metrics->rows.size()) return fail(MDNE_ERR_INVALID_ARGUMENT, "row out of range");
    const auto& r = metrics->rows[index];
    if (task) *task = r.task.c_str();
    if (metric) *metric = r.metric.c_str();
    if (param) *param = r.param;
    if (value) *value = r.value;
    return MDNE_OK;
}

mdne_status mdne_metrics_csv(const mdne_metrics* metrics, const char** out) {
    MDNE_REQUIRE(metrics);
    MDNE_REQUIRE(out);
    *out = metrics->csv.c_str();
    return MDNE_OK;
}

void mdne_metrics_free(mdne_metrics* metrics) { delete metrics; }

}  // extern "C"
