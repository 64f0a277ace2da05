#include "train/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <unordered_map>

#include "core/error.hpp"
#include "core/text.hpp"

namespace mdne {
namespace {

constexpr std::size_t kPatience = 5;
constexpr std::size_t kMaxLrRetries = 3;
constexpr std::size_t kFullBatchLimit = 5000;
constexpr std::size_t kDefaultBatch = 1024;

struct Diverged {
    std::size_t iteration;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed ^ (0x9e3779b97f4a7c15ULL * (salt + 1));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

bool params_finite(const ModelParams& p) {
    bool ok = true;
    for_each_tensor(p, [&](ConstTensorRef t) { ok = ok && all_finite(t.values); });
    return ok;
}

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

void TrainConfig::validate(std::size_t n, std::size_t m) const {
    spec.validate(n, m);
    weights.validate();
    penalties.validate();
    if (!(lr > 0.0) || !std::isfinite(lr)) throw ValidationError("lr must be > 0");
    if (max_iters < 1) throw ValidationError("max_iters must be >= 1");
    if (!full_batch && batch_size == 0 && n == 0) throw ValidationError("empty network");
    if (!(convergence_tol >= 0.0)) throw ValidationError("convergence_tol must be >= 0");
    if (pretrain) {
        if (!(rbm.lr > 0.0) || rbm.batch == 0) throw ValidationError("pretraining needs lr > 0 and batch >= 1");
    }
}

std::size_t TrainConfig::effective_batch(std::size_t n) const {
    if (full_batch) return n;
    if (batch_size > 0) return std::min(batch_size, n);
    return n <= kFullBatchLimit ? n : kDefaultBatch;
}

void TrainReport::write_csv(std::ostream& out) const {
    out << "iteration,l_1st,l_2nd,l_att,l_reg,l_mix,elapsed_ms\n";
    for (const auto& r : iterations) {
        out << r.iteration << "," << text::format_double(r.components.first) << ","
            << text::format_double(r.components.second) << ","
            << text::format_double(r.components.attribute) << ","
            << text::format_double(r.components.reg) << "," << text::format_double(r.mix) << ","
            << text::format_double(r.elapsed_ms) << "\n";
    }
}

void TrainReport::save_csv(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    write_csv(out);
}

Batch make_batch(const AttributedNetwork& net, std::span<const std::size_t> nodes) {
    Batch b;
    b.s_rows = net.structure_rows(nodes);
    b.a_rows = net.attribute_rows(nodes);
    const double scale = net.max_edge_weight();
    if (nodes.size() == net.node_count()) {
        // Full batch: row r is node nodes[r]; usually the identity order.
        std::vector<std::size_t> local(net.node_count());
        for (std::size_t r = 0; r < nodes.size(); ++r) local[nodes[r]] = r;
        b.edges.reserve(net.edge_count());
        for (const auto& e : net.edges()) b.edges.push_back({local[e.u], local[e.v], e.weight / scale});
        return b;
    }
    std::unordered_map<std::size_t, std::size_t> local;
    local.reserve(nodes.size() * 2);
    for (std::size_t r = 0; r < nodes.size(); ++r) local.emplace(nodes[r], r);
    for (const auto& e : net.edges()) {
        auto a = local.find(e.u);
        if (a == local.end()) continue;
        auto c = local.find(e.v);
        if (c == local.end()) continue;
        b.edges.push_back({a->second, c->second, e.weight / scale});
    }
    if (!b.edges.empty()) {
        b.first_order_scale = static_cast<double>(net.edge_count()) / static_cast<double>(b.edges.size());
    }
    return b;
}

Matrix embed_all(const ModelParams& params, const AttributedNetwork& net, int threads, std::size_t batch) {
    const std::size_t n = net.node_count();
    if (n != params.n || net.attribute_count() != params.m) {
        throw ShapeError("embed_all: network is " + std::to_string(n) + "x" +
                         std::to_string(net.attribute_count()) + " but model expects " +
                         std::to_string(params.n) + "x" + std::to_string(params.m));
    }
    Matrix out(n, params.spec.embedding_dim());
    std::vector<std::size_t> idx;
    for (std::size_t start = 0; start < n; start += batch) {
        const std::size_t end = std::min(n, start + batch);
        idx.resize(end - start);
        std::iota(idx.begin(), idx.end(), start);
        const ForwardCache cache = forward(params, net.structure_rows(idx), net.attribute_rows(idx), threads);
        for (std::size_t r = 0; r < idx.size(); ++r) {
            auto y = cache.embedding().row(r);
            std::copy(y.begin(), y.end(), out.row(start + r).begin());
        }
    }
    return out;
}

namespace {

// One training attempt at a fixed learning rate. Throws Diverged.
TrainReport run_sgd(ModelParams& params, const AttributedNetwork& net, const TrainConfig& config,
                    double lr, const IterationCallback& on_iteration) {
    const auto start = Clock::now();
    const std::size_t n = net.node_count();
    const std::size_t batch = config.effective_batch(n);
    const bool full = batch >= n;
    std::mt19937_64 order_rng(mix_seed(config.seed, 2));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Batch full_batch;
    if (full) full_batch = make_batch(net, order);

    TrainReport report;
    std::size_t streak = 0;
    report.stop_reason = "max_iters";
    for (std::size_t it = 0; it < config.max_iters; ++it) {
        IterationRecord rec;
        rec.iteration = it;
        auto step = [&](const Batch& b) {
            const ForwardCache cache = forward(params, b.s_rows, b.a_rows, config.threads);
            const LossComponents c = evaluate_loss(params, cache, b, config.penalties);
            if (!std::isfinite(loss_total(c, config.weights))) throw Diverged{it};
            const Gradients g = backward(params, cache, b, config.weights, config.penalties, config.threads);
            // Per-node step: summed losses grow with the batch, the step should not.
            apply_gradients(params, g, lr / static_cast<double>(b.s_rows.rows()));
            if (!params_finite(params)) throw Diverged{it};
            return c;
        };
        if (full) {
            rec.components = step(full_batch);
        } else {
            std::shuffle(order.begin(), order.end(), order_rng);
            std::size_t batches = 0;
            for (std::size_t s = 0; s < n; s += batch) {
                const std::size_t e = std::min(n, s + batch);
                const Batch b = make_batch(net, std::span<const std::size_t>(order.data() + s, e - s));
                const LossComponents c = step(b);
                rec.components.first += c.first;
                rec.components.second += c.second;
                rec.components.attribute += c.attribute;
                ++batches;
            }
            // Each batch's rescaled first-order term estimates the full one.
            rec.components.first /= static_cast<double>(batches);
            rec.components.reg = loss_reg(params);
        }
        rec.mix = loss_total(rec.components, config.weights);
        rec.elapsed_ms = ms_since(start);
        if (!report.iterations.empty()) {
            const double prev = report.iterations.back().mix;
            const double rel = prev != 0.0 ? std::abs(rec.mix - prev) / std::abs(prev) : std::abs(rec.mix);
            streak = rel < config.convergence_tol ? streak + 1 : 0;
        }
        report.iterations.push_back(rec);
        if (on_iteration) on_iteration(rec);
        if (streak >= kPatience) {
            report.stop_reason = "converged";
            break;
        }
    }
    report.wall_ms = ms_since(start);
    return report;
}

}  // namespace

FitResult fit(const AttributedNetwork& net, const TrainConfig& config, const IterationCallback& on_iteration) {
    config.validate(net.node_count(), net.attribute_count());
    const auto start = Clock::now();

    ModelParams init;
    if (config.pretrain) {
        RbmConfig rbm = config.rbm;
        rbm.seed = mix_seed(config.seed, 1);
        rbm.threads = config.threads;
        init = pretrain_stack(net, config.spec, rbm);
    } else {
        std::mt19937_64 rng(mix_seed(config.seed, 0));
        init = random_params(config.spec, net.node_count(), net.attribute_count(), rng);
    }

    double lr = config.lr;
    for (std::size_t attempt = 0;; ++attempt) {
        ModelParams params = init;
        try {
            TrainReport report = run_sgd(params, net, config, lr, on_iteration);
            report.lr_retries = attempt;
            report.final_lr = lr;
            report.wall_ms = ms_since(start);
            Matrix emb = embed_all(params, net, config.threads);
            return FitResult{std::move(params), std::move(emb), std::move(report)};
        } catch (const Diverged& d) {
            if (attempt == kMaxLrRetries) {
                throw TrainingError("training diverged (non-finite loss) at iteration " +
                                        std::to_string(d.iteration) + " with lr " + text::format_double(lr) +
                                        " after " + std::to_string(attempt) + " halvings",
                                    d.iteration);
            }
            lr *= 0.5;
        }
    }
}

}  // namespace mdne
