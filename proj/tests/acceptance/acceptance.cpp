// Acceptance suite: one PASS/FAIL/SKIP line per criterion.
//
//   acceptance core   criteria 1, 2, 9 (always runnable)
//   acceptance cora   criteria 3-8; needs MDNE_CORA_DIR with cora.content and cora.cites
//   acceptance all    both
//
// Exit status: 0 when everything that ran passed, 1 on any failure, 77 when
// the cora criteria were requested but the dataset is missing.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "eval/classifier.hpp"
#include "eval/metrics.hpp"
#include "graph/network.hpp"
#include "graph/split.hpp"
#include "model/model.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/tempdir.hpp"
#include "train/trainer.hpp"

using namespace mdne;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Tally {
    int passed = 0, failed = 0, skipped = 0;

    void report(int id, const char* name, bool ok, const std::string& detail) {
        std::printf("[%s] %d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
        std::fflush(stdout);
        (ok ? passed : failed)++;
    }
    void skip(int id, const char* name, const std::string& why) {
        std::printf("[SKIP] %d %s: %s\n", id, name, why.c_str());
        std::fflush(stdout);
        ++skipped;
    }
};

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

// ---------------------------------------------------------------- criterion 1

void gradient_correctness(Tally& t) {
    const auto start = Clock::now();
    double worst = 0.0;
    std::size_t entries = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        testing::Rng rng(1000 + seed);
        testing::NetworkShape shape;
        shape.n = testing::pick(rng, 6, 8);
        shape.m = testing::pick(rng, 4, 6);
        shape.weighted = seed % 2 == 1;
        const auto net = testing::random_network(rng, shape);
        const ModelParams p = testing::random_full_params(rng, testing::toy_spec(), shape.n, shape.m);
        std::vector<std::size_t> all(shape.n);
        for (std::size_t i = 0; i < shape.n; ++i) all[i] = i;
        const Batch b = make_batch(net, all);
        const LossWeights w{testing::uniform(rng, 0.01, 1), testing::uniform(rng, 0.1, 1), testing::uniform(rng, 1e-4, 0.1)};
        const PenaltyConfig pen{testing::uniform(rng, 2, 20), testing::uniform(rng, 2, 20)};
        const Gradients g = backward(p, forward(p, b.s_rows, b.a_rows), b, w, pen);
        const auto numeric = oracle::numeric_gradient(p, [&](const ModelParams& q) { return oracle::total_loss(q, b, w, pen); });
        std::size_t tensor = 0;
        for_each_tensor(g, [&](ConstTensorRef ref) {
            for (std::size_t i = 0; i < ref.values.size(); ++i) {
                const double a = ref.values[i], num = numeric[tensor][i];
                // Relative error; entries below 1e-3 in magnitude are compared against 1e-3.
                worst = std::max(worst, std::abs(a - num) / std::max({std::abs(a), std::abs(num), 1e-3}));
                ++entries;
            }
            ++tensor;
        });
    }
    const double secs = seconds_since(start);
    t.report(1, "gradient correctness", worst <= 1e-4 && secs < 10.0,
             fmt("max relative error %.2e over %.0f entries of 10 models (limit 1e-4); %.2f s (limit 10 s)", worst,
                 static_cast<double>(entries), secs));
}

// ---------------------------------------------------------------- criterion 2

void oracle_equivalence(Tally& t) {
    const auto start = Clock::now();
    std::size_t checks = 0, mismatches = 0, instances = 0;
    for (std::uint64_t seed = 0; instances < 20; ++seed) {
        testing::Rng rng(2000 + seed);
        testing::NetworkShape shape;
        shape.n = testing::pick(rng, 6, 10);
        shape.m = testing::pick(rng, 3, 6);
        shape.edge_density = 0.35;
        shape.attr_density = 0.4;
        const auto net = testing::random_network(rng, shape);
        if (net.edge_count() < 4) continue;
        ++instances;
        Matrix emb = testing::random_matrix(rng, shape.n, 3);
        if (seed % 3 == 0) {
            for (double& v : emb.values()) v = std::round(v * 2.0) / 2.0;  // force ties
        }

        std::vector<std::size_t> ks;
        for (std::size_t k = 1; k <= shape.n * (shape.n - 1) / 2; ++k) ks.push_back(k);
        const RankingResult r = network_reconstruction(emb, net, ks);
        for (std::size_t i = 0; i < ks.size(); ++i, ++checks) mismatches += r.precision[i] != oracle::precision_at_k(emb, net, ks[i]);

        const EvalSplit links = split_links(net, 0.3, seed);
        std::vector<double> pos, neg;
        for (const auto& e : links.hidden_edges) pos.push_back(oracle::cosine(emb, e.u, e.v));
        for (const auto& p : links.negatives) neg.push_back(oracle::cosine(emb, p.u, p.v));
        mismatches += link_prediction_auc(emb, links) != oracle::auc(pos, neg);
        ++checks;

        const EvalSplit cells = split_attributes(net, 0.3, seed);
        const AttributeScores s = attribute_scores(emb, cells);
        for (std::size_t i = 0; i < s.p.size(); ++i, ++checks) {
            const auto& c = cells.hidden_cells[i];
            mismatches += s.p[i] != oracle::attribute_p(emb, cells.train_network, c.node, c.attribute);
        }
    }
    const double secs = seconds_since(start);
    t.report(2, "oracle equivalence", mismatches == 0 && secs < 5.0,
             fmt("%.0f mismatches in %.0f exact comparisons (precision@k, link AUC, attribute p) over 20 instances; %.2f s (limit 5 s)",
                 static_cast<double>(mismatches), static_cast<double>(checks), secs));
}

// ---------------------------------------------------------------- criterion 9

int run_cli(const std::string& args) {
    const std::string cmd = std::string(MDNE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void reproducibility(Tally& t) {
    testing::TempDir dir;
    const std::string cfg = std::string(MDNE_TEST_DATA_DIR) + "/toy.ini";
    const int a = run_cli("train --config '" + cfg + "' --out '" + (dir / "a").string() + "'");
    const int b = run_cli("train --config '" + cfg + "' --out '" + (dir / "b").string() + "'");
    if (a != 0 || b != 0) {
        t.report(9, "reproducibility", false, fmt("train exited with %.0f and %.0f", a, b));
        return;
    }
    const std::string ea = testing::read_file(dir / "a" / "embeddings.tsv");
    const std::string eb = testing::read_file(dir / "b" / "embeddings.tsv");
    t.report(9, "reproducibility", !ea.empty() && ea == eb,
             ea == eb ? fmt("two train runs wrote byte-identical embeddings (%.0f bytes)", static_cast<double>(ea.size()))
                      : std::string("embedding files differ"));
}

// ------------------------------------------------------------- criteria 3-8

TrainConfig cora_config(bool preprocess, int threads) {
    TrainConfig c;
    c.spec.preprocess = preprocess;
    if (preprocess) {
        c.spec.pre_struct_dim = 300;
        c.spec.pre_attr_dim = 200;
        c.spec.hidden_dims = {128};
    } else {
        c.spec.hidden_dims = {500, 128};
    }
    c.max_iters = 400;
    c.seed = 1;
    c.threads = threads;
    return c;
}

void cora_suite(Tally& t, const fs::path& dir) {
    const int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const AttributedNetwork net = load_cora_format(dir / "cora.content", dir / "cora.cites");
    std::printf("cora: %zu nodes, %zu edges, %zu attributes; %d threads\n", net.node_count(), net.edge_count(),
                net.attribute_count(), threads);
    std::fflush(stdout);
    const Labels& labels = *net.labels();
    auto micro = [&](const Matrix& emb) { return classify(emb, labels, 0.1, 1, 10); };

    const auto start = Clock::now();
    const FitResult main_fit = fit(net, cora_config(true, threads));
    const double fit_secs = seconds_since(start);

    {
        const std::vector<std::size_t> ks{1000, 5000};
        const RankingResult r = network_reconstruction(main_fit.embedding, net, ks);
        t.report(3, "cora network reconstruction", r.precision[0] >= 0.90 && r.precision[1] >= 0.60,
                 fmt("precision@1000 %.4f (>= 0.90), precision@5000 %.4f (>= 0.60); training %.0f s", r.precision[0],
                     r.precision[1], fit_secs));
    }

    const ClassificationResult with_pre = micro(main_fit.embedding);
    t.report(5, "cora classification", with_pre.micro_f1 >= 0.75 && with_pre.macro_f1 >= 0.72,
             fmt("micro-F1 %.4f (>= 0.75), macro-F1 %.4f (>= 0.72) at test ratio 0.1 over 10 splits", with_pre.micro_f1,
                 with_pre.macro_f1));

    {
        const auto& it = main_fit.report.iterations;
        const double first = it.front().mix, last = it.back().mix;
        const double at40 = it[std::min<std::size_t>(40, it.size() - 1)].mix;
        const double share = first > last ? (first - at40) / (first - last) : 0.0;
        t.report(6, "convergence shape", share >= 0.90,
                 fmt("%.1f%% of the L_mix decrease over %.0f iterations happened by iteration 40 (>= 90%%)", 100.0 * share,
                     static_cast<double>(it.size())));
    }

    {
        std::vector<double> aucs;
        for (double ratio : {0.05, 0.25, 0.45}) {
            const EvalSplit split = split_attributes(net, ratio, 1);
            const FitResult f = fit(split.train_network, cora_config(true, threads));
            aucs.push_back(attribute_prediction_auc(f.embedding, split));
        }
        const bool monotone = aucs[1] <= aucs[0] + 0.01 && aucs[2] <= aucs[1] + 0.01;
        t.report(4, "cora attribute prediction", aucs[0] >= 0.70 && monotone,
                 fmt("AUC %.4f / %.4f / %.4f at ratios 0.05 / 0.25 / 0.45 (>= 0.70 at 0.05, non-increasing within 0.01)",
                     aucs[0], aucs[1], aucs[2]));
    }

    {
        const FitResult flat = fit(net, cora_config(false, threads));
        const double without = micro(flat.embedding).micro_f1;
        t.report(7, "preprocessing ablation", with_pre.micro_f1 >= without - 0.02,
                 fmt("micro-F1 with pre-processing %.4f, without %.4f (with >= without - 0.02)", with_pre.micro_f1, without));
    }

    {
        std::vector<double> scores;
        for (double lambda : {0.0, 0.01, 0.02, 0.03, 0.04}) {
            if (lambda == 0.03) {
                scores.push_back(with_pre.micro_f1);  // the default model above
                continue;
            }
            TrainConfig c = cora_config(true, threads);
            c.weights.lambda = lambda;
            scores.push_back(micro(fit(net, c).embedding).micro_f1);
        }
        const double hi = std::max({scores[2], scores[3], scores[4]});
        const double lo = std::min({scores[2], scores[3], scores[4]});
        t.report(8, "lambda sensitivity", scores[2] >= scores[0] && hi - lo <= 0.03,
                 fmt("micro-F1 %.4f at lambda 0, %.4f at 0.02; spread over [0.02, 0.04] %.4f (<= 0.03)", scores[0], scores[2],
                     hi - lo) +
                     fmt(" [0.01: %.4f, 0.03: %.4f, 0.04: %.4f]", scores[1], scores[3], scores[4]));
    }
}

}  // namespace

int main(int argc, char** argv) {
    const std::string mode = argc > 1 ? argv[1] : "all";
    if (mode != "core" && mode != "cora" && mode != "all") {
        std::fprintf(stderr, "usage: acceptance [core|cora|all]\n");
        return 2;
    }
    Tally t;
    if (mode != "cora") {
        gradient_correctness(t);
        oracle_equivalence(t);
        reproducibility(t);
    }
    if (mode != "core") {
        const char* env = std::getenv("MDNE_CORA_DIR");
        const fs::path dir = env ? env : "";
        if (!env || !fs::exists(dir / "cora.content") || !fs::exists(dir / "cora.cites")) {
            const std::string why = "cora dataset not available (set MDNE_CORA_DIR to a directory with cora.content and cora.cites)";
            const char* names[] = {"cora network reconstruction", "cora attribute prediction", "cora classification",
                                   "convergence shape", "preprocessing ablation", "lambda sensitivity"};
            for (int id = 3; id <= 8; ++id) t.skip(id, names[id - 3], why);
        } else {
            try {
                cora_suite(t, dir);
            } catch (const std::exception& e) {
                std::printf("[FAIL] cora suite aborted: %s\n", e.what());
                ++t.failed;
            }
        }
    }
    std::printf("summary: %d passed, %d failed, %d skipped\n", t.passed, t.failed, t.skipped);
    if (t.failed > 0) return 1;
    if (t.passed == 0 && t.skipped > 0) return 77;
    return 0;
}
