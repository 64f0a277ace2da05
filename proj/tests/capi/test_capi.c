/* Exercises the C interface from plain C. argv[1] = toy config, argv[2] = scratch dir. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "mdne/mdne.h"

static int failures = 0;

#define EXPECT(cond)                                                                     \
    do {                                                                                 \
        if (!(cond)) {                                                                   \
            fprintf(stderr, "%s:%d: expected %s (last error: %s)\n", __FILE__, __LINE__, \
                    #cond, mdne_last_error());                                           \
            ++failures;                                                                  \
        }                                                                                \
    } while (0)

static void join(char* out, size_t cap, const char* dir, const char* name) {
    snprintf(out, cap, "%s/%s", dir, name);
}

static void test_errors(void) {
    mdne_config* cfg = NULL;
    mdne_task task;
    EXPECT(mdne_config_load(NULL, &cfg) == MDNE_ERR_INVALID_ARGUMENT);
    EXPECT(strlen(mdne_last_error()) > 0);
    EXPECT(mdne_config_load("/definitely/not/here.ini", &cfg) == MDNE_ERR_IO);
    EXPECT(cfg == NULL);
    EXPECT(mdne_task_parse("classify", &task) == MDNE_OK && task == MDNE_TASK_CLASSIFY);
    EXPECT(mdne_task_parse("linkpred", &task) == MDNE_OK && task == MDNE_TASK_LINKPRED);
    EXPECT(mdne_task_parse("dance", &task) == MDNE_ERR_VALIDATION);
    EXPECT(strcmp(mdne_status_name(MDNE_ERR_SHAPE), "shape error") == 0);
    EXPECT(strlen(mdne_version()) > 0);
    /* free functions accept NULL */
    mdne_config_free(NULL);
    mdne_network_free(NULL);
    mdne_model_free(NULL);
    mdne_embedding_free(NULL);
    mdne_report_free(NULL);
    mdne_metrics_free(NULL);
}

static void test_pipeline(const char* config_path, const char* scratch) {
    mdne_config* cfg = NULL;
    mdne_network* net = NULL;
    mdne_model* model = NULL;
    mdne_embedding* emb = NULL;
    mdne_report* report = NULL;
    size_t n = 0, m = 0, e = 0, d = 0, rows = 0, iters = 0;
    char path[4096];

    EXPECT(mdne_config_load(config_path, &cfg) == MDNE_OK);
    EXPECT(mdne_config_set_output_dir(cfg, scratch) == MDNE_OK);
    EXPECT(mdne_config_set_threads(cfg, 0) == MDNE_ERR_VALIDATION);
    EXPECT(mdne_network_load(cfg, &net) == MDNE_OK);
    EXPECT(mdne_network_info(net, &n, &m, &e) == MDNE_OK);
    EXPECT(n == 36 && m == 16 && e > 0);

    EXPECT(mdne_train(cfg, net, &model, &emb, &report) == MDNE_OK);
    EXPECT(mdne_model_dims(model, &n, &m, &d) == MDNE_OK);
    EXPECT(n == 36 && m == 16 && d == 4);
    EXPECT(mdne_embedding_dims(emb, &rows, &d) == MDNE_OK);
    EXPECT(rows == 36 && d == 4);
    EXPECT(mdne_report_iterations(report, &iters) == MDNE_OK);
    EXPECT(iters >= 1 && iters <= 60);
    {
        double losses[5];
        const char* reason = NULL;
        EXPECT(mdne_report_losses(report, 0, losses) == MDNE_OK);
        EXPECT(losses[4] > 0.0);
        EXPECT(mdne_report_losses(report, iters, losses) == MDNE_ERR_INVALID_ARGUMENT);
        EXPECT(mdne_report_stop_reason(report, &reason) == MDNE_OK);
        EXPECT(strcmp(reason, "max_iters") == 0 || strcmp(reason, "converged") == 0);
    }

    /* Saved model reproduces the trained embedding, row for row. */
    join(path, sizeof path, scratch, "capi.mdne");
    EXPECT(mdne_model_save(model, path) == MDNE_OK);
    {
        mdne_model* back = NULL;
        mdne_embedding* again = NULL;
        double a[4], b[4];
        size_t r, k;
        int same = 1;
        EXPECT(mdne_model_load(path, &back) == MDNE_OK);
        EXPECT(mdne_model_embed_network(back, net, 1, &again) == MDNE_OK);
        for (r = 0; r < 36 && again; ++r) {
            mdne_embedding_row(emb, r, a);
            mdne_embedding_row(again, r, b);
            for (k = 0; k < 4; ++k) same = same && a[k] == b[k];
        }
        EXPECT(same);
        EXPECT(mdne_embedding_row(emb, 36, a) == MDNE_ERR_INVALID_ARGUMENT);
        mdne_embedding_free(again);
        mdne_model_free(back);
    }

    /* Attribute-only embedding of a new node. */
    {
        double attrs[16] = {0};
        double y[4];
        attrs[0] = 1.0;
        attrs[3] = 1.0;
        EXPECT(mdne_model_embed_node(model, NULL, attrs, y) == MDNE_OK);
        EXPECT(y[0] > 0.0 && y[0] < 1.0 && isfinite(y[3]));
        EXPECT(mdne_model_embed_node(model, NULL, NULL, y) == MDNE_ERR_VALIDATION);
    }

    /* Embedding file round trip. */
    join(path, sizeof path, scratch, "capi.tsv");
    EXPECT(mdne_embedding_save(emb, path) == MDNE_OK);
    {
        mdne_embedding* loaded = NULL;
        EXPECT(mdne_embedding_load(path, &loaded) == MDNE_OK);
        EXPECT(mdne_embedding_dims(loaded, &rows, &d) == MDNE_OK && rows == 36 && d == 4);
        mdne_embedding_free(loaded);
    }
    join(path, sizeof path, scratch, "capi_report.csv");
    EXPECT(mdne_report_save_csv(report, path) == MDNE_OK);

    /* Evaluation. */
    {
        mdne_metrics* metrics = NULL;
        const double ks[2] = {10, 30};
        const double ratio = 0.3;
        const double bad_k = 0;
        size_t count = 0;
        const char *task = NULL, *metric = NULL, *csv = NULL;
        double param = 0, value = -1;
        EXPECT(mdne_evaluate(cfg, net, emb, MDNE_TASK_RECONSTRUCT, ks, 2, &metrics) == MDNE_OK);
        EXPECT(mdne_metrics_count(metrics, &count) == MDNE_OK && count == 2);
        EXPECT(mdne_metrics_row(metrics, 1, &task, &metric, &param, &value) == MDNE_OK);
        EXPECT(strcmp(task, "reconstruct") == 0 && strcmp(metric, "precision") == 0);
        EXPECT(param == 30 && value >= 0.0 && value <= 1.0);
        EXPECT(mdne_metrics_csv(metrics, &csv) == MDNE_OK);
        EXPECT(strncmp(csv, "task,dataset,param,metric,value,seed\n", 37) == 0);
        mdne_metrics_free(metrics);
        metrics = NULL;

        EXPECT(mdne_evaluate(cfg, net, emb, MDNE_TASK_CLASSIFY, &ratio, 1, &metrics) == MDNE_OK);
        EXPECT(mdne_metrics_count(metrics, &count) == MDNE_OK && count == 2);
        mdne_metrics_free(metrics);
        metrics = NULL;

        EXPECT(mdne_evaluate(cfg, net, emb, MDNE_TASK_RECONSTRUCT, &bad_k, 1, &metrics) == MDNE_ERR_VALIDATION);
        EXPECT(metrics == NULL);
        EXPECT(mdne_evaluate(cfg, net, NULL, MDNE_TASK_CLASSIFY, &ratio, 1, &metrics) == MDNE_ERR_INVALID_ARGUMENT);
        EXPECT(mdne_evaluate(cfg, net, emb, MDNE_TASK_LINKPRED, &ratio, 1, &metrics) == MDNE_ERR_INVALID_ARGUMENT);
    }

    /* Sweep over a two-value grid. */
    {
        mdne_metrics* metrics = NULL;
        const double ratio = 0.3;
        size_t count = 0;
        FILE* f;
        join(path, sizeof path, scratch, "grid.ini");
        f = fopen(path, "w");
        fputs("[grid]\nlambda = 0, 0.02\n", f);
        fclose(f);
        EXPECT(mdne_config_set_seed(cfg, 3) == MDNE_OK);
        EXPECT(mdne_sweep(cfg, net, path, MDNE_TASK_CLASSIFY, &ratio, 1, 2, &metrics) == MDNE_OK);
        EXPECT(mdne_metrics_count(metrics, &count) == MDNE_OK && count == 2);
        mdne_metrics_free(metrics);
    }

    mdne_report_free(report);
    mdne_embedding_free(emb);
    mdne_model_free(model);
    mdne_network_free(net);
    mdne_config_free(cfg);
}

int main(int argc, char** argv) {
    if (argc != 3) {
        fprintf(stderr, "usage: test_capi <toy.ini> <scratch dir>\n");
        return 2;
    }
    test_errors();
    test_pipeline(argv[1], argv[2]);
    if (failures) {
        fprintf(stderr, "%d check(s) failed\n", failures);
        return 1;
    }
    printf("capi: all checks passed\n");
    return 0;
}
