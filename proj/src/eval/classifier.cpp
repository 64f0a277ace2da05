#include "eval/classifier.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "core/error.hpp"

namespace mdne {
namespace {

constexpr std::size_t kMaxRedraws = 20;

// log(1 + exp(-t)) without overflow.
double log1p_exp_neg(double t) {
    return t > 0.0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
}

double margin(const Matrix& x, std::size_t i, const std::vector<double>& w) {
    auto row = x.row(i);
    double z = w.back();
    for (std::size_t k = 0; k < row.size(); ++k) z += w[k] * row[k];
    return z;
}

double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Solves H p = g for symmetric positive definite H (row-major, dim × dim).
std::vector<double> cholesky_solve(std::vector<double> h, std::vector<double> g, std::size_t dim) {
    for (std::size_t j = 0; j < dim; ++j) {
        double d = h[j * dim + j];
        for (std::size_t k = 0; k < j; ++k) d -= h[j * dim + k] * h[j * dim + k];
        if (!(d > 0.0)) throw Error("logistic regression: Hessian not positive definite");
        const double l = std::sqrt(d);
        h[j * dim + j] = l;
        for (std::size_t i = j + 1; i < dim; ++i) {
            double s = h[i * dim + j];
            for (std::size_t k = 0; k < j; ++k) s -= h[i * dim + k] * h[j * dim + k];
            h[i * dim + j] = s / l;
        }
    }
    for (std::size_t i = 0; i < dim; ++i) {
        double s = g[i];
        for (std::size_t k = 0; k < i; ++k) s -= h[i * dim + k] * g[k];
        g[i] = s / h[i * dim + i];
    }
    for (std::size_t i = dim; i-- > 0;) {
        double s = g[i];
        for (std::size_t k = i + 1; k < dim; ++k) s -= h[k * dim + i] * g[k];
        g[i] = s / h[i * dim + i];
    }
    return g;
}

}  // namespace

double logistic_objective(const Matrix& x, const std::vector<int>& y, const std::vector<double>& w, double c) {
    double f = 0.0;
    for (double v : w) f += 0.5 * v * v;
    for (std::size_t i = 0; i < x.rows(); ++i) f += c * log1p_exp_neg(y[i] * margin(x, i, w));
    return f;
}

std::vector<double> fit_logistic(const Matrix& x, const std::vector<int>& y, const LogisticOptions& options,
                                 const std::vector<double>& init) {
    const std::size_t n = x.rows();
    const std::size_t dim = x.cols() + 1;
    if (y.size() != n) throw ShapeError("fit_logistic: label count differs from row count");
    for (int v : y) {
        if (v != 1 && v != -1) throw ValidationError("fit_logistic: labels must be +1 or -1");
    }
    if (!(options.c > 0.0) || !(options.tol > 0.0)) throw ValidationError("fit_logistic: need c > 0 and tol > 0");
    std::vector<double> w = init.empty() ? std::vector<double>(dim, 0.0) : init;
    if (w.size() != dim) throw ShapeError("fit_logistic: init has wrong length");

    double f = logistic_objective(x, y, w, options.c);
    double g0 = -1.0;
    std::vector<double> grad(dim), hess(dim * dim);
    for (std::size_t step = 0; step < options.max_newton_steps; ++step) {
        grad = w;
        std::fill(hess.begin(), hess.end(), 0.0);
        for (std::size_t k = 0; k < dim; ++k) hess[k * dim + k] = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double yz = y[i] * margin(x, i, w);
            const double s = sigmoid(yz);
            const double coef = options.c * (s - 1.0) * y[i];
            const double d = options.c * s * (1.0 - s);
            auto row = x.row(i);
            for (std::size_t a = 0; a < dim; ++a) {
                const double xa = a + 1 == dim ? 1.0 : row[a];
                grad[a] += coef * xa;
                if (d == 0.0) continue;
                const double dxa = d * xa;
                for (std::size_t b = 0; b <= a; ++b) hess[a * dim + b] += dxa * (b + 1 == dim ? 1.0 : row[b]);
            }
        }
        for (std::size_t a = 0; a < dim; ++a) {
            for (std::size_t b = 0; b < a; ++b) hess[b * dim + a] = hess[a * dim + b];
        }
        const double gn = norm(grad);
        if (g0 < 0.0) g0 = gn;
        if (gn <= options.tol * std::max(1.0, g0)) break;

        const std::vector<double> p = cholesky_solve(hess, grad, dim);
        double slope = 0.0;
        for (std::size_t a = 0; a < dim; ++a) slope += grad[a] * p[a];
        double t = 1.0;
        std::vector<double> trial(dim);
        bool moved = false;
        for (int ls = 0; ls < 50; ++ls) {
            for (std::size_t a = 0; a < dim; ++a) trial[a] = w[a] - t * p[a];
            const double ft = logistic_objective(x, y, trial, options.c);
            if (ft <= f - 1e-4 * t * slope) {
                w = trial;
                f = ft;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if (!moved) break;  // at machine precision
    }
    return w;
}

OneVsRest OneVsRest::fit(const Matrix& x, const std::vector<int>& labels, const LogisticOptions& options) {
    OneVsRest model;
    const std::set<int> distinct(labels.begin(), labels.end());
    model.classes.assign(distinct.begin(), distinct.end());
    for (int c : model.classes) {
        std::vector<int> y(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] == c ? 1 : -1;
        model.weights.push_back(fit_logistic(x, y, options));
    }
    return model;
}

int OneVsRest::predict(std::span<const double> row) const {
    if (classes.empty()) throw ContractError("OneVsRest::predict: model not trained");
    int best = classes.front();
    double best_score = -INFINITY;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        const auto& w = weights[c];
        if (w.size() != row.size() + 1) throw ShapeError("OneVsRest::predict: feature width mismatch");
        double z = w.back();
        for (std::size_t k = 0; k < row.size(); ++k) z += w[k] * row[k];
        if (z > best_score) {
            best_score = z;
            best = classes[c];
        }
    }
    return best;
}

F1Scores f1_scores(const std::vector<int>& truth, const std::vector<int>& predicted) {
    if (truth.size() != predicted.size()) throw ShapeError("f1_scores: length mismatch");
    if (truth.empty()) throw ValidationError("f1_scores: no samples");
    std::map<int, std::array<std::size_t, 3>> counts;  // tp, fp, fn
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == predicted[i]) {
            ++counts[truth[i]][0];
            ++tp;
        } else {
            ++counts[predicted[i]][1];
            ++counts[truth[i]][2];
            ++fp;
            ++fn;
        }
    }
    F1Scores out;
    out.micro = 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
    double macro = 0.0;
    for (const auto& [cls, c] : counts) {
        macro += 2.0 * static_cast<double>(c[0]) / static_cast<double>(2 * c[0] + c[1] + c[2]);
    }
    out.macro = macro / static_cast<double>(counts.size());
    return out;
}

ClassificationResult classify(const Matrix& emb, const Labels& labels, double test_ratio, std::uint64_t seed,
                              std::size_t repeats, const LogisticOptions& options) {
    if (!(test_ratio > 0.0 && test_ratio < 1.0)) throw ValidationError("classify: test ratio must be in (0, 1)");
    if (repeats == 0) throw ValidationError("classify: repeats must be >= 1");
    if (labels.class_of.size() != emb.rows()) throw ShapeError("classify: labels do not match embedding rows");

    std::vector<std::size_t> labelled;
    for (std::size_t i = 0; i < labels.class_of.size(); ++i) {
        if (labels.class_of[i] != Labels::kUnlabeled) labelled.push_back(i);
    }
    if (labelled.size() < 2) throw ValidationError("classify: need at least 2 labelled nodes");
    std::set<int> all_classes;
    for (std::size_t i : labelled) all_classes.insert(labels.class_of[i]);

    const auto test_count = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(test_ratio * static_cast<double>(labelled.size()))), 1,
        labelled.size() - 1);

    ClassificationResult out;
    out.repeats = repeats;
    out.degenerate = all_classes.size() == 1;
    if (out.degenerate) {
        // Every prediction is the single class, so both scores are 1.
        out.micro_f1 = out.macro_f1 = 1.0;
        return out;
    }

    std::mt19937_64 rng(seed);
    double micro = 0.0, macro = 0.0;
    for (std::size_t r = 0; r < repeats; ++r) {
        std::vector<std::size_t> order = labelled;
        std::size_t draws = 0;
        for (;;) {
            std::shuffle(order.begin(), order.end(), rng);
            std::set<int> train_classes;
            for (std::size_t i = test_count; i < order.size(); ++i) train_classes.insert(labels.class_of[order[i]]);
            if (train_classes.size() == all_classes.size()) break;
            ++out.redraws;
            if (++draws >= kMaxRedraws) {
                throw ValidationError("classify: could not draw a split with every class in training after " +
                                      std::to_string(kMaxRedraws) + " attempts");
            }
        }
        const std::span<const std::size_t> test(order.data(), test_count);
        const std::span<const std::size_t> train(order.data() + test_count, order.size() - test_count);
        const Matrix xtrain = gather_rows(emb, train);
        std::vector<int> ytrain;
        for (std::size_t i : train) ytrain.push_back(labels.class_of[i]);
        const OneVsRest model = OneVsRest::fit(xtrain, ytrain, options);

        std::vector<int> truth, predicted;
        for (std::size_t i : test) {
            truth.push_back(labels.class_of[i]);
            predicted.push_back(model.predict(emb.row(i)));
        }
        const F1Scores f = f1_scores(truth, predicted);
        micro += f.micro;
        macro += f.macro;
    }
    out.micro_f1 = micro / static_cast<double>(repeats);
    out.macro_f1 = macro / static_cast<double>(repeats);
    return out;
}

}  // namespace mdne
