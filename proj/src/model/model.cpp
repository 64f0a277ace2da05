#include "model/model.hpp"

#include <cmath>
#include <string>

#include "core/error.hpp"

namespace mdne {
namespace {

DenseLayer zero_layer(std::size_t fan_in, std::size_t fan_out) {
    return DenseLayer{Matrix(fan_in, fan_out), std::vector<double>(fan_out, 0.0)};
}

Matrix dense_forward(const DenseLayer& layer, const Matrix& x, int threads) {
    Matrix z = matmul(x, layer.weight, threads);
    add_row_vector(z, layer.bias);
    return sigmoid(z);
}

// Turns dL/d(out) into dL/d(pre-activation) in place: out ⊙ (1 − out).
void through_sigmoid(Matrix& grad_out, const Matrix& out) {
    auto g = grad_out.values();
    auto y = out.values();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= y[i] * (1.0 - y[i]);
}

// Weight and bias gradients for one layer given dL/d(pre-activation).
void layer_gradients(const DenseLayer& layer, const Matrix& input, const Matrix& delta,
                     double upsilon, DenseLayer& grad, int threads) {
    grad.weight = matmul_tn(input, delta, threads);
    if (upsilon != 0.0) {
        auto g = grad.weight.values();
        auto w = layer.weight.values();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += upsilon * w[i];
    }
    grad.bias = column_sums(delta);
}

// 2·scale·(x̂ − x)·r² for a masked squared-error term.
Matrix reconstruction_grad(const Matrix& x_hat, const Matrix& x, double gamma, double scale) {
    Matrix g(x.rows(), x.cols());
    auto out = g.values();
    auto xh = x_hat.values();
    auto xv = x.values();
    const double g2 = gamma * gamma;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double r2 = xv[i] != 0.0 ? g2 : 1.0;
        out[i] = 2.0 * scale * (xh[i] - xv[i]) * r2;
    }
    return g;
}

double masked_sq_error(const Matrix& x_hat, const Matrix& x, double gamma) {
    if (x_hat.rows() != x.rows() || x_hat.cols() != x.cols()) {
        throw ShapeError("reconstruction loss: shape mismatch");
    }
    double s = 0.0;
    auto xh = x_hat.values();
    auto xv = x.values();
    for (std::size_t i = 0; i < xv.size(); ++i) {
        const double r = xv[i] != 0.0 ? gamma : 1.0;
        const double d = (xh[i] - xv[i]) * r;
        s += d * d;
    }
    return s;
}

template <class Params, class Fn>
void visit_layers(Params& p, Fn&& fn) {
    if (p.spec.preprocess) {
        fn(p.struct_in);
        fn(p.attr_in);
    }
    for (auto& l : p.encoder) fn(l);
    for (auto& l : p.decoder) fn(l);
    if (p.spec.preprocess) {
        fn(p.struct_out);
        fn(p.attr_out);
    }
}

void require_finite_nonneg(double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ValidationError(std::string(name) + " must be a finite value >= 0");
    }
}

}  // namespace

void LayerSpec::validate(std::size_t n, std::size_t m) const {
    if (hidden_dims.empty()) throw ValidationError("layer spec needs at least one encoder width");
    for (std::size_t w : hidden_dims) {
        if (w == 0) throw ValidationError("layer widths must be >= 1");
    }
    if (preprocess && (pre_struct_dim == 0 || pre_attr_dim == 0)) {
        throw ValidationError("pre-processing layers need nonzero widths");
    }
    std::vector<std::size_t> widths{n + m};
    if (preprocess) widths.push_back(pre_struct_dim + pre_attr_dim);
    widths.insert(widths.end(), hidden_dims.begin(), hidden_dims.end());
    for (std::size_t i = 1; i < widths.size(); ++i) {
        if (widths[i] >= widths[i - 1]) {
            throw ValidationError("layer widths must strictly decrease: " +
                                  std::to_string(widths[i - 1]) + " -> " + std::to_string(widths[i]));
        }
    }
    const std::size_t d = embedding_dim();
    if (d >= n || d >= m) {
        throw ValidationError("embedding width " + std::to_string(d) +
                              " must be below both node and attribute counts");
    }
}

void PenaltyConfig::validate() const {
    if (!(gamma1 > 1.0) || !std::isfinite(gamma1)) throw ValidationError("gamma1 must be > 1");
    if (!(gamma2 > 1.0) || !std::isfinite(gamma2)) throw ValidationError("gamma2 must be > 1");
}

void LossWeights::validate() const {
    require_finite_nonneg(lambda, "lambda");
    require_finite_nonneg(alpha, "alpha");
    require_finite_nonneg(upsilon, "upsilon");
}

bool ModelParams::same_values(const ModelParams& other) const {
    if (spec != other.spec || n != other.n || m != other.m) return false;
    std::vector<std::span<const double>> mine;
    std::vector<std::span<const double>> theirs;
    for_each_tensor(*this, [&](ConstTensorRef t) { mine.push_back(t.values); });
    for_each_tensor(other, [&](ConstTensorRef t) { theirs.push_back(t.values); });
    if (mine.size() != theirs.size()) return false;
    for (std::size_t i = 0; i < mine.size(); ++i) {
        if (!std::equal(mine[i].begin(), mine[i].end(), theirs[i].begin(), theirs[i].end())) return false;
    }
    return true;
}

void for_each_tensor(ModelParams& params, const std::function<void(TensorRef)>& fn) {
    visit_layers(params, [&](DenseLayer& l) {
        fn({l.weight.values(), true});
        fn({l.bias, false});
    });
}

void for_each_tensor(const ModelParams& params, const std::function<void(ConstTensorRef)>& fn) {
    visit_layers(params, [&](const DenseLayer& l) {
        fn({l.weight.values(), true});
        fn({l.bias, false});
    });
}

ModelParams zero_params(const LayerSpec& spec, std::size_t n, std::size_t m) {
    spec.validate(n, m);
    ModelParams p;
    p.spec = spec;
    p.n = n;
    p.m = m;
    if (spec.preprocess) {
        p.struct_in = zero_layer(n, spec.pre_struct_dim);
        p.attr_in = zero_layer(m, spec.pre_attr_dim);
        p.struct_out = zero_layer(spec.pre_struct_dim, n);
        p.attr_out = zero_layer(spec.pre_attr_dim, m);
    }
    std::vector<std::size_t> widths{spec.joint_input_dim(n, m)};
    widths.insert(widths.end(), spec.hidden_dims.begin(), spec.hidden_dims.end());
    for (std::size_t k = 1; k < widths.size(); ++k) p.encoder.push_back(zero_layer(widths[k - 1], widths[k]));
    for (std::size_t k = widths.size() - 1; k >= 1; --k) p.decoder.push_back(zero_layer(widths[k], widths[k - 1]));
    return p;
}

ModelParams random_params(const LayerSpec& spec, std::size_t n, std::size_t m, std::mt19937_64& rng) {
    ModelParams p = zero_params(spec, n, m);
    visit_layers(p, [&](DenseLayer& l) {
        const double r = std::sqrt(6.0 / static_cast<double>(l.fan_in() + l.fan_out()));
        std::uniform_real_distribution<double> dist(-r, r);
        for (double& w : l.weight.values()) w = dist(rng);
    });
    return p;
}

ForwardCache forward(const ModelParams& params, const Matrix& s_rows, const Matrix& a_rows, int threads) {
    if (s_rows.cols() != params.n || a_rows.cols() != params.m || s_rows.rows() != a_rows.rows()) {
        throw ShapeError("forward: expected batch×" + std::to_string(params.n) + " and batch×" +
                         std::to_string(params.m) + " inputs, got " + std::to_string(s_rows.rows()) +
                         "x" + std::to_string(s_rows.cols()) + " and " + std::to_string(a_rows.rows()) +
                         "x" + std::to_string(a_rows.cols()));
    }
    ForwardCache cache;
    cache.params = &params;
    cache.revision = params.revision;
    if (params.spec.preprocess) {
        cache.struct_hidden = dense_forward(params.struct_in, s_rows, threads);
        cache.attr_hidden = dense_forward(params.attr_in, a_rows, threads);
        cache.joint_input = hconcat(cache.struct_hidden, cache.attr_hidden);
    } else {
        cache.joint_input = hconcat(s_rows, a_rows);
    }
    const Matrix* x = &cache.joint_input;
    cache.encoder_out.reserve(params.encoder.size());
    for (const auto& layer : params.encoder) {
        cache.encoder_out.push_back(dense_forward(layer, *x, threads));
        x = &cache.encoder_out.back();
    }
    cache.decoder_out.reserve(params.decoder.size());
    for (const auto& layer : params.decoder) {
        cache.decoder_out.push_back(dense_forward(layer, *x, threads));
        x = &cache.decoder_out.back();
    }
    const Matrix& joint = cache.decoder_out.back();
    if (params.spec.preprocess) {
        const std::size_t ps = params.spec.pre_struct_dim;
        cache.s_hat = dense_forward(params.struct_out, column_slice(joint, 0, ps), threads);
        cache.a_hat = dense_forward(params.attr_out, column_slice(joint, ps, params.spec.pre_attr_dim), threads);
    } else {
        cache.s_hat = column_slice(joint, 0, params.n);
        cache.a_hat = column_slice(joint, params.n, params.m);
    }
    return cache;
}

double loss_first_order(const Matrix& y, std::span<const BatchEdge> edges) {
    double total = 0.0;
    for (const auto& e : edges) {
        if (e.i >= y.rows() || e.j >= y.rows()) throw ShapeError("loss_first_order: edge index outside batch");
        auto yi = y.row(e.i);
        auto yj = y.row(e.j);
        double d2 = 0.0;
        for (std::size_t k = 0; k < yi.size(); ++k) {
            const double d = yi[k] - yj[k];
            d2 += d * d;
        }
        total += e.weight * d2;
    }
    return total;
}

double loss_second_order(const Matrix& s_hat, const Matrix& s, double gamma1) {
    return masked_sq_error(s_hat, s, gamma1);
}

double loss_attribute(const Matrix& a_hat, const Matrix& a, double gamma2) {
    return masked_sq_error(a_hat, a, gamma2);
}

double loss_reg(const ModelParams& params) {
    double s = 0.0;
    for_each_tensor(params, [&](ConstTensorRef t) {
        if (!t.is_weight) return;
        for (double w : t.values) s += w * w;
    });
    return 0.5 * s;
}

double loss_total(const LossComponents& c, const LossWeights& w) {
    return w.lambda * c.attribute + w.alpha * c.second + c.first + w.upsilon * c.reg;
}

LossComponents evaluate_loss(const ModelParams& params, const ForwardCache& cache, const Batch& batch,
                             const PenaltyConfig& penalties) {
    LossComponents c;
    c.first = batch.first_order_scale * loss_first_order(cache.embedding(), batch.edges);
    c.second = loss_second_order(cache.s_hat, batch.s_rows, penalties.gamma1);
    c.attribute = loss_attribute(cache.a_hat, batch.a_rows, penalties.gamma2);
    c.reg = loss_reg(params);
    return c;
}

Gradients backward(const ModelParams& params, const ForwardCache& cache, const Batch& batch,
                   const LossWeights& weights, const PenaltyConfig& penalties, int threads) {
    if (cache.params != &params || cache.revision != params.revision) {
        throw ContractError("backward: forward cache does not belong to the current parameters");
    }
    const std::size_t rows = batch.s_rows.rows();
    if (cache.s_hat.rows() != rows || cache.a_hat.rows() != rows || batch.a_rows.rows() != rows ||
        cache.s_hat.cols() != batch.s_rows.cols() || cache.a_hat.cols() != batch.a_rows.cols() ||
        cache.encoder_out.size() != params.encoder.size() ||
        cache.decoder_out.size() != params.decoder.size()) {
        throw ContractError("backward: forward cache does not match the batch");
    }
    const double ups = weights.upsilon;
    Gradients g = zero_params(params.spec, params.n, params.m);
    g.revision = 0;

    Matrix ds = reconstruction_grad(cache.s_hat, batch.s_rows, penalties.gamma1, weights.alpha);
    Matrix da = reconstruction_grad(cache.a_hat, batch.a_rows, penalties.gamma2, weights.lambda);

    // Gradient w.r.t. the post-activation joint reconstruction.
    Matrix d_joint;
    if (params.spec.preprocess) {
        const std::size_t ps = params.spec.pre_struct_dim;
        const Matrix& joint = cache.decoder_out.back();
        through_sigmoid(ds, cache.s_hat);
        through_sigmoid(da, cache.a_hat);
        const Matrix zs = column_slice(joint, 0, ps);
        const Matrix za = column_slice(joint, ps, params.spec.pre_attr_dim);
        layer_gradients(params.struct_out, zs, ds, ups, g.struct_out, threads);
        layer_gradients(params.attr_out, za, da, ups, g.attr_out, threads);
        d_joint = hconcat(matmul_nt(ds, params.struct_out.weight, threads),
                          matmul_nt(da, params.attr_out.weight, threads));
    } else {
        d_joint = hconcat(ds, da);
    }

    Matrix d_out = std::move(d_joint);
    for (std::size_t l = params.decoder.size(); l-- > 0;) {
        const Matrix& out = cache.decoder_out[l];
        const Matrix& in = l == 0 ? cache.embedding() : cache.decoder_out[l - 1];
        through_sigmoid(d_out, out);
        layer_gradients(params.decoder[l], in, d_out, ups, g.decoder[l], threads);
        d_out = matmul_nt(d_out, params.decoder[l].weight, threads);
    }

    // First-order term acts directly on Y.
    const Matrix& y = cache.embedding();
    for (const auto& e : batch.edges) {
        auto yi = y.row(e.i);
        auto yj = y.row(e.j);
        auto gi = d_out.row(e.i);
        auto gj = d_out.row(e.j);
        const double c = 2.0 * batch.first_order_scale * e.weight;
        for (std::size_t k = 0; k < yi.size(); ++k) {
            const double diff = c * (yi[k] - yj[k]);
            gi[k] += diff;
            gj[k] -= diff;
        }
    }

    for (std::size_t l = params.encoder.size(); l-- > 0;) {
        const Matrix& out = cache.encoder_out[l];
        const Matrix& in = l == 0 ? cache.joint_input : cache.encoder_out[l - 1];
        through_sigmoid(d_out, out);
        layer_gradients(params.encoder[l], in, d_out, ups, g.encoder[l], threads);
        if (l > 0 || params.spec.preprocess) d_out = matmul_nt(d_out, params.encoder[l].weight, threads);
    }

    if (params.spec.preprocess) {
        const std::size_t ps = params.spec.pre_struct_dim;
        Matrix d_s = column_slice(d_out, 0, ps);
        Matrix d_a = column_slice(d_out, ps, params.spec.pre_attr_dim);
        through_sigmoid(d_s, cache.struct_hidden);
        through_sigmoid(d_a, cache.attr_hidden);
        layer_gradients(params.struct_in, batch.s_rows, d_s, ups, g.struct_in, threads);
        layer_gradients(params.attr_in, batch.a_rows, d_a, ups, g.attr_in, threads);
    }
    return g;
}

void apply_gradients(ModelParams& params, const Gradients& grads, double lr) {
    std::vector<std::span<const double>> g;
    for_each_tensor(grads, [&](ConstTensorRef t) { g.push_back(t.values); });
    std::size_t idx = 0;
    for_each_tensor(params, [&](TensorRef t) {
        if (idx >= g.size() || g[idx].size() != t.values.size()) {
            throw ShapeError("apply_gradients: gradient layout does not match parameters");
        }
        const auto& gv = g[idx++];
        for (std::size_t i = 0; i < t.values.size(); ++i) t.values[i] -= lr * gv[i];
    });
    ++params.revision;
}

std::vector<double> embed_new_node(const ModelParams& params,
                                   std::optional<std::span<const double>> structure,
                                   std::optional<std::span<const double>> attributes) {
    if (!structure && !attributes) {
        throw ValidationError("embed_new_node: need a structure vector, an attribute vector, or both");
    }
    Matrix s(1, params.n);
    Matrix a(1, params.m);
    if (structure) {
        if (structure->size() != params.n) {
            throw ShapeError("structure vector has " + std::to_string(structure->size()) +
                             " entries, model expects " + std::to_string(params.n));
        }
        std::copy(structure->begin(), structure->end(), s.row(0).begin());
    }
    if (attributes) {
        if (attributes->size() != params.m) {
            throw ShapeError("attribute vector has " + std::to_string(attributes->size()) +
                             " entries, model expects " + std::to_string(params.m));
        }
        std::copy(attributes->begin(), attributes->end(), a.row(0).begin());
    }
    const ForwardCache cache = forward(params, s, a);
    auto y = cache.embedding().row(0);
    return {y.begin(), y.end()};
}

}  // namespace mdne
