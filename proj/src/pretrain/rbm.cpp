#include "pretrain/rbm.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "core/error.hpp"

namespace mdne {
namespace {

Matrix affine_sigmoid(const Matrix& x, const Matrix& w, std::span<const double> bias, int threads) {
    Matrix z = matmul(x, w, threads);
    add_row_vector(z, bias);
    return sigmoid(z);
}

double mean_sq_diff(const Matrix& a, const Matrix& b) {
    if (a.empty()) return 0.0;
    return frobenius_sq(subtract(a, b)) / static_cast<double>(a.size());
}

std::uint64_t layer_seed(std::uint64_t seed, std::uint64_t layer) {
    // splitmix64 finalizer
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (layer + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void copy_encoder(const RbmLayer& rbm, DenseLayer& enc, DenseLayer& dec) {
    enc.weight = rbm.weight;
    enc.bias = rbm.hidden_bias;
    dec.weight = transpose(rbm.weight);
    dec.bias = rbm.visible_bias;
}

}  // namespace

Matrix RbmLayer::hidden_probabilities(const Matrix& visible, int threads) const {
    return affine_sigmoid(visible, weight, hidden_bias, threads);
}

Matrix RbmLayer::visible_probabilities(const Matrix& hidden, int threads) const {
    Matrix z = matmul_nt(hidden, weight, threads);
    add_row_vector(z, visible_bias);
    return sigmoid(z);
}

double RbmLayer::reconstruction_error(const Matrix& data, int threads) const {
    return mean_sq_diff(data, visible_probabilities(hidden_probabilities(data, threads), threads));
}

RbmLayer train_rbm(const Matrix& data, std::size_t hidden_dim, const RbmConfig& config) {
    if (data.rows() == 0 || data.cols() == 0) throw ValidationError("train_rbm: empty data");
    if (hidden_dim == 0) throw ValidationError("train_rbm: hidden_dim must be >= 1");
    if (config.batch == 0 || !(config.lr > 0.0)) throw ValidationError("train_rbm: need lr > 0 and batch >= 1");
    for (double v : data.values()) {
        if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("train_rbm: data must lie in [0, 1]");
    }

    std::mt19937_64 rng(config.seed);
    RbmLayer rbm;
    rbm.weight = Matrix(data.cols(), hidden_dim);
    std::normal_distribution<double> init(0.0, 0.01);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (double& w : rbm.weight.values()) w = init(rng);
    rbm.visible_bias.assign(data.cols(), 0.0);
    rbm.hidden_bias.assign(hidden_dim, 0.0);

    std::vector<std::size_t> order(data.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double err = 0.0;
        for (std::size_t start = 0; start < order.size(); start += config.batch) {
            const std::size_t end = std::min(order.size(), start + config.batch);
            const std::span<const std::size_t> idx(order.data() + start, end - start);
            const Matrix v0 = gather_rows(data, idx);
            const Matrix h0 = rbm.hidden_probabilities(v0, config.threads);
            // Binary hidden states drive the reconstruction; statistics use probabilities.
            Matrix h0_states(h0.rows(), h0.cols());
            {
                auto src = h0.values();
                auto dst = h0_states.values();
                for (std::size_t i = 0; i < src.size(); ++i) dst[i] = unit(rng) < src[i] ? 1.0 : 0.0;
            }
            const Matrix v1 = rbm.visible_probabilities(h0_states, config.threads);
            const Matrix h1 = rbm.hidden_probabilities(v1, config.threads);
            if (config.observer) config.observer({epoch, &v0, &v0});

            const Matrix pos = matmul_tn(v0, h0, config.threads);
            const Matrix neg = matmul_tn(v1, h1, config.threads);
            const double step = config.lr / static_cast<double>(idx.size());
            auto w = rbm.weight.values();
            auto p = pos.values();
            auto q = neg.values();
            for (std::size_t i = 0; i < w.size(); ++i) w[i] += step * (p[i] - q[i]);
            for (std::size_t r = 0; r < idx.size(); ++r) {
                auto a = v0.row(r);
                auto b = v1.row(r);
                for (std::size_t j = 0; j < a.size(); ++j) rbm.visible_bias[j] += step * (a[j] - b[j]);
                auto c = h0.row(r);
                auto d = h1.row(r);
                for (std::size_t j = 0; j < c.size(); ++j) rbm.hidden_bias[j] += step * (c[j] - d[j]);
            }
            err += frobenius_sq(subtract(v0, v1));
        }
        rbm.epoch_errors.push_back(err / static_cast<double>(data.size()));
    }
    return rbm;
}

ModelParams pretrain_stack(const AttributedNetwork& net, const LayerSpec& spec, const RbmConfig& config) {
    const std::size_t n = net.node_count();
    const std::size_t m = net.attribute_count();
    ModelParams params = zero_params(spec, n, m);

    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const Matrix s = net.structure_rows(all);
    const Matrix a = net.attribute_rows(all);

    std::uint64_t layer = 0;
    auto layer_config = [&] {
        RbmConfig c = config;
        c.seed = layer_seed(config.seed, layer++);
        return c;
    };

    Matrix features;
    if (spec.preprocess) {
        const RbmLayer rs = train_rbm(s, spec.pre_struct_dim, layer_config());
        const RbmLayer ra = train_rbm(a, spec.pre_attr_dim, layer_config());
        copy_encoder(rs, params.struct_in, params.struct_out);
        copy_encoder(ra, params.attr_in, params.attr_out);
        features = hconcat(rs.hidden_probabilities(s, config.threads), ra.hidden_probabilities(a, config.threads));
    } else {
        features = hconcat(s, a);
    }
    const std::size_t depth = params.encoder.size();
    for (std::size_t k = 0; k < depth; ++k) {
        const RbmLayer rbm = train_rbm(features, spec.hidden_dims[k], layer_config());
        copy_encoder(rbm, params.encoder[k], params.decoder[depth - 1 - k]);
        if (k + 1 < depth) features = rbm.hidden_probabilities(features, config.threads);
    }
    return params;
}

}  // namespace mdne
