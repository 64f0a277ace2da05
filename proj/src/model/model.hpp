#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "core/tensor.hpp"

namespace mdne {

/// Layer widths of the autoencoder.
///
/// With `preprocess` on, structure rows (n wide) and attribute rows (m wide)
/// each pass through their own sigmoid layer (pre_struct_dim, pre_attr_dim
/// outputs); the two results are concatenated and fed to the shared encoder
/// whose widths are `hidden_dims`. With `preprocess` off the raw [s | a] rows
/// feed the encoder directly. `hidden_dims.back()` is the embedding width d.
struct LayerSpec {
    bool preprocess = true;
    std::size_t pre_struct_dim = 0;
    std::size_t pre_attr_dim = 0;
    std::vector<std::size_t> hidden_dims;

    std::size_t embedding_dim() const { return hidden_dims.empty() ? 0 : hidden_dims.back(); }
    /// Width entering the shared encoder stack.
    std::size_t joint_input_dim(std::size_t n, std::size_t m) const {
        return preprocess ? pre_struct_dim + pre_attr_dim : n + m;
    }
    /// Throws ValidationError unless every layer is strictly narrower than the
    /// one below it and 1 <= d < min(n, m).
    void validate(std::size_t n, std::size_t m) const;

    bool operator==(const LayerSpec&) const = default;
};

/// Sigmoid layer y = σ(x·W + b); W is fan_in × fan_out.
struct DenseLayer {
    Matrix weight;
    std::vector<double> bias;

    std::size_t fan_in() const { return weight.rows(); }
    std::size_t fan_out() const { return weight.cols(); }
    bool operator==(const DenseLayer&) const = default;
};

/// Every trainable parameter. The decoder mirrors the encoder; in preprocess
/// mode it ends in two heads that turn the split joint reconstruction back into
/// structure (n) and attribute (m) rows.
struct ModelParams {
    LayerSpec spec;
    std::size_t n = 0;
    std::size_t m = 0;
    DenseLayer struct_in;   // preprocess only: n -> pre_struct_dim
    DenseLayer attr_in;     // preprocess only: m -> pre_attr_dim
    std::vector<DenseLayer> encoder;
    std::vector<DenseLayer> decoder;
    DenseLayer struct_out;  // preprocess only: pre_struct_dim -> n
    DenseLayer attr_out;    // preprocess only: pre_attr_dim -> m
    /// Bumped by every in-place update; forward caches remember it.
    std::uint64_t revision = 0;

    bool same_values(const ModelParams& other) const;
};

/// Gradients share the parameter layout.
using Gradients = ModelParams;

/// One parameter tensor as seen by generic visitors.
struct TensorRef {
    std::span<double> values;
    bool is_weight;  // false for biases
};
struct ConstTensorRef {
    std::span<const double> values;
    bool is_weight;
};

/// Visits every tensor in a fixed canonical order (the checkpoint order):
/// struct_in, attr_in, encoder..., decoder..., struct_out, attr_out; within a
/// layer weight before bias. Layers absent in the current mode are skipped.
void for_each_tensor(ModelParams& params, const std::function<void(TensorRef)>& fn);
void for_each_tensor(const ModelParams& params, const std::function<void(ConstTensorRef)>& fn);

/// Zero-filled parameters with all shapes derived from spec, n and m.
ModelParams zero_params(const LayerSpec& spec, std::size_t n, std::size_t m);
/// Weights uniform in ±sqrt(6 / (fan_in + fan_out)), biases zero.
ModelParams random_params(const LayerSpec& spec, std::size_t n, std::size_t m, std::mt19937_64& rng);

/// Penalty multipliers for nonzero targets in the reconstruction terms.
struct PenaltyConfig {
    double gamma1 = 10.0;  // structure
    double gamma2 = 10.0;  // attributes
    void validate() const;
};

/// Weights of the attribute, second-order and regularization terms; the
/// first-order term always has weight 1.
struct LossWeights {
    double lambda = 0.03;
    double alpha = 0.5;
    double upsilon = 1e-4;
    void validate() const;
};

/// Edge between two rows of the current batch.
struct BatchEdge {
    std::size_t i = 0;
    std::size_t j = 0;
    double weight = 1.0;
};

/// A mini-batch: input/target rows plus the edges fully inside it.
struct Batch {
    Matrix s_rows;  // batch × n, entries in [0, 1]
    Matrix a_rows;  // batch × m
    std::vector<BatchEdge> edges;
    /// Multiplier on the first-order term (total edges / edges in batch).
    double first_order_scale = 1.0;
};

/// Post-activation outputs of every layer for one forward pass.
struct ForwardCache {
    Matrix struct_hidden;               // preprocess only
    Matrix attr_hidden;                 // preprocess only
    Matrix joint_input;                 // input to encoder[0]
    std::vector<Matrix> encoder_out;    // back() is Y
    std::vector<Matrix> decoder_out;    // back() is the joint reconstruction
    Matrix s_hat;
    Matrix a_hat;
    const ModelParams* params = nullptr;
    std::uint64_t revision = 0;

    const Matrix& embedding() const { return encoder_out.back(); }
};

ForwardCache forward(const ModelParams& params, const Matrix& s_rows, const Matrix& a_rows,
                     int threads = 1);

/// Σ over batch edges of s_ij ‖y_i − y_j‖² (each unordered pair once, unscaled).
double loss_first_order(const Matrix& y, std::span<const BatchEdge> edges);
/// ‖(Ŝ − S) ⊙ R‖²_F with R = gamma where S ≠ 0, else 1.
double loss_second_order(const Matrix& s_hat, const Matrix& s, double gamma1);
double loss_attribute(const Matrix& a_hat, const Matrix& a, double gamma2);
/// ½ Σ ‖W‖²_F over all weight matrices; biases excluded.
double loss_reg(const ModelParams& params);

struct LossComponents {
    double first = 0.0;   // already multiplied by the batch first-order scale
    double second = 0.0;
    double attribute = 0.0;
    double reg = 0.0;
};

/// λ·L_att + α·L_2nd + L_1st + υ·L_reg
double loss_total(const LossComponents& c, const LossWeights& w);

LossComponents evaluate_loss(const ModelParams& params, const ForwardCache& cache,
                             const Batch& batch, const PenaltyConfig& penalties);

/// Gradient of loss_total for the batch. Throws ContractError if the cache
/// came from different parameters, a stale revision, or another batch shape.
Gradients backward(const ModelParams& params, const ForwardCache& cache, const Batch& batch,
                   const LossWeights& weights, const PenaltyConfig& penalties, int threads = 1);

/// params -= lr * grads; bumps the revision.
void apply_gradients(ModelParams& params, const Gradients& grads, double lr);

/// Representation of a node that may lack one modality; the missing vector is
/// replaced by zeros. Throws ValidationError when both are absent.
std::vector<double> embed_new_node(const ModelParams& params,
                                   std::optional<std::span<const double>> structure,
                                   std::optional<std::span<const double>> attributes);

}  // namespace mdne
