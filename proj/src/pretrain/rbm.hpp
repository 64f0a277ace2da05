#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "core/tensor.hpp"
#include "graph/network.hpp"
#include "model/model.hpp"

namespace mdne {

/// Bernoulli-Bernoulli RBM. `weight` is visible × hidden.
struct RbmLayer {
    Matrix weight;
    std::vector<double> visible_bias;
    std::vector<double> hidden_bias;
    /// Mean squared reconstruction error per visible unit, one entry per epoch.
    std::vector<double> epoch_errors;

    std::size_t visible_dim() const { return weight.rows(); }
    std::size_t hidden_dim() const { return weight.cols(); }

    Matrix hidden_probabilities(const Matrix& visible, int threads = 1) const;
    Matrix visible_probabilities(const Matrix& hidden, int threads = 1) const;
    /// Mean-field reconstruction error per unit for `data`.
    double reconstruction_error(const Matrix& data, int threads = 1) const;
};

/// What one CD-1 step saw; handed to RbmConfig::observer when set.
struct CdStepInfo {
    std::size_t epoch = 0;
    const Matrix* positive_visible = nullptr;  // batch driving the positive phase
    const Matrix* negative_source = nullptr;   // batch the reconstruction started from
};

struct RbmConfig {
    double lr = 0.5;
    std::size_t epochs = 30;
    std::size_t batch = 64;
    std::uint64_t seed = 1;
    int threads = 1;
    std::function<void(const CdStepInfo&)> observer;
};

/// Trains with CD-1. Binary hidden states sampled from p(h | v0) drive the
/// reconstruction; statistics use probabilities (mean field for the negative
/// phase). The seeded generator sets the initial weights (N(0, 0.01²)), the
/// per-epoch batch order and the samples. Data must lie in [0, 1].
RbmLayer train_rbm(const Matrix& data, std::size_t hidden_dim, const RbmConfig& config);

/// Initial parameters from greedy layer-wise pretraining. Structure and
/// attribute rows each train their own RBM (or one joint RBM without
/// preprocessing); concatenated hidden probabilities train the next RBM up
/// the tower. Encoder layers take W and the hidden bias; the mirrored decoder
/// layers take a copy of Wᵀ and the visible bias.
ModelParams pretrain_stack(const AttributedNetwork& net, const LayerSpec& spec, const RbmConfig& config);

}  // namespace mdne
