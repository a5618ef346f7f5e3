// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The sasvkit Authors
//
// Spoofing countermeasure encoder: a learnable band-pass filterbank applied
// to the raw waveform, a small conv stack with squeeze-and-excitation gates,
// attentive pooling, a 160-dimensional penultimate layer (the CM embedding)
// and a 2-class bona fide / spoof output layer. Trained with weighted
// cross-entropy.

#ifndef SASV_CM_ENCODER_HPP
#define SASV_CM_ENCODER_HPP

#include "sasv/audio.hpp"
#include "sasv/nn.hpp"
#include "sasv/protocol.hpp"

#include <filesystem>
#include <span>

namespace sasv::cm {

inline constexpr int kEmbeddingDim = 160;
inline constexpr int kInputSamples = 64600; // ~4 s at 16 kHz
inline constexpr int kClassSpoof = 0;
inline constexpr int kClassBonafide = 1;

struct CmConfig {
  int sinc_filters = 20;
  int sinc_kernel = 129;
  int sinc_stride = 16;
  int pool_width = 4;
  int conv1_channels = 32;
  int conv2_channels = 64;
  int se_reduction = 8;
  int asp_hidden = 32;
  int embedding_dim = kEmbeddingDim;
  int input_samples = kInputSamples;

  std::string arch_string() const;
};

struct CmOutput {
  std::vector<float> embedding; // penultimate layer, 160 dims
  std::vector<float> logits;    // [spoof, bonafide]
};

class CmEncoder {
public:
  CmEncoder() = default;
  explicit CmEncoder(const CmConfig &cfg);
  void init(Rng &rng);

  /// Training forward; input is normalized to input_samples internally.
  CmOutput forward(const audio::Waveform &w);
  /// Backprop from logit and/or embedding gradients.
  void backward(const std::vector<float> &g_logits,
                const std::vector<float> &g_embedding);
  /// Cache-free inference.
  CmOutput embed(const audio::Waveform &w) const;

  std::vector<nn::Param *> params();
  const CmConfig &config() const { return cfg_; }

  nn::Linear output; // embedding -> 2 logits; logits are affine in embedding

private:
  CmConfig cfg_;
  nn::SincConv sinc_;
  nn::AbsAct abs_;
  nn::MaxPool1d pool_;
  nn::Conv1d conv1_, conv2_;
  nn::LeakyRelu act1_, act2_;
  nn::SEBlock se1_, se2_;
  nn::AttentiveStatsPool asp_;
  nn::Linear proj_;
  std::vector<float> emb_cache_;
};

/// Weighted 2-class cross-entropy: mean over the batch of
/// w_label * (-log softmax(logits)[label]).
/// `class_weights` are positive per-class factors [spoof, bonafide].
double weighted_cross_entropy(std::span<const double> logits, // batch x 2 flat
                              std::span<const int> labels,
                              std::span<const double, 2> class_weights,
                              std::vector<double> *d_logits = nullptr);

struct CmPretrainConfig {
  int epochs = 5;
  double lr = 1e-3;
  int batch_size = 20;
  double weight_bonafide = 0.1;
  double weight_spoof = 0.9;
};

struct CmPretrainEpoch {
  int epoch = 0;
  double mean_loss = 0.0;
  double dev_eer = 0.0;
};

struct CmPretrainResult {
  CmEncoder encoder;
  std::vector<CmPretrainEpoch> log;
  int selected_epoch = 0;
  double best_dev_eer = 1.0;
};

/// Train on the manifest's train partition; per-epoch model selection by
/// bona-fide-vs-spoof EER on the dev partition.
CmPretrainResult cm_pretrain(const proto::CorpusManifest &manifest,
                             const std::filesystem::path &corpus_root,
                             const CmPretrainConfig &cfg, Rng rng);

} // namespace sasv::cm

#endif
