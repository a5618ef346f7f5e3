// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The sasvkit Authors
//
// Speaker embedding encoder: conv trunk with squeeze-and-excitation gates
// over log Mel features, attentive statistics pooling, and a projection to
// a 512-dimensional embedding. Trained with softmax speaker classification
// combined with an angular prototypical loss.

#ifndef SASV_ASV_ENCODER_HPP
#define SASV_ASV_ENCODER_HPP

#include "sasv/audio.hpp"
#include "sasv/nn.hpp"
#include "sasv/protocol.hpp"

#include <array>
#include <filesystem>
#include <optional>

namespace sasv::asv {

inline constexpr int kEmbeddingDim = 512;

struct AsvConfig {
  int mel_bands = audio::kNumMelBands;
  std::array<int, 4> widths = {16, 32, 64, 128};
  int se_reduction = 8;
  int asp_hidden = 64;
  int embedding_dim = kEmbeddingDim;
  int n_classes = 0; // softmax head width; speakers in the train partition

  std::string arch_string() const;
};

class AsvEncoder {
public:
  AsvEncoder() = default;
  explicit AsvEncoder(const AsvConfig &cfg);
  void init(Rng &rng);

  /// Training forward over [mel_bands x T] features; caches activations.
  std::vector<float> forward(const nn::Mat &features);
  /// Backprop from an embedding gradient into parameter grads.
  void backward(const std::vector<float> &g_embedding);
  /// Cache-free forward for inference.
  std::vector<float> embed(const nn::Mat &features) const;

  std::vector<nn::Param *> params();
  const AsvConfig &config() const { return cfg_; }

  // Loss heads (serialized with the encoder).
  nn::Linear classifier;  // embedding -> n_classes
  nn::Param angproto_w;   // learnable similarity scale, kept positive
  nn::Param angproto_b;   // learnable similarity offset

private:
  AsvConfig cfg_;
  std::array<nn::Conv1d, 4> convs_;
  std::array<nn::LeakyRelu, 4> acts_;
  std::array<nn::SEBlock, 4> ses_;
  nn::AttentiveStatsPool asp_;
  nn::Linear proj_;
};

/// [frames x bands] feature map to a [bands x frames] channel-major matrix.
nn::Mat features_to_mat(const audio::FeatureMap &f);

/// Pre-emphasis + log Mel + encoder; errors for sub-frame inputs.
std::vector<float> asv_embed(const AsvEncoder &enc, const audio::Waveform &w);

/// Angular prototypical loss over [N speakers x M utterances x dim]
/// embeddings (flattened row-major). Utterance 0 of each speaker is the
/// query; the prototype is the mean of utterances 1..M-1. Similarities are
/// scaled cosines  S(i,j) = w * cos(q_i, p_j) + b  and each row is scored
/// with cross-entropy against its own speaker.
struct AngProtoGrad {
  std::vector<double> d_embeddings; // same layout as the input
  double d_w = 0.0;
  double d_b = 0.0;
};
double angular_prototypical_loss(std::span<const double> embeddings, int n_speakers,
                                 int m_utterances, int dim, double w, double b,
                                 AngProtoGrad *grad = nullptr);

struct AsvPretrainConfig {
  int epochs = 5;
  double lr = 1e-3;
  int speakers_per_batch = 10;
  double crop_seconds = 2.0;
  int validation_trials_per_speaker = 9;
};

struct PretrainEpoch {
  int epoch = 0;
  double mean_loss = 0.0;
  double dev_eer = 0.0;
};

struct AsvPretrainResult {
  AsvEncoder encoder;
  std::vector<PretrainEpoch> log;
  int selected_epoch = 0;
  double best_dev_eer = 1.0;
};

/// Train the reference encoder on the manifest's train partition with
/// 2-second random crops; per-epoch model selection by SV-EER over a
/// held-out bona fide trial list built from the dev partition.
AsvPretrainResult asv_pretrain(const proto::CorpusManifest &manifest,
                               const std::filesystem::path &corpus_root,
                               const AsvPretrainConfig &cfg, Rng rng);

} // namespace sasv::asv

#endif
