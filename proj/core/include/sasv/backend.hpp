// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The sasvkit Authors
//
// Stacked-embedding back-end classifier. The enrolment/test ASV embeddings
// and a linearly projected CM embedding are stacked into a [3,512] map,
// expanded by three 1-D convolutions to [256,512], aggregated by adaptive
// average pooling to [256,4], flattened and reduced by two linear layers to
// a 256-dimensional feature whose cosine against a learnable unit direction
// is the SASV score. Trained with a one-class softmax loss.

#ifndef SASV_BACKEND_HPP
#define SASV_BACKEND_HPP

#include "sasv/nn.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace sasv::backend {

inline constexpr int kAsvDim = 512;
inline constexpr int kCmDim = 160;
inline constexpr int kFeatureDim = 256;

/// The triple consumed by the back-end.
struct EmbeddingBundle {
  std::vector<float> asv_enr; // 512
  std::vector<float> asv_tst; // 512
  std::vector<float> cm_tst;  // 160
};

/// One-class softmax constants; the learnable direction itself lives in
/// Backend::oc_direction (renormalized at every use).
struct OcSoftmax {
  double alpha = 10.0;      // scale factor
  double margin_pos = 0.8;  // target bona fide margin
  double margin_neg = 0.2;  // spoofed target / nontarget bona fide margin
};

enum class BundleLabel { positive, negative };

struct BackendConfig {
  int asv_dim = kAsvDim;
  int cm_dim = kCmDim;
  std::array<int, 3> conv_channels = {64, 128, 256};
  int pool_bins = 4;
  int lin1_out = 512;
  int lin2_out = kFeatureDim;
  float leaky_slope = 0.3f;
  OcSoftmax oc;

  std::string arch_string() const;
};

/// Dimension trace of one forward pass, for instrumented shape checks.
struct ShapeTrace {
  std::vector<std::vector<int>> shapes;
};

class Backend {
public:
  Backend() = default;
  explicit Backend(const BackendConfig &cfg);
  void init(Rng &rng);

  /// Row 0 = asv_enr, row 1 = asv_tst, row 2 = linear projection of cm_tst.
  nn::Mat stack_embeddings(const EmbeddingBundle &bundle) const;

  /// Forward from a stacked [3,512] map to (score, 256-dim feature).
  /// The score is the cosine of the feature against the normalized
  /// learnable direction, hence always in [-1, 1].
  double forward_stacked(const nn::Mat &stacked, std::vector<float> *feature,
                         ShapeTrace *trace);

  /// Training forward: caches activations for backward().
  double forward(const EmbeddingBundle &bundle, ShapeTrace *trace = nullptr);

  struct BundleGrad {
    std::vector<float> asv_enr, asv_tst, cm_tst;
  };
  /// Backprop d(loss)/d(score) into parameter grads; returns embedding grads.
  BundleGrad backward(double g_score);

  /// Cache-free scoring.
  double score(const EmbeddingBundle &bundle, ShapeTrace *trace = nullptr) const;

  std::vector<nn::Param *> params();
  const BackendConfig &config() const { return cfg_; }
  size_t parameter_count() const;

  nn::Linear cm_projection; // 160 -> 512, affine
  nn::Param oc_direction;   // [256], normalized at each use

private:
  void check_bundle(const EmbeddingBundle &bundle) const;
  BackendConfig cfg_;
  nn::Conv1d conv1_, conv2_, conv3_;
  nn::LeakyRelu act1_, act2_, act3_, act4_;
  nn::Linear lin1_, lin2_;
  // caches for backward
  nn::Mat pooled_in_;
  std::vector<float> feature_;
  double feat_norm_ = 0.0, dir_norm_ = 0.0, score_ = 0.0;
};

/// sasv_score = stack + forward; read-only.
double sasv_score(const Backend &backend, const EmbeddingBundle &bundle);

/// One-class softmax loss over raw scores:
///   positive: softplus(alpha * (margin_pos - s))
///   negative: softplus(alpha * (s - margin_neg))
/// Returns the batch mean; optional gradient wrt scores.
double oc_softmax_loss(std::span<const double> scores,
                       std::span<const BundleLabel> labels, const OcSoftmax &p,
                       std::vector<double> *d_scores = nullptr);

/// Composite used by gradient checks and training: scores are cosines of
/// the rows of `features` [batch x dim] against w/|w|. Optional gradients
/// wrt features and w.
double oc_softmax_feature_loss(std::span<const double> features, int batch,
                               int dim, std::span<const BundleLabel> labels,
                               std::span<const double> w, const OcSoftmax &p,
                               std::vector<double> *d_features = nullptr,
                               std::vector<double> *d_w = nullptr);

} // namespace sasv::backend

#endif
