// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The sasvkit Authors

#include "sasv/cm_encoder.hpp"

#include "sasv/errors.hpp"
#include "sasv/metrics.hpp"
#include "sasv/wav.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <sstream>

namespace sasv::cm {

std::string CmConfig::arch_string() const {
  std::ostringstream os;
  os << "sinc=" << sinc_filters << "x" << sinc_kernel << "s" << sinc_stride
     << ";pool=" << pool_width << ";conv=" << conv1_channels << ","
     << conv2_channels << ";se=" << se_reduction << ";asp=" << asp_hidden
     << ";emb=" << embedding_dim << ";in=" << input_samples;
  return os.str();
}

CmEncoder::CmEncoder(const CmConfig &cfg) : cfg_(cfg) {
  sinc_ = nn::SincConv("cm.sinc", cfg.sinc_filters, cfg.sinc_kernel,
                       cfg.sinc_stride);
  pool_ = nn::MaxPool1d(cfg.pool_width);
  conv1_ = nn::Conv1d("cm.conv1", cfg.sinc_filters, cfg.conv1_channels, 3, 2, 1);
  conv2_ =
      nn::Conv1d("cm.conv2", cfg.conv1_channels, cfg.conv2_channels, 3, 2, 1);
  act1_ = nn::LeakyRelu(0.0f);
  act2_ = nn::LeakyRelu(0.0f);
  se1_ = nn::SEBlock("cm.se1", cfg.conv1_channels, cfg.se_reduction);
  se2_ = nn::SEBlock("cm.se2", cfg.conv2_channels, cfg.se_reduction);
  asp_ = nn::AttentiveStatsPool("cm.asp", cfg.conv2_channels, cfg.asp_hidden);
  proj_ = nn::Linear("cm.proj", 2 * cfg.conv2_channels, cfg.embedding_dim);
  output = nn::Linear("cm.output", cfg.embedding_dim, 2);
}

void CmEncoder::init(Rng &rng) {
  Rng r = rng.sub("cm_init");
  sinc_.init_mel();
  conv1_.init(r);
  conv2_.init(r);
  se1_.init(r);
  se2_.init(r);
  asp_.init(r);
  proj_.init(r);
  output.init(r);
}

CmOutput CmEncoder::forward(const audio::Waveform &w) {
  auto x = audio::pad_or_crop(w, static_cast<size_t>(cfg_.input_samples));
  nn::Mat h = sinc_.forward(x.samples);
  h = abs_.forward(h);
  h = pool_.forward(h);
  h = conv1_.forward(h);
  h = act1_.forward(h);
  h = se1_.forward(h);
  h = conv2_.forward(h);
  h = act2_.forward(h);
  h = se2_.forward(h);
  auto pooled = asp_.forward(h);
  CmOutput out;
  out.embedding = proj_.forward(pooled);
  emb_cache_ = out.embedding;
  out.logits = output.forward(out.embedding);
  return out;
}

void CmEncoder::backward(const std::vector<float> &g_logits,
                         const std::vector<float> &g_embedding) {
  std::vector<float> g_emb(cfg_.embedding_dim, 0.0f);
  if (!g_logits.empty())
    g_emb = output.backward(g_logits);
  if (!g_embedding.empty())
    for (int i = 0; i < cfg_.embedding_dim; ++i)
      g_emb[i] += g_embedding[i];
  auto g = proj_.backward(g_emb);
  nn::Mat gm = asp_.backward(g);
  gm = se2_.backward(gm);
  gm = act2_.backward(gm);
  gm = conv2_.backward(gm);
  gm = se1_.backward(gm);
  gm = act1_.backward(gm);
  gm = conv1_.backward(gm);
  gm = pool_.backward(gm);
  gm = abs_.backward(gm);
  sinc_.backward(gm);
}

CmOutput CmEncoder::embed(const audio::Waveform &w) const {
  auto x = audio::pad_or_crop(w, static_cast<size_t>(cfg_.input_samples));
  nn::Mat h = sinc_.apply(x.samples);
  h = abs_.apply(h);
  h = pool_.apply(h);
  h = conv1_.apply(h);
  h = act1_.apply(h);
  h = se1_.apply(h);
  h = conv2_.apply(h);
  h = act2_.apply(h);
  h = se2_.apply(h);
  CmOutput out;
  out.embedding = proj_.apply(asp_.apply(h));
  out.logits = output.apply(out.embedding);
  return out;
}

std::vector<nn::Param *> CmEncoder::params() {
  std::vector<nn::Param *> out;
  sinc_.collect(out);
  conv1_.collect(out);
  se1_.collect(out);
  conv2_.collect(out);
  se2_.collect(out);
  asp_.collect(out);
  proj_.collect(out);
  output.collect(out);
  return out;
}

double weighted_cross_entropy(std::span<const double> logits,
                              std::span<const int> labels,
                              std::span<const double, 2> class_weights,
                              std::vector<double> *d_logits) {
  if (labels.empty())
    throw DataError("weighted_cross_entropy: empty batch");
  if (logits.size() != labels.size() * 2)
    throw DataError("weighted_cross_entropy: logits buffer must be batch x 2");
  if (!(class_weights[0] > 0.0) || !(class_weights[1] > 0.0))
    throw DataError("weighted_cross_entropy: class weights must be positive");

  const size_t batch = labels.size();
  if (d_logits)
    d_logits->assign(logits.size(), 0.0);
  double loss = 0.0;
  for (size_t i = 0; i < batch; ++i) {
    const int y = labels[i];
    if (y != 0 && y != 1)
      throw DataError("weighted_cross_entropy: label must be 0 or 1");
    const double z0 = logits[2 * i], z1 = logits[2 * i + 1];
    const double mx = std::max(z0, z1);
    const double lse = mx + std::log(std::exp(z0 - mx) + std::exp(z1 - mx));
    const double w = class_weights[static_cast<size_t>(y)];
    loss += w * (lse - logits[2 * i + y]);
    if (d_logits) {
      for (int j = 0; j < 2; ++j) {
        const double p = std::exp(logits[2 * i + j] - lse);
        (*d_logits)[2 * i + j] =
            w * (p - (j == y ? 1.0 : 0.0)) / static_cast<double>(batch);
      }
    }
  }
  return loss / static_cast<double>(batch);
}

CmPretrainResult cm_pretrain(const proto::CorpusManifest &manifest,
                             const std::filesystem::path &corpus_root,
                             const CmPretrainConfig &cfg, Rng rng) {
  std::vector<const proto::ManifestEntry *> train, dev;
  bool train_has_bf = false, train_has_spoof = false;
  for (const auto &e : manifest.entries) {
    if (e.partition == proto::Partition::train) {
      train.push_back(&e);
      (e.is_bonafide ? train_has_bf : train_has_spoof) = true;
    } else if (e.partition == proto::Partition::dev) {
      dev.push_back(&e);
    }
  }
  if (!train_has_bf || !train_has_spoof)
    throw DataError("cm_pretrain: train partition needs both bona fide and "
                    "spoofed utterances");

  CmConfig arch;
  CmPretrainResult result;
  result.encoder = CmEncoder(arch);
  result.encoder.init(rng);
  CmEncoder &enc = result.encoder;

  nn::Adam opt(enc.params());
  const std::array<double, 2> weights = {cfg.weight_spoof, cfg.weight_bonafide};

  std::map<std::string, audio::Waveform> wav_cache;
  auto load = [&](const proto::ManifestEntry *e) -> const audio::Waveform & {
    auto it = wav_cache.find(e->utterance_id);
    if (it == wav_cache.end())
      it = wav_cache
               .emplace(e->utterance_id, audio::read_wav(corpus_root / e->path))
               .first;
    return it->second;
  };

  CmEncoder best = enc;
  result.best_dev_eer = 2.0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng erng = rng.sub("cm_epoch", static_cast<uint64_t>(epoch));
    auto order = train;
    erng.shuffle(order);

    double loss_sum = 0.0;
    int batches = 0;
    for (size_t pos = 0; pos < order.size(); pos += cfg.batch_size) {
      const size_t n =
          std::min<size_t>(cfg.batch_size, order.size() - pos);
      opt.zero_grad();
      double batch_loss = 0.0;
      for (size_t k = 0; k < n; ++k) {
        const auto *e = order[pos + k];
        auto out = enc.forward(load(e));
        const int label = e->is_bonafide ? kClassBonafide : kClassSpoof;
        const double z0 = out.logits[0], z1 = out.logits[1];
        const double mx = std::max(z0, z1);
        const double lse =
            mx + std::log(std::exp(z0 - mx) + std::exp(z1 - mx));
        const double w = weights[static_cast<size_t>(label)];
        batch_loss += w * (lse - out.logits[label]) / static_cast<double>(n);
        std::vector<float> dlogits(2);
        for (int j = 0; j < 2; ++j) {
          const double p = std::exp(out.logits[j] - lse);
          dlogits[j] = static_cast<float>(
              w * (p - (j == label ? 1.0 : 0.0)) / static_cast<double>(n));
        }
        enc.backward(dlogits, {});
      }
      if (!std::isfinite(batch_loss))
        throw DataError("cm_pretrain: non-finite loss at epoch " +
                        std::to_string(epoch));
      loss_sum += batch_loss;
      ++batches;
      opt.step(cfg.lr);
    }

    // Dev bona-fide-vs-spoof EER; score favours bona fide.
    double dev_eer = 0.5;
    if (!dev.empty()) {
      std::vector<double> pos_s, neg_s;
      for (const auto *e : dev) {
        auto out = enc.embed(load(e));
        const double score =
            static_cast<double>(out.logits[kClassBonafide]) -
            static_cast<double>(out.logits[kClassSpoof]);
        (e->is_bonafide ? pos_s : neg_s).push_back(score);
      }
      if (!pos_s.empty() && !neg_s.empty())
        dev_eer = metrics::compute_eer(pos_s, neg_s).eer;
    }

    result.log.push_back(
        {epoch, batches ? loss_sum / batches : 0.0, dev_eer});
    if (dev_eer < result.best_dev_eer) {
      result.best_dev_eer = dev_eer;
      result.selected_epoch = epoch;
      best = enc;
    }
  }

  result.encoder = best;
  return result;
}

} // namespace sasv::cm
