// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The sasvkit Authors

#include "sasv/asv_encoder.hpp"

#include "sasv/errors.hpp"
#include "sasv/metrics.hpp"
#include "sasv/wav.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace sasv::asv {

std::string AsvConfig::arch_string() const {
  std::ostringstream os;
  os << "mel=" << mel_bands << ";widths=" << widths[0] << "," << widths[1]
     << "," << widths[2] << "," << widths[3] << ";se=" << se_reduction
     << ";asp=" << asp_hidden << ";emb=" << embedding_dim
     << ";classes=" << n_classes;
  return os.str();
}

AsvEncoder::AsvEncoder(const AsvConfig &cfg) : cfg_(cfg) {
  int in_ch = cfg.mel_bands;
  for (int s = 0; s < 4; ++s) {
    convs_[s] = nn::Conv1d("asv.conv" + std::to_string(s + 1), in_ch,
                           cfg.widths[s], 3, 2, 1);
    acts_[s] = nn::LeakyRelu(0.0f); // plain ReLU in the trunk
    ses_[s] = nn::SEBlock("asv.se" + std::to_string(s + 1), cfg.widths[s],
                          cfg.se_reduction);
    in_ch = cfg.widths[s];
  }
  asp_ = nn::AttentiveStatsPool("asv.asp", cfg.widths[3], cfg.asp_hidden);
  proj_ = nn::Linear("asv.proj", 2 * cfg.widths[3], cfg.embedding_dim);
  if (cfg.n_classes > 0)
    classifier = nn::Linear("asv.softmax", cfg.embedding_dim, cfg.n_classes);
  angproto_w.resize("asv.angproto_w", {1});
  angproto_b.resize("asv.angproto_b", {1});
  angproto_w.value[0] = 10.0f;
  angproto_b.value[0] = -5.0f;
}

void AsvEncoder::init(Rng &rng) {
  Rng r = rng.sub("asv_init");
  for (auto &c : convs_)
    c.init(r);
  for (auto &s : ses_)
    s.init(r);
  asp_.init(r);
  proj_.init(r);
  if (cfg_.n_classes > 0)
    classifier.init(r);
}

std::vector<float> AsvEncoder::forward(const nn::Mat &features) {
  nn::Mat h = features;
  for (int s = 0; s < 4; ++s) {
    h = convs_[s].forward(h);
    h = acts_[s].forward(h);
    h = ses_[s].forward(h);
  }
  auto pooled = asp_.forward(h);
  return proj_.forward(pooled);
}

void AsvEncoder::backward(const std::vector<float> &g_embedding) {
  auto g = proj_.backward(g_embedding);
  nn::Mat gm = asp_.backward(g);
  for (int s = 3; s >= 0; --s) {
    gm = ses_[s].backward(gm);
    gm = acts_[s].backward(gm);
    gm = convs_[s].backward(gm);
  }
}

std::vector<float> AsvEncoder::embed(const nn::Mat &features) const {
  nn::Mat h = features;
  for (int s = 0; s < 4; ++s) {
    h = convs_[s].apply(h);
    h = acts_[s].apply(h);
    h = ses_[s].apply(h);
  }
  return proj_.apply(asp_.apply(h));
}

std::vector<nn::Param *> AsvEncoder::params() {
  std::vector<nn::Param *> out;
  for (int s = 0; s < 4; ++s) {
    convs_[s].collect(out);
    ses_[s].collect(out);
  }
  asp_.collect(out);
  proj_.collect(out);
  if (cfg_.n_classes > 0)
    classifier.collect(out);
  out.push_back(&angproto_w);
  out.push_back(&angproto_b);
  return out;
}

nn::Mat features_to_mat(const audio::FeatureMap &f) {
  nn::Mat m(f.bands, f.frames);
  for (int t = 0; t < f.frames; ++t)
    for (int b = 0; b < f.bands; ++b)
      m.at(b, t) = f.at(t, b);
  return m;
}

std::vector<float> asv_embed(const AsvEncoder &enc, const audio::Waveform &w) {
  auto pre = audio::preemphasis(w);
  auto feats = audio::log_mel_features(pre);
  return enc.embed(features_to_mat(feats));
}

double angular_prototypical_loss(std::span<const double> embeddings,
                                 int n_speakers, int m_utterances, int dim,
                                 double w, double b, AngProtoGrad *grad) {
  if (n_speakers < 2 || m_utterances < 2)
    throw DataError("angular prototypical loss needs N >= 2 speakers and "
                    "M >= 2 utterances");
  if (embeddings.size() !=
      static_cast<size_t>(n_speakers) * m_utterances * dim)
    throw DataError("angular prototypical loss: embedding buffer size "
                    "mismatch");
  const double w_eff = std::max(w, 1e-6); // scale kept positive by clamping
  auto emb = [&](int i, int m) {
    return embeddings.data() + (static_cast<size_t>(i) * m_utterances + m) * dim;
  };

  // queries and prototypes
  std::vector<double> protos(static_cast<size_t>(n_speakers) * dim, 0.0);
  for (int i = 0; i < n_speakers; ++i) {
    double *p = protos.data() + static_cast<size_t>(i) * dim;
    for (int m = 1; m < m_utterances; ++m) {
      const double *e = emb(i, m);
      for (int d = 0; d < dim; ++d)
        p[d] += e[d];
    }
    for (int d = 0; d < dim; ++d)
      p[d] /= (m_utterances - 1);
  }

  auto vnorm = [dim](const double *v) {
    double s = 0.0;
    for (int d = 0; d < dim; ++d)
      s += v[d] * v[d];
    return std::sqrt(s);
  };

  std::vector<double> qn(n_speakers), pn(n_speakers);
  for (int i = 0; i < n_speakers; ++i) {
    qn[i] = vnorm(emb(i, 0));
    pn[i] = vnorm(protos.data() + static_cast<size_t>(i) * dim);
    if (qn[i] == 0.0 || pn[i] == 0.0)
      throw DataError("angular prototypical loss: zero-norm embedding, "
                      "cosine undefined");
  }

  std::vector<double> cosv(static_cast<size_t>(n_speakers) * n_speakers);
  for (int i = 0; i < n_speakers; ++i) {
    const double *q = emb(i, 0);
    for (int j = 0; j < n_speakers; ++j) {
      const double *p = protos.data() + static_cast<size_t>(j) * dim;
      double d = 0.0;
      for (int k = 0; k < dim; ++k)
        d += q[k] * p[k];
      cosv[static_cast<size_t>(i) * n_speakers + j] = d / (qn[i] * pn[j]);
    }
  }

  // row-wise softmax cross-entropy on S = w*cos + b
  double loss = 0.0;
  std::vector<double> dS(static_cast<size_t>(n_speakers) * n_speakers, 0.0);
  for (int i = 0; i < n_speakers; ++i) {
    const double *crow = cosv.data() + static_cast<size_t>(i) * n_speakers;
    double mx = -1e300;
    for (int j = 0; j < n_speakers; ++j)
      mx = std::max(mx, w_eff * crow[j] + b);
    double z = 0.0;
    for (int j = 0; j < n_speakers; ++j)
      z += std::exp(w_eff * crow[j] + b - mx);
    const double s_ii = w_eff * crow[i] + b;
    loss += (std::log(z) + mx - s_ii) / n_speakers;
    if (grad) {
      double *drow = dS.data() + static_cast<size_t>(i) * n_speakers;
      for (int j = 0; j < n_speakers; ++j) {
        const double p = std::exp(w_eff * crow[j] + b - mx) / z;
        drow[j] = (p - (i == j ? 1.0 : 0.0)) / n_speakers;
      }
    }
  }

  if (grad) {
    grad->d_embeddings.assign(embeddings.size(), 0.0);
    grad->d_w = 0.0;
    grad->d_b = 0.0;
    std::vector<double> dprotos(static_cast<size_t>(n_speakers) * dim, 0.0);
    for (int i = 0; i < n_speakers; ++i) {
      const double *q = emb(i, 0);
      double *dq =
          grad->d_embeddings.data() +
          (static_cast<size_t>(i) * m_utterances + 0) * dim;
      for (int j = 0; j < n_speakers; ++j) {
        const double ds = dS[static_cast<size_t>(i) * n_speakers + j];
        const double c = cosv[static_cast<size_t>(i) * n_speakers + j];
        grad->d_w += ds * c;
        grad->d_b += ds;
        const double dc = ds * w_eff;
        const double *p = protos.data() + static_cast<size_t>(j) * dim;
        double *dp = dprotos.data() + static_cast<size_t>(j) * dim;
        // d cos(q,p)/dq = (p/|p| - cos * q/|q|) / |q|
        for (int k = 0; k < dim; ++k) {
          dq[k] += dc * (p[k] / (qn[i] * pn[j]) - c * q[k] / (qn[i] * qn[i]));
          dp[k] += dc * (q[k] / (qn[i] * pn[j]) - c * p[k] / (pn[j] * pn[j]));
        }
      }
    }
    // distribute prototype grads over utterances 1..M-1
    for (int i = 0; i < n_speakers; ++i) {
      const double *dp = dprotos.data() + static_cast<size_t>(i) * dim;
      for (int m = 1; m < m_utterances; ++m) {
        double *de = grad->d_embeddings.data() +
                     (static_cast<size_t>(i) * m_utterances + m) * dim;
        for (int k = 0; k < dim; ++k)
          de[k] += dp[k] / (m_utterances - 1);
      }
    }
    if (w <= 1e-6)
      grad->d_w = 0.0; // clamped region
  }
  return loss;
}

// ---------------------------------------------------------------- pretrain --

namespace {

struct SpeakerUtts {
  std::string speaker;
  std::vector<const proto::ManifestEntry *> utts; // bona fide only
};

std::vector<SpeakerUtts> bonafide_by_speaker(const proto::CorpusManifest &m,
                                             proto::Partition part) {
  std::map<std::string, std::vector<const proto::ManifestEntry *>> by;
  for (const auto &e : m.entries)
    if (e.partition == part && e.is_bonafide)
      by[e.speaker_id].push_back(&e);
  std::vector<SpeakerUtts> out;
  for (auto &[spk, utts] : by)
    out.push_back({spk, std::move(utts)});
  return out;
}

double softmax_ce_backward(const std::vector<float> &logits, int label,
                           std::vector<float> &dlogits) {
  double mx = logits[0];
  for (float v : logits)
    mx = std::max(mx, static_cast<double>(v));
  double z = 0.0;
  for (float v : logits)
    z += std::exp(static_cast<double>(v) - mx);
  dlogits.resize(logits.size());
  for (size_t j = 0; j < logits.size(); ++j)
    dlogits[j] = static_cast<float>(std::exp(logits[j] - mx) / z -
                                    (static_cast<int>(j) == label ? 1.0 : 0.0));
  return std::log(z) + mx - logits[label];
}

} // namespace

AsvPretrainResult asv_pretrain(const proto::CorpusManifest &manifest,
                               const std::filesystem::path &corpus_root,
                               const AsvPretrainConfig &cfg, Rng rng) {
  auto speakers = bonafide_by_speaker(manifest, proto::Partition::train);
  if (speakers.size() < 2)
    throw DataError("asv_pretrain: need >= 2 train speakers, got " +
                    std::to_string(speakers.size()));
  size_t min_utts = SIZE_MAX;
  for (const auto &s : speakers)
    min_utts = std::min(min_utts, s.utts.size());
  if (min_utts < 2)
    throw DataError("asv_pretrain: every train speaker needs >= 2 bona fide "
                    "utterances");

  AsvConfig arch;
  arch.n_classes = static_cast<int>(speakers.size());
  AsvPretrainResult result;
  result.encoder = AsvEncoder(arch);
  result.encoder.init(rng);
  AsvEncoder &enc = result.encoder;

  nn::Adam opt(enc.params());
  const size_t crop = static_cast<size_t>(cfg.crop_seconds * audio::kSampleRate);
  const int rounds = static_cast<int>(min_utts / 2);

  // Dev validation trials: per dev speaker, utterance 0 enrols; the rest are
  // targets and an equal number of other-speaker utterances are nontargets.
  auto dev = bonafide_by_speaker(manifest, proto::Partition::dev);
  struct DevTrial {
    size_t enrol_spk;
    const proto::ManifestEntry *test;
    bool target;
  };
  std::vector<DevTrial> dev_trials;
  for (size_t i = 0; i < dev.size(); ++i) {
    const int n =
        std::min<int>(cfg.validation_trials_per_speaker,
                      static_cast<int>(dev[i].utts.size()) - 1);
    for (int k = 1; k <= n; ++k)
      dev_trials.push_back({i, dev[i].utts[k], true});
    if (dev.size() > 1) {
      for (int k = 0; k < n; ++k) {
        const auto &other = dev[(i + 1 + k % (dev.size() - 1)) % dev.size()];
        dev_trials.push_back(
            {i, other.utts[k % other.utts.size()], false});
      }
    }
  }

  std::map<std::string, audio::Waveform> wav_cache;
  auto load = [&](const proto::ManifestEntry *e) -> const audio::Waveform & {
    auto it = wav_cache.find(e->utterance_id);
    if (it == wav_cache.end())
      it = wav_cache
               .emplace(e->utterance_id,
                        audio::read_wav(corpus_root / e->path))
               .first;
    return it->second;
  };

  AsvEncoder best = enc;
  result.best_dev_eer = 2.0;
  result.selected_epoch = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng erng = rng.sub("asv_epoch", static_cast<uint64_t>(epoch));
    double loss_sum = 0.0;
    int loss_count = 0;

    // Per speaker: shuffle utterances, pair them up round by round.
    std::vector<std::vector<const proto::ManifestEntry *>> shuffled(
        speakers.size());
    for (size_t s = 0; s < speakers.size(); ++s) {
      shuffled[s] = speakers[s].utts;
      Rng srng = erng.sub("pairing", s);
      srng.shuffle(shuffled[s]);
    }

    for (int round = 0; round < rounds; ++round) {
      std::vector<size_t> order(speakers.size());
      for (size_t i = 0; i < order.size(); ++i)
        order[i] = i;
      Rng orng = erng.sub("order", static_cast<uint64_t>(round));
      orng.shuffle(order);

      const size_t group = std::min<size_t>(
          std::max(cfg.speakers_per_batch, 2), order.size());
      for (size_t pos = 0; pos < order.size(); pos += group) {
        const size_t n = std::min<size_t>(group, order.size() - pos);
        if (n < 2)
          break; // a trailing single speaker cannot form a prototype batch
        // Assemble crops: 2 per speaker (query, prototype).
        std::vector<nn::Mat> feats;
        std::vector<int> labels;
        feats.reserve(2 * n);
        for (size_t k = 0; k < n; ++k) {
          const size_t s = order[pos + k];
          for (int m = 0; m < 2; ++m) {
            const auto *e = shuffled[s][2 * round + m];
            Rng crng = erng.sub("crop:" + e->utterance_id,
                                static_cast<uint64_t>(round));
            auto wav = audio::random_crop(load(e), crop, crng);
            feats.push_back(features_to_mat(
                audio::log_mel_features(audio::preemphasis(wav))));
            labels.push_back(static_cast<int>(s));
          }
        }

        // Pass 1: embeddings for the whole group.
        const int dim = arch.embedding_dim;
        std::vector<std::vector<float>> embs(feats.size());
        for (size_t i = 0; i < feats.size(); ++i)
          embs[i] = enc.embed(feats[i]);

        // Angular prototypical term over the group.
        std::vector<double> flat(feats.size() * dim);
        for (size_t k = 0; k < n; ++k)
          for (int m = 0; m < 2; ++m)
            for (int d = 0; d < dim; ++d)
              flat[(k * 2 + m) * dim + d] = embs[2 * k + m][d];
        AngProtoGrad ap_grad;
        const double w = enc.angproto_w.value[0];
        const double b = enc.angproto_b.value[0];
        const double ap_loss = angular_prototypical_loss(
            flat, static_cast<int>(n), 2, dim, w, b, &ap_grad);

        // Softmax term per crop plus combined embedding grads.
        opt.zero_grad();
        double ce_loss = 0.0;
        for (size_t i = 0; i < feats.size(); ++i) {
          auto logits = enc.classifier.forward(embs[i]);
          std::vector<float> dlogits;
          ce_loss += softmax_ce_backward(logits, labels[i], dlogits) /
                     static_cast<double>(feats.size());
          for (auto &v : dlogits)
            v /= static_cast<float>(feats.size());
          auto g_emb = enc.classifier.backward(dlogits);
          for (int d = 0; d < dim; ++d)
            g_emb[d] += static_cast<float>(ap_grad.d_embeddings[i * dim + d]);
          // Pass 2: re-run the forward to restore this crop's caches.
          enc.forward(feats[i]);
          enc.backward(g_emb);
        }
        enc.angproto_w.grad[0] += static_cast<float>(ap_grad.d_w);
        enc.angproto_b.grad[0] += static_cast<float>(ap_grad.d_b);

        const double total = ce_loss + ap_loss;
        if (!std::isfinite(total))
          throw DataError("asv_pretrain: non-finite loss at epoch " +
                          std::to_string(epoch));
        loss_sum += total;
        ++loss_count;
        opt.step(cfg.lr);
        enc.angproto_w.value[0] = std::max(enc.angproto_w.value[0], 1e-6f);
      }
    }

    // Validation: SV-EER over the dev trial list.
    double dev_eer = 0.5;
    if (!dev_trials.empty()) {
      std::map<std::string, std::vector<float>> emb_cache;
      auto emb_of = [&](const proto::ManifestEntry *e) {
        auto it = emb_cache.find(e->utterance_id);
        if (it == emb_cache.end())
          it = emb_cache.emplace(e->utterance_id, asv_embed(enc, load(e)))
                   .first;
        return it->second;
      };
      std::vector<double> pos, neg;
      for (const auto &t : dev_trials) {
        const auto &enr = emb_of(dev[t.enrol_spk].utts[0]);
        const auto &tst = emb_of(t.test);
        const double na = nn::norm(enr), nb = nn::norm(tst);
        const double score =
            (na > 0 && nb > 0) ? nn::dot(enr, tst) / (na * nb) : 0.0;
        (t.target ? pos : neg).push_back(score);
      }
      dev_eer = metrics::compute_eer(pos, neg).eer;
    }

    result.log.push_back(
        {epoch, loss_count ? loss_sum / loss_count : 0.0, dev_eer});
    if (dev_eer < result.best_dev_eer) {
      result.best_dev_eer = dev_eer;
      result.selected_epoch = epoch;
      best = enc;
    }
  }

  result.encoder = best;
  return result;
}

} // namespace sasv::asv
