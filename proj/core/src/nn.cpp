// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The sasvkit Authors

#include "sasv/nn.hpp"

#include "sasv/errors.hpp"

#include <cassert>
#include <numbers>

namespace sasv::nn {

void Param::resize(std::string n, std::vector<int> s) {
  name = std::move(n);
  shape = std::move(s);
  size_t total = 1;
  for (int d : shape)
    total *= static_cast<size_t>(d);
  value.assign(total, 0.0f);
  grad.assign(total, 0.0f);
}

void init_he(Param &p, int fan_in, Rng &rng) {
  const double std = std::sqrt(2.0 / fan_in);
  for (auto &v : p.value)
    v = static_cast<float>(rng.normal(0.0, std));
}

void init_xavier(Param &p, int fan_in, int fan_out, Rng &rng) {
  const double bound = std::sqrt(6.0 / (fan_in + fan_out));
  for (auto &v : p.value)
    v = static_cast<float>(rng.uniform(-bound, bound));
}

double dot(std::span<const float> a, std::span<const float> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return s;
}

double norm(std::span<const float> a) { return std::sqrt(dot(a, a)); }

// ---------------------------------------------------------------- Linear --

Linear::Linear(const std::string &name, int in, int out, bool bias)
    : in_(in), out_(out), bias_(bias) {
  weight.resize(name + ".weight", {out, in});
  if (bias_)
    bias_param.resize(name + ".bias", {out});
}

void Linear::init(Rng &rng) { init_he(weight, in_, rng); }

std::vector<float> Linear::forward(const std::vector<float> &x) {
  x_ = x;
  return apply(x);
}

std::vector<float> Linear::apply(const std::vector<float> &x) const {
  if (static_cast<int>(x.size()) != in_)
    throw DataError(weight.name + ": expected input dim " +
                    std::to_string(in_) + ", got " + std::to_string(x.size()));
  std::vector<float> y(out_, 0.0f);
  for (int o = 0; o < out_; ++o) {
    const float *w = weight.value.data() + static_cast<size_t>(o) * in_;
    float acc = bias_ ? bias_param.value[o] : 0.0f;
    for (int i = 0; i < in_; ++i)
      acc += w[i] * x[i];
    y[o] = acc;
  }
  return y;
}

std::vector<float> Linear::backward(const std::vector<float> &gy) {
  std::vector<float> gx(in_, 0.0f);
  for (int o = 0; o < out_; ++o) {
    const float g = gy[o];
    const float *w = weight.value.data() + static_cast<size_t>(o) * in_;
    float *gw = weight.grad.data() + static_cast<size_t>(o) * in_;
    for (int i = 0; i < in_; ++i) {
      gw[i] += g * x_[i];
      gx[i] += g * w[i];
    }
    if (bias_)
      bias_param.grad[o] += g;
  }
  return gx;
}

void Linear::collect(std::vector<Param *> &out) {
  out.push_back(&weight);
  if (bias_)
    out.push_back(&bias_param);
}

// ---------------------------------------------------------------- Conv1d --

Conv1d::Conv1d(const std::string &name, int in_ch, int out_ch, int kernel,
               int stride, int pad)
    : in_ch_(in_ch), out_ch_(out_ch), kernel_(kernel), stride_(stride),
      pad_(pad) {
  weight.resize(name + ".weight", {out_ch, in_ch, kernel});
  bias.resize(name + ".bias", {out_ch});
}

void Conv1d::init(Rng &rng) { init_he(weight, in_ch_ * kernel_, rng); }

// Valid output range for tap j: u = t*stride + j - pad must lie in
// [0, in_len).
static inline void tap_bounds(int j, int pad, int stride, int in_len,
                              int t_out, int &t_lo, int &t_hi) {
  const int lo_num = pad - j;
  t_lo = lo_num <= 0 ? 0 : (lo_num + stride - 1) / stride;
  const int hi_num = in_len + pad - j; // need t*stride < hi_num
  t_hi = hi_num <= 0 ? 0 : std::min(t_out, (hi_num - 1) / stride + 1);
}

Mat Conv1d::run(const Mat &x) const {
  const int t_out = out_len(x.cols);
  if (t_out < 1)
    throw DataError(weight.name + ": input too short (" +
                    std::to_string(x.cols) + " cols)");
  Mat y(out_ch_, t_out);
  for (int o = 0; o < out_ch_; ++o) {
    float *yo = y.row(o);
    for (int t = 0; t < t_out; ++t)
      yo[t] = bias.value[o];
    for (int i = 0; i < in_ch_; ++i) {
      const float *xi = x.row(i);
      const float *w =
          weight.value.data() + (static_cast<size_t>(o) * in_ch_ + i) * kernel_;
      for (int j = 0; j < kernel_; ++j) {
        const float wj = w[j];
        int t_lo, t_hi;
        tap_bounds(j, pad_, stride_, x.cols, t_out, t_lo, t_hi);
        const float *xs = xi + (static_cast<long>(t_lo) * stride_ + j - pad_);
        if (stride_ == 1) {
          for (int t = t_lo; t < t_hi; ++t)
            yo[t] += wj * xs[t - t_lo];
        } else {
          for (int t = t_lo; t < t_hi; ++t)
            yo[t] += wj * xs[static_cast<long>(t - t_lo) * stride_];
        }
      }
    }
  }
  return y;
}

Mat Conv1d::forward(const Mat &x) {
  x_ = x;
  return run(x);
}

Mat Conv1d::apply(const Mat &x) const { return run(x); }

Mat Conv1d::backward(const Mat &gy) {
  const int t_out = gy.cols;
  Mat gx(in_ch_, x_.cols);
  for (int o = 0; o < out_ch_; ++o) {
    const float *go = gy.row(o);
    double gb = 0.0;
    for (int t = 0; t < t_out; ++t)
      gb += go[t];
    bias.grad[o] += static_cast<float>(gb);
    for (int i = 0; i < in_ch_; ++i) {
      const float *xi = x_.row(i);
      float *gxi = gx.row(i);
      const size_t base = (static_cast<size_t>(o) * in_ch_ + i) * kernel_;
      for (int j = 0; j < kernel_; ++j) {
        const float wj = weight.value[base + j];
        int t_lo, t_hi;
        tap_bounds(j, pad_, stride_, x_.cols, t_out, t_lo, t_hi);
        const long off = static_cast<long>(t_lo) * stride_ + j - pad_;
        double gw = 0.0;
        for (int t = t_lo; t < t_hi; ++t) {
          const long u = off + static_cast<long>(t - t_lo) * stride_;
          gw += static_cast<double>(go[t]) * xi[u];
          gxi[u] += wj * go[t];
        }
        weight.grad[base + j] += static_cast<float>(gw);
      }
    }
  }
  return gx;
}

void Conv1d::collect(std::vector<Param *> &out) {
  out.push_back(&weight);
  out.push_back(&bias);
}

// ------------------------------------------------------------- LeakyRelu --

Mat LeakyRelu::forward(const Mat &x) {
  x_ = x;
  return apply(x);
}

Mat LeakyRelu::apply(const Mat &x) const {
  Mat y = x;
  for (auto &v : y.data)
    if (v < 0.0f)
      v *= slope_;
  return y;
}

Mat LeakyRelu::backward(const Mat &gy) const {
  Mat gx = gy;
  for (size_t i = 0; i < gx.data.size(); ++i)
    if (x_.data[i] < 0.0f)
      gx.data[i] *= slope_;
  return gx;
}

std::vector<float> LeakyRelu::forward(const std::vector<float> &x) {
  xv_ = x;
  return apply(x);
}

std::vector<float> LeakyRelu::apply(const std::vector<float> &x) const {
  std::vector<float> y = x;
  for (auto &v : y)
    if (v < 0.0f)
      v *= slope_;
  return y;
}

std::vector<float> LeakyRelu::backward(const std::vector<float> &gy) const {
  std::vector<float> gx = gy;
  for (size_t i = 0; i < gx.size(); ++i)
    if (xv_[i] < 0.0f)
      gx[i] *= slope_;
  return gx;
}

// ----------------------------------------------------------------- SE ------

SEBlock::SEBlock(const std::string &name, int channels, int reduction)
    : channels_(channels) {
  const int mid = std::max(1, channels / reduction);
  squeeze = Linear(name + ".squeeze", channels, mid);
  excite = Linear(name + ".excite", mid, channels);
}

void SEBlock::init(Rng &rng) {
  squeeze.init(rng);
  excite.init(rng);
}

Mat SEBlock::forward(const Mat &x) {
  x_ = x;
  z_.assign(channels_, 0.0f);
  for (int c = 0; c < channels_; ++c) {
    double s = 0.0;
    const float *xc = x.row(c);
    for (int t = 0; t < x.cols; ++t)
      s += xc[t];
    z_[c] = static_cast<float>(s / x.cols);
  }
  h_ = squeeze.forward(z_);
  for (auto &v : h_)
    v = std::max(v, 0.0f);
  g_ = excite.forward(h_);
  for (auto &v : g_)
    v = sigmoidf(v);

  Mat y(x.rows, x.cols);
  for (int c = 0; c < channels_; ++c) {
    const float g = g_[c];
    const float *xc = x.row(c);
    float *yc = y.row(c);
    for (int t = 0; t < x.cols; ++t)
      yc[t] = g * xc[t];
  }
  return y;
}

Mat SEBlock::apply(const Mat &x) const {
  std::vector<float> z(channels_, 0.0f);
  for (int c = 0; c < channels_; ++c) {
    double s = 0.0;
    const float *xc = x.row(c);
    for (int t = 0; t < x.cols; ++t)
      s += xc[t];
    z[c] = static_cast<float>(s / x.cols);
  }
  auto h = squeeze.apply(z);
  for (auto &v : h)
    v = std::max(v, 0.0f);
  auto g = excite.apply(h);
  for (auto &v : g)
    v = sigmoidf(v);
  Mat y(x.rows, x.cols);
  for (int c = 0; c < channels_; ++c)
    for (int t = 0; t < x.cols; ++t)
      y.at(c, t) = g[c] * x.at(c, t);
  return y;
}

Mat SEBlock::backward(const Mat &gy) {
  // Direct path plus the gate path through sigmoid/linear/mean.
  std::vector<float> gg(channels_, 0.0f);
  Mat gx(x_.rows, x_.cols);
  for (int c = 0; c < channels_; ++c) {
    const float *xc = x_.row(c);
    const float *gc = gy.row(c);
    float *gxc = gx.row(c);
    double s = 0.0;
    for (int t = 0; t < x_.cols; ++t) {
      s += static_cast<double>(gc[t]) * xc[t];
      gxc[t] = gc[t] * g_[c];
    }
    gg[c] = static_cast<float>(s);
  }
  // through sigmoid
  std::vector<float> gpre(channels_);
  for (int c = 0; c < channels_; ++c)
    gpre[c] = gg[c] * g_[c] * (1.0f - g_[c]);
  auto gh = excite.backward(gpre);
  for (size_t i = 0; i < gh.size(); ++i)
    if (h_[i] <= 0.0f)
      gh[i] = 0.0f;
  auto gz = squeeze.backward(gh);
  const float inv_t = 1.0f / static_cast<float>(x_.cols);
  for (int c = 0; c < channels_; ++c) {
    float *gxc = gx.row(c);
    const float add = gz[c] * inv_t;
    for (int t = 0; t < x_.cols; ++t)
      gxc[t] += add;
  }
  return gx;
}

void SEBlock::collect(std::vector<Param *> &out) {
  squeeze.collect(out);
  excite.collect(out);
}

// ------------------------------------------------------------------ ASP ----

AttentiveStatsPool::AttentiveStatsPool(const std::string &name, int channels,
                                       int hidden, double eps)
    : channels_(channels), hidden_(hidden), eps_(eps) {
  att_w.resize(name + ".att_w", {hidden, channels});
  att_b.resize(name + ".att_b", {hidden});
  att_v.resize(name + ".att_v", {hidden});
}

void AttentiveStatsPool::init(Rng &rng) {
  init_he(att_w, channels_, rng);
  // small attention read-out so initial attention is near uniform
  for (auto &v : att_v.value)
    v = static_cast<float>(rng.normal(0.0, 0.1));
}

void AttentiveStatsPool::run(const Mat &x, std::vector<float> &alpha, Mat *act,
                             std::vector<float> &out) const {
  const int T = x.cols;
  if (T < 1)
    throw DataError("attentive pooling over empty frame axis");
  Mat a(hidden_, T); // tanh activations
  std::vector<float> scores(T, 0.0f);
  for (int t = 0; t < T; ++t) {
    double e = 0.0;
    for (int h = 0; h < hidden_; ++h) {
      const float *w = att_w.value.data() + static_cast<size_t>(h) * channels_;
      float pre = att_b.value[h];
      for (int c = 0; c < channels_; ++c)
        pre += w[c] * x.at(c, t);
      const float th = std::tanh(pre);
      a.at(h, t) = th;
      e += static_cast<double>(att_v.value[h]) * th;
    }
    scores[t] = static_cast<float>(e);
  }
  // softmax over frames
  float mx = scores[0];
  for (float s : scores)
    mx = std::max(mx, s);
  double z = 0.0;
  alpha.assign(T, 0.0f);
  for (int t = 0; t < T; ++t) {
    alpha[t] = std::exp(scores[t] - mx);
    z += alpha[t];
  }
  for (int t = 0; t < T; ++t)
    alpha[t] = static_cast<float>(alpha[t] / z);

  out.assign(2 * channels_, 0.0f);
  for (int c = 0; c < channels_; ++c) {
    const float *xc = x.row(c);
    double mu = 0.0, m2 = 0.0;
    for (int t = 0; t < T; ++t) {
      const double ax = static_cast<double>(alpha[t]) * xc[t];
      mu += ax;
      m2 += ax * xc[t];
    }
    const double q = m2 - mu * mu;
    out[c] = static_cast<float>(mu);
    out[channels_ + c] = static_cast<float>(std::sqrt(std::max(q, eps_)));
  }
  if (act)
    *act = std::move(a);
}

std::vector<float> AttentiveStatsPool::forward(const Mat &x) {
  x_ = x;
  std::vector<float> out;
  run(x, alpha_, &act_, out);
  out_ = out;
  return out;
}

std::vector<float> AttentiveStatsPool::apply(const Mat &x) const {
  std::vector<float> alpha, out;
  run(x, alpha, nullptr, out);
  return out;
}

Mat AttentiveStatsPool::backward(const std::vector<float> &gy) {
  const int T = x_.cols;
  const int C = channels_;
  Mat gx(C, T);

  // Split incoming grad into mean part and std part; convert std grad into
  // grads on mu and the second moment.
  std::vector<double> gmu(C), gm2(C);
  for (int c = 0; c < C; ++c) {
    const double sigma = out_[C + c];
    double mu = out_[c];
    double gq = 0.0;
    // recover q from sigma^2; gradient passes only when not floored
    const double q = sigma * sigma;
    if (q > eps_ + 1e-30)
      gq = static_cast<double>(gy[C + c]) / (2.0 * sigma);
    gm2[c] = gq;
    gmu[c] = static_cast<double>(gy[c]) - 2.0 * mu * gq;
  }

  // Per frame: direct x path and attention-weight path.
  std::vector<double> galpha(T, 0.0);
  for (int c = 0; c < C; ++c) {
    const float *xc = x_.row(c);
    float *gxc = gx.row(c);
    for (int t = 0; t < T; ++t) {
      const double xv = xc[t];
      galpha[t] += gmu[c] * xv + gm2[c] * xv * xv;
      gxc[t] += static_cast<float>(alpha_[t] * (gmu[c] + 2.0 * gm2[c] * xv));
    }
  }
  // softmax backward
  double dotp = 0.0;
  for (int t = 0; t < T; ++t)
    dotp += galpha[t] * alpha_[t];
  std::vector<double> ge(T);
  for (int t = 0; t < T; ++t)
    ge[t] = alpha_[t] * (galpha[t] - dotp);

  // through scorer: e_t = v . tanh(W x_t + b)
  for (int t = 0; t < T; ++t) {
    const double get = ge[t];
    for (int h = 0; h < hidden_; ++h) {
      const float th = act_.at(h, t);
      const double gpre =
          get * att_v.value[h] * (1.0 - static_cast<double>(th) * th);
      att_v.grad[h] += static_cast<float>(get * th);
      att_b.grad[h] += static_cast<float>(gpre);
      const float *w = att_w.value.data() + static_cast<size_t>(h) * channels_;
      float *gw = att_w.grad.data() + static_cast<size_t>(h) * channels_;
      for (int c = 0; c < C; ++c) {
        gw[c] += static_cast<float>(gpre * x_.at(c, t));
        gx.at(c, t) += static_cast<float>(gpre * w[c]);
      }
    }
  }
  return gx;
}

void AttentiveStatsPool::collect(std::vector<Param *> &out) {
  out.push_back(&att_w);
  out.push_back(&att_b);
  out.push_back(&att_v);
}

// ---------------------------------------------------------------- AbsAct ---

Mat AbsAct::forward(const Mat &x) {
  x_ = x;
  return apply(x);
}

Mat AbsAct::apply(const Mat &x) const {
  Mat y = x;
  for (auto &v : y.data)
    v = std::abs(v);
  return y;
}

Mat AbsAct::backward(const Mat &gy) const {
  Mat gx = gy;
  for (size_t i = 0; i < gx.data.size(); ++i)
    if (x_.data[i] < 0.0f)
      gx.data[i] = -gx.data[i];
  return gx;
}

// -------------------------------------------------------------- MaxPool1d --

Mat MaxPool1d::run(const Mat &x, std::vector<int> *argmax) const {
  const int t_out = out_len(x.cols);
  if (t_out < 1)
    throw DataError("MaxPool1d: input shorter than pool width");
  Mat y(x.rows, t_out);
  if (argmax)
    argmax->assign(static_cast<size_t>(x.rows) * t_out, 0);
  for (int c = 0; c < x.rows; ++c) {
    const float *xc = x.row(c);
    float *yc = y.row(c);
    for (int t = 0; t < t_out; ++t) {
      int best = t * width_;
      float bv = xc[best];
      for (int j = 1; j < width_; ++j) {
        const int u = t * width_ + j;
        if (xc[u] > bv) {
          bv = xc[u];
          best = u;
        }
      }
      yc[t] = bv;
      if (argmax)
        (*argmax)[static_cast<size_t>(c) * t_out + t] = best;
    }
  }
  return y;
}

Mat MaxPool1d::forward(const Mat &x) {
  in_rows_ = x.rows;
  in_cols_ = x.cols;
  return run(x, &argmax_);
}

Mat MaxPool1d::apply(const Mat &x) const { return run(x, nullptr); }

Mat MaxPool1d::backward(const Mat &gy) const {
  Mat gx(in_rows_, in_cols_);
  for (int c = 0; c < gy.rows; ++c)
    for (int t = 0; t < gy.cols; ++t)
      gx.row(c)[argmax_[static_cast<size_t>(c) * gy.cols + t]] +=
          gy.at(c, t);
  return gx;
}

// ------------------------------------------------------------- SincConv ----

namespace {
constexpr double kSincSampleRate = 16000.0;
constexpr double kMinBandHz = 10.0;
constexpr double kMaxFreqHz = 7800.0;

double hz_to_mel_s(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz_s(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}
} // namespace

SincConv::SincConv(const std::string &name, int filters, int kernel,
                   int stride)
    : filters_(filters), kernel_(kernel), stride_(stride) {
  if (kernel_ % 2 == 0)
    throw ConfigError("SincConv kernel length must be odd");
  low_hz.resize(name + ".low_hz", {filters});
  band_hz.resize(name + ".band_hz", {filters});
}

void SincConv::init_mel() {
  const double mel_lo = hz_to_mel_s(30.0);
  const double mel_hi = hz_to_mel_s(kMaxFreqHz);
  for (int f = 0; f < filters_; ++f) {
    const double m0 = mel_lo + (mel_hi - mel_lo) * f / filters_;
    const double m1 = mel_lo + (mel_hi - mel_lo) * (f + 1) / filters_;
    const double f0 = mel_to_hz_s(m0);
    const double f1 = mel_to_hz_s(m1);
    low_hz.value[f] = static_cast<float>(f0);
    band_hz.value[f] = static_cast<float>(f1 - f0);
  }
}

// Windowed-sinc band-pass taps for the current parameters.
void SincConv::kernels(std::vector<float> &taps) const {
  taps.assign(static_cast<size_t>(filters_) * kernel_, 0.0f);
  const int half = (kernel_ - 1) / 2;
  for (int f = 0; f < filters_; ++f) {
    const double f1 = std::min(std::abs(static_cast<double>(low_hz.value[f])),
                               kMaxFreqHz - kMinBandHz);
    const double f2 =
        std::min(f1 + std::max(std::abs(static_cast<double>(band_hz.value[f])),
                               kMinBandHz),
                 kMaxFreqHz);
    float *k = taps.data() + static_cast<size_t>(f) * kernel_;
    for (int j = 0; j < kernel_; ++j) {
      const double tau = (j - half) / kSincSampleRate;
      const double win =
          0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * j / (kernel_ - 1));
      double v;
      if (j == half)
        v = 2.0 * (f2 - f1);
      else
        v = (std::sin(2.0 * std::numbers::pi * f2 * tau) -
             std::sin(2.0 * std::numbers::pi * f1 * tau)) /
            (std::numbers::pi * tau);
      // scale keeps band outputs O(1) for unit-amplitude input
      k[j] = static_cast<float>(v * win / kSincSampleRate * 8.0);
    }
  }
}

Mat SincConv::apply(const std::vector<float> &x) const {
  const int t_out = out_len(static_cast<int>(x.size()));
  if (t_out < 1)
    throw DataError("SincConv: input shorter than kernel");
  std::vector<float> taps;
  kernels(taps);
  Mat y(filters_, t_out);
  for (int f = 0; f < filters_; ++f) {
    const float *k = taps.data() + static_cast<size_t>(f) * kernel_;
    float *yf = y.row(f);
    for (int t = 0; t < t_out; ++t) {
      const float *xs = x.data() + static_cast<size_t>(t) * stride_;
      float acc = 0.0f;
      for (int j = 0; j < kernel_; ++j)
        acc += k[j] * xs[j];
      yf[t] = acc;
    }
  }
  return y;
}

Mat SincConv::forward(const std::vector<float> &x) {
  x_ = x;
  Mat y = apply(x);
  t_out_ = y.cols;
  return y;
}

void SincConv::backward(const Mat &gy) {
  const int half = (kernel_ - 1) / 2;
  for (int f = 0; f < filters_; ++f) {
    // Mirror the clamp decisions made in kernels(); clamped edges pass no
    // gradient (subgradient zero).
    const double raw_low = low_hz.value[f];
    const double raw_band = band_hz.value[f];
    const bool f1_clamped = std::abs(raw_low) > kMaxFreqHz - kMinBandHz;
    const double f1 = std::min(std::abs(raw_low), kMaxFreqHz - kMinBandHz);
    const bool band_floored = std::abs(raw_band) < kMinBandHz;
    const double band_abs = std::max(std::abs(raw_band), kMinBandHz);
    const bool f2_clamped = f1 + band_abs > kMaxFreqHz;
    const double f2 = std::min(f1 + band_abs, kMaxFreqHz);
    const double sgn_low = raw_low < 0.0 ? -1.0 : 1.0;
    const double sgn_band = raw_band < 0.0 ? -1.0 : 1.0;

    const float *gf = gy.row(f);
    double g_f1 = 0.0, g_f2 = 0.0;
    for (int j = 0; j < kernel_; ++j) {
      // dK/df over taps, windowed and scaled like kernels()
      const double tau = (j - half) / kSincSampleRate;
      const double win =
          0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * j / (kernel_ - 1));
      const double scale = win / kSincSampleRate * 8.0;
      const double dk_df2 =
          (j == half ? 2.0 : 2.0 * std::cos(2.0 * std::numbers::pi * f2 * tau)) *
          scale;
      const double dk_df1 =
          (j == half ? -2.0
                     : -2.0 * std::cos(2.0 * std::numbers::pi * f1 * tau)) *
          scale;
      // gradient of loss wrt tap j
      double gk = 0.0;
      for (int t = 0; t < t_out_; ++t)
        gk += static_cast<double>(gf[t]) * x_[static_cast<size_t>(t) * stride_ + j];
      g_f1 += gk * dk_df1;
      g_f2 += gk * dk_df2;
    }
    // f1 = |theta_low| (clamped); f2 = f1 + max(|theta_band|, min) (clamped).
    const double df2_df1 = f2_clamped ? 0.0 : 1.0;
    if (!f1_clamped)
      low_hz.grad[f] += static_cast<float>((g_f1 + g_f2 * df2_df1) * sgn_low);
    if (!f2_clamped && !band_floored)
      band_hz.grad[f] += static_cast<float>(g_f2 * sgn_band);
  }
}

void SincConv::collect(std::vector<Param *> &out) {
  out.push_back(&low_hz);
  out.push_back(&band_hz);
}

// ---------------------------------------------------------------- Adam ------

Adam::Adam(std::vector<Param *> params, double beta1, double beta2, double eps)
    : params_(std::move(params)), beta1_(beta1), beta2_(beta2), eps_(eps) {
  m_.resize(params_.size());
  v_.resize(params_.size());
  for (size_t i = 0; i < params_.size(); ++i) {
    m_[i].assign(params_[i]->size(), 0.0f);
    v_[i].assign(params_[i]->size(), 0.0f);
  }
}

void Adam::zero_grad() {
  for (auto *p : params_)
    p->zero_grad();
}

void Adam::step(double lr) {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (size_t i = 0; i < params_.size(); ++i) {
    Param &p = *params_[i];
    auto &m = m_[i];
    auto &v = v_[i];
    for (size_t k = 0; k < p.size(); ++k) {
      const double g = p.grad[k];
      m[k] = static_cast<float>(beta1_ * m[k] + (1.0 - beta1_) * g);
      v[k] = static_cast<float>(beta2_ * v[k] + (1.0 - beta2_) * g * g);
      const double mhat = m[k] / bc1;
      const double vhat = v[k] / bc2;
      p.value[k] -= static_cast<float>(lr * mhat / (std::sqrt(vhat) + eps_));
    }
  }
}

} // namespace sasv::nn
