// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The sasvkit Authors
//
// Minimal dense/conv layer kit with hand-written backward passes, sized for
// the desk-scale encoders and back-end in this project. Parameters and
// activations are float32 (matching the checkpoint container); loss heads
// that need tighter tolerances run in double (see the owning modules).
//
// Layers cache their forward activations, so a layer instance is single-
// threaded during training. Read-only parallel inference copies the network
// per worker.

#ifndef SASV_NN_HPP
#define SASV_NN_HPP

#include "sasv/rng.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace sasv::nn {

/// Named learnable tensor with its gradient accumulator.
struct Param {
  std::string name;
  std::vector<int> shape;
  std::vector<float> value;
  std::vector<float> grad;

  void resize(std::string n, std::vector<int> s);
  size_t size() const { return value.size(); }
  void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0f); }
};

/// Row-major [rows x cols] float matrix; rows are channels, cols time.
struct Mat {
  int rows = 0, cols = 0;
  std::vector<float> data;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0f) {}
  float &at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  float at(int r, int c) const {
    return data[static_cast<size_t>(r) * cols + c];
  }
  float *row(int r) { return data.data() + static_cast<size_t>(r) * cols; }
  const float *row(int r) const {
    return data.data() + static_cast<size_t>(r) * cols;
  }
};

// He-normal initialization for a parameter with the given fan-in.
void init_he(Param &p, int fan_in, Rng &rng);
// Uniform Xavier-style init.
void init_xavier(Param &p, int fan_in, int fan_out, Rng &rng);

/// y = W x + b over flat vectors. W is [out x in].
class Linear {
public:
  Linear() = default;
  Linear(const std::string &name, int in, int out, bool bias = true);
  void init(Rng &rng);

  std::vector<float> forward(const std::vector<float> &x);
  /// Accumulates parameter grads; returns grad wrt x.
  std::vector<float> backward(const std::vector<float> &gy);
  /// Cache-free forward for read-only inference.
  std::vector<float> apply(const std::vector<float> &x) const;

  void collect(std::vector<Param *> &out);

  int in_dim() const { return in_; }
  int out_dim() const { return out_; }
  Param weight, bias_param;

private:
  int in_ = 0, out_ = 0;
  bool bias_ = true;
  std::vector<float> x_;
};

/// 1-D convolution over [C_in x T] -> [C_out x T_out].
class Conv1d {
public:
  Conv1d() = default;
  Conv1d(const std::string &name, int in_ch, int out_ch, int kernel,
         int stride, int pad);
  void init(Rng &rng);

  Mat forward(const Mat &x);
  Mat backward(const Mat &gy);
  Mat apply(const Mat &x) const;

  void collect(std::vector<Param *> &out);
  int out_len(int in_len) const {
    return (in_len + 2 * pad_ - kernel_) / stride_ + 1;
  }

  Param weight; // [out_ch x in_ch x kernel]
  Param bias;

private:
  Mat run(const Mat &x) const;
  int in_ch_ = 0, out_ch_ = 0, kernel_ = 1, stride_ = 1, pad_ = 0;
  Mat x_;
};

/// Leaky rectifier, slope for negative inputs; slope 0 gives plain ReLU.
class LeakyRelu {
public:
  explicit LeakyRelu(float slope = 0.0f) : slope_(slope) {}
  Mat forward(const Mat &x);
  Mat backward(const Mat &gy) const;
  Mat apply(const Mat &x) const;
  std::vector<float> forward(const std::vector<float> &x);
  std::vector<float> backward(const std::vector<float> &gy) const;
  std::vector<float> apply(const std::vector<float> &x) const;

private:
  float slope_ = 0.0f;
  Mat x_;
  std::vector<float> xv_;
};

/// Squeeze-and-excitation channel gate over [C x T].
class SEBlock {
public:
  SEBlock() = default;
  SEBlock(const std::string &name, int channels, int reduction);
  void init(Rng &rng);

  Mat forward(const Mat &x);
  Mat backward(const Mat &gy);
  Mat apply(const Mat &x) const;
  void collect(std::vector<Param *> &out);

  Linear squeeze, excite;

private:
  int channels_ = 0;
  Mat x_;
  std::vector<float> z_, h_, g_;
};

/// Attentive statistics pooling: softmax attention over frames from a
/// tanh-MLP scorer, concatenated weighted mean and weighted std.
/// Input [C x T], output 2C.
class AttentiveStatsPool {
public:
  AttentiveStatsPool() = default;
  AttentiveStatsPool(const std::string &name, int channels, int hidden,
                     double eps = 1e-6);
  void init(Rng &rng);

  std::vector<float> forward(const Mat &x);
  Mat backward(const std::vector<float> &gy);
  std::vector<float> apply(const Mat &x) const;
  void collect(std::vector<Param *> &out);

  int out_dim() const { return 2 * channels_; }
  double eps() const { return eps_; }

  Param att_w; // [hidden x C]
  Param att_b; // [hidden]
  Param att_v; // [hidden]

private:
  void run(const Mat &x, std::vector<float> &alpha, Mat *act,
           std::vector<float> &out) const;
  int channels_ = 0, hidden_ = 0;
  double eps_ = 1e-6;
  Mat x_, act_;             // act_: tanh activations [hidden x T]
  std::vector<float> alpha_, out_;
};

/// Elementwise absolute value.
class AbsAct {
public:
  Mat forward(const Mat &x);
  Mat backward(const Mat &gy) const;
  Mat apply(const Mat &x) const;

private:
  Mat x_;
};

/// Non-overlapping 1-D max pooling along the time axis.
class MaxPool1d {
public:
  explicit MaxPool1d(int width = 2) : width_(width) {}
  Mat forward(const Mat &x);
  Mat backward(const Mat &gy) const;
  Mat apply(const Mat &x) const;
  int out_len(int in_len) const { return in_len / width_; }

private:
  int width_ = 2;
  Mat run(const Mat &x, std::vector<int> *argmax) const;
  std::vector<int> argmax_;
  int in_rows_ = 0, in_cols_ = 0;
};

/// Learnable band-pass filterbank applied directly to the waveform
/// (windowed-sinc kernels parameterized by low edge and bandwidth).
/// Input [1 x N], output [F x T_out]; no input gradient (waveforms are
/// leaves).
class SincConv {
public:
  SincConv() = default;
  SincConv(const std::string &name, int filters, int kernel, int stride);
  /// Mel-spaced initial bands over [30 Hz, 7800 Hz].
  void init_mel();

  Mat forward(const std::vector<float> &x);
  void backward(const Mat &gy); // accumulates into low_hz/band_hz grads
  Mat apply(const std::vector<float> &x) const;
  void collect(std::vector<Param *> &out);

  int out_len(int n) const { return (n - kernel_) / stride_ + 1; }
  int filters() const { return filters_; }

  Param low_hz;  // [F]
  Param band_hz; // [F]

private:
  void kernels(std::vector<float> &taps) const; // [F x kernel]
  int filters_ = 0, kernel_ = 129, stride_ = 16;
  std::vector<float> x_;
  int t_out_ = 0;
};

/// Adam with bias correction; moments in float, deterministic update order.
class Adam {
public:
  Adam() = default;
  explicit Adam(std::vector<Param *> params, double beta1 = 0.9,
                double beta2 = 0.999, double eps = 1e-8);

  void zero_grad();
  void step(double lr);
  size_t step_count() const { return t_; }

private:
  std::vector<Param *> params_;
  std::vector<std::vector<float>> m_, v_;
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  size_t t_ = 0;
};

// Small helpers shared by the networks.
inline float sigmoidf(float x) { return 1.0f / (1.0f + std::exp(-x)); }
double dot(std::span<const float> a, std::span<const float> b);
double norm(std::span<const float> a);

} // namespace sasv::nn

#endif
