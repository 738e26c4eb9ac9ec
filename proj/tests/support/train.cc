// Copyright 2026 The KWS Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "train.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "kws/engine/inference.h"
#include "kws/error.h"

namespace kws::testing {
namespace {

using engine::LayerKind;
using engine::LayerSpec;
using engine::ModelGraph;

struct Param {
  std::vector<double> value, grad, m, v;

  void init(std::span<const float> src) {
    value.assign(src.begin(), src.end());
    grad.assign(value.size(), 0.0);
    m.assign(value.size(), 0.0);
    v.assign(value.size(), 0.0);
  }
  std::vector<float> to_float() const { return {value.begin(), value.end()}; }
};

struct Slot {
  Param a;  // weights, or batchnorm gamma
  Param b;  // bias, or batchnorm beta
  std::vector<double> mean, inv_std;  // batchnorm only
};

struct Cache {
  std::vector<std::vector<double>> in, pre, post;
  std::vector<std::vector<std::size_t>> argmax;
};

bool trainable(const LayerSpec& l) {
  return l.kind == LayerKind::kConv2d || l.kind == LayerKind::kFullyConnected ||
         (l.kind == LayerKind::kMulAdd && l.batchnorm);
}

std::vector<Slot> load_slots(const ModelGraph& model) {
  std::vector<Slot> slots(model.layers.size());
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const auto& l = model.layers[i];
    auto& s = slots[i];
    if (l.kind == LayerKind::kMulAdd) {
      require(l.batchnorm.has_value(), ErrorCode::kContract, "trainer needs batchnorm mul_add");
      const auto& bn = *l.batchnorm;
      s.a.init(bn.gamma.real_data());
      s.b.init(bn.beta.real_data());
      s.mean.assign(bn.mean.real_data().begin(), bn.mean.real_data().end());
      for (float var : bn.variance.real_data()) s.inv_std.push_back(1.0 / std::sqrt(var + bn.epsilon));
    } else if (trainable(l)) {
      s.a.init(l.weights->real_data());
      s.b.init(l.bias->real_data());
    }
  }
  return slots;
}

void store_slots(ModelGraph& model, const std::vector<Slot>& slots) {
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    auto& l = model.layers[i];
    const auto& s = slots[i];
    if (!trainable(l)) continue;
    if (l.kind == LayerKind::kMulAdd) {
      const std::size_t c = s.a.value.size();
      l.batchnorm->gamma = Tensor::real({c}, s.a.to_float());
      l.batchnorm->beta = Tensor::real({c}, s.b.to_float());
    } else {
      l.weights = Tensor::real(l.weights->shape(), s.a.to_float());
      l.bias = Tensor::real(l.bias->shape(), s.b.to_float());
    }
  }
}

void forward(const ModelGraph& model, const std::vector<Slot>& slots,
             const dsp::FeatureMatrix& f, Cache& c) {
  const std::size_t n = model.layers.size();
  c.in.resize(n);
  c.pre.resize(n);
  c.post.resize(n);
  c.argmax.resize(n);
  std::vector<double> x(f.values.begin(), f.values.end());
  for (std::size_t li = 0; li < n; ++li) {
    const auto& l = model.layers[li];
    const auto& s = slots[li];
    const Shape& is = l.input_shape;
    const Shape& os = l.output_shape;
    std::vector<double> y(num_elements(os), 0.0);
    switch (l.kind) {
      case LayerKind::kConv2d: {
        const std::size_t W = is[1], C = is[2], OH = os[0], OW = os[1], O = os[2];
        const std::size_t kh = l.kernel_h, kw = l.kernel_w;
        for (std::size_t oy = 0; oy < OH; ++oy)
          for (std::size_t ox = 0; ox < OW; ++ox)
            for (std::size_t o = 0; o < O; ++o) {
              double acc = s.b.value[o];
              const double* w = &s.a.value[o * kh * kw * C];
              for (std::size_t ky = 0; ky < kh; ++ky) {
                const double* in = &x[((oy + ky) * W + ox) * C];
                for (std::size_t k = 0; k < kw * C; ++k) acc += w[ky * kw * C + k] * in[k];
              }
              y[(oy * OW + ox) * O + o] = acc;
            }
        break;
      }
      case LayerKind::kMulAdd: {
        const std::size_t C = is.back();
        for (std::size_t i = 0; i < x.size(); ++i) {
          const std::size_t ch = i % C;
          y[i] = s.a.value[ch] * (x[i] - s.mean[ch]) * s.inv_std[ch] + s.b.value[ch];
        }
        break;
      }
      case LayerKind::kMaxPool2d: {
        const std::size_t W = is[1], C = is[2], OH = os[0], OW = os[1];
        c.argmax[li].assign(y.size(), 0);
        for (std::size_t oy = 0; oy < OH; ++oy)
          for (std::size_t ox = 0; ox < OW; ++ox)
            for (std::size_t ch = 0; ch < C; ++ch) {
              std::size_t best = ((oy * l.stride_h) * W + ox * l.stride_w) * C + ch;
              for (std::size_t ky = 0; ky < l.kernel_h; ++ky)
                for (std::size_t kx = 0; kx < l.kernel_w; ++kx) {
                  const std::size_t idx =
                      ((oy * l.stride_h + ky) * W + ox * l.stride_w + kx) * C + ch;
                  if (x[idx] > x[best]) best = idx;
                }
              const std::size_t o = (oy * OW + ox) * C + ch;
              y[o] = x[best];
              c.argmax[li][o] = best;
            }
        break;
      }
      case LayerKind::kMean: {
        const std::size_t C = is[2];
        const double count = static_cast<double>(x.size() / C);
        for (std::size_t i = 0; i < x.size(); ++i) y[i % C] += x[i];
        for (auto& v : y) v /= count;
        break;
      }
      case LayerKind::kFullyConnected: {
        const std::size_t I = is[0];
        for (std::size_t o = 0; o < y.size(); ++o) {
          double acc = s.b.value[o];
          for (std::size_t i = 0; i < I; ++i) acc += s.a.value[o * I + i] * x[i];
          y[o] = acc;
        }
        break;
      }
      case LayerKind::kLogistic:
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = 1.0 / (1.0 + std::exp(-x[i]));
        break;
    }
    c.in[li] = std::move(x);
    c.pre[li] = y;
    if (l.relu) {
      for (auto& v : y) v = std::max(v, 0.0);
    }
    c.post[li] = y;
    x = std::move(y);
  }
}

// Accumulates parameter gradients for one sample; `dlogit` is d(loss)/d(logit).
void backward(const ModelGraph& model, std::vector<Slot>& slots, const Cache& c, double dlogit) {
  const std::size_t n = model.layers.size();
  std::vector<double> dy = {dlogit};
  // The logistic layer is folded into dlogit.
  for (std::size_t li = n - 1; li-- > 0;) {
    const auto& l = model.layers[li];
    auto& s = slots[li];
    const auto& x = c.in[li];
    if (l.relu) {
      for (std::size_t i = 0; i < dy.size(); ++i) {
        if (c.pre[li][i] <= 0.0) dy[i] = 0.0;
      }
    }
    std::vector<double> dx(x.size(), 0.0);
    const Shape& is = l.input_shape;
    const Shape& os = l.output_shape;
    switch (l.kind) {
      case LayerKind::kConv2d: {
        const std::size_t W = is[1], C = is[2], OH = os[0], OW = os[1], O = os[2];
        const std::size_t kh = l.kernel_h, kw = l.kernel_w;
        const bool need_dx = li > 0;
        for (std::size_t oy = 0; oy < OH; ++oy)
          for (std::size_t ox = 0; ox < OW; ++ox)
            for (std::size_t o = 0; o < O; ++o) {
              const double g = dy[(oy * OW + ox) * O + o];
              if (g == 0.0) continue;
              s.b.grad[o] += g;
              double* gw = &s.a.grad[o * kh * kw * C];
              const double* w = &s.a.value[o * kh * kw * C];
              for (std::size_t ky = 0; ky < kh; ++ky) {
                const std::size_t base = ((oy + ky) * W + ox) * C;
                for (std::size_t k = 0; k < kw * C; ++k) {
                  gw[ky * kw * C + k] += g * x[base + k];
                  if (need_dx) dx[base + k] += g * w[ky * kw * C + k];
                }
              }
            }
        break;
      }
      case LayerKind::kMulAdd: {
        const std::size_t C = is.back();
        for (std::size_t i = 0; i < x.size(); ++i) {
          const std::size_t ch = i % C;
          const double xhat = (x[i] - s.mean[ch]) * s.inv_std[ch];
          s.a.grad[ch] += dy[i] * xhat;
          s.b.grad[ch] += dy[i];
          dx[i] = dy[i] * s.a.value[ch] * s.inv_std[ch];
        }
        break;
      }
      case LayerKind::kMaxPool2d:
        for (std::size_t o = 0; o < dy.size(); ++o) dx[c.argmax[li][o]] += dy[o];
        break;
      case LayerKind::kMean: {
        const std::size_t C = is[2];
        const double count = static_cast<double>(x.size() / C);
        for (std::size_t i = 0; i < x.size(); ++i) dx[i] = dy[i % C] / count;
        break;
      }
      case LayerKind::kFullyConnected: {
        const std::size_t I = is[0];
        for (std::size_t o = 0; o < dy.size(); ++o) {
          s.b.grad[o] += dy[o];
          for (std::size_t i = 0; i < I; ++i) {
            s.a.grad[o * I + i] += dy[o] * x[i];
            dx[i] += dy[o] * s.a.value[o * I + i];
          }
        }
        break;
      }
      case LayerKind::kLogistic:
        fail(ErrorCode::kContract, "logistic must be the last layer");
    }
    dy = std::move(dx);
  }
}

void adam_step(Param& p, double rate, double decay, double scale, int t) {
  const double c1 = 1.0 - std::pow(0.9, t);
  const double c2 = 1.0 - std::pow(0.999, t);
  for (std::size_t k = 0; k < p.value.size(); ++k) {
    const double g = p.grad[k] * scale + decay * p.value[k];
    p.m[k] = 0.9 * p.m[k] + 0.1 * g;
    p.v[k] = 0.999 * p.v[k] + 0.001 * g * g;
    p.value[k] -= rate * (p.m[k] / c1) / (std::sqrt(p.v[k] / c2) + 1e-8);
    p.grad[k] = 0.0;
  }
}

}  // namespace

void refit_batchnorm(ModelGraph& model, std::span<const dsp::FeatureMatrix> features) {
  require(!features.empty(), ErrorCode::kInvalidInput, "batchnorm fit set is empty");
  engine::InferenceTrace trace;
  for (std::size_t li = 1; li < model.layers.size(); ++li) {
    auto& layer = model.layers[li];
    if (layer.kind != LayerKind::kMulAdd || !layer.batchnorm) continue;
    const std::size_t channels = layer.input_shape.back();
    std::vector<double> sum(channels, 0.0), sum_sq(channels, 0.0);
    std::size_t count = 0;
    for (const auto& f : features) {
      engine::run_inference_traced(model, engine::make_input(model, f), trace);
      const auto data = trace.outputs[li - 1].real_data();
      for (std::size_t i = 0; i < data.size(); ++i) {
        sum[i % channels] += data[i];
        sum_sq[i % channels] += static_cast<double>(data[i]) * data[i];
      }
      count += data.size() / channels;
    }
    std::vector<float> mean(channels), var(channels);
    for (std::size_t ch = 0; ch < channels; ++ch) {
      const double m = sum[ch] / static_cast<double>(count);
      mean[ch] = static_cast<float>(m);
      var[ch] = static_cast<float>(std::max(sum_sq[ch] / static_cast<double>(count) - m * m, 1e-6));
    }
    layer.batchnorm->mean = Tensor::real({channels}, std::move(mean));
    layer.batchnorm->variance = Tensor::real({channels}, std::move(var));
  }
}

void train_float_model(ModelGraph& model, std::span<const dsp::FeatureMatrix> features,
                       std::span<const int> labels, const TrainOptions& options,
                       const std::function<void(const EpochLog&)>& on_epoch) {
  require(!features.empty() && features.size() == labels.size(), ErrorCode::kInvalidInput,
          "training set is empty or unlabeled");
  require(!model.layers.empty() && model.layers.back().kind == LayerKind::kLogistic,
          ErrorCode::kContract, "trainer needs a logistic output");
  std::mt19937_64 rng(options.seed);
  std::vector<std::size_t> order(features.size());
  std::iota(order.begin(), order.end(), 0);
  int t = 0;
  Cache cache;
  refit_batchnorm(model, features);
  auto slots = load_slots(model);
  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += options.batch) {
      const std::size_t end = std::min(order.size(), start + options.batch);
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t idx = order[k];
        forward(model, slots, features[idx], cache);
        const double p = cache.post.back()[0];
        const int y = labels[idx];
        loss -= y ? std::log(std::max(p, 1e-12)) : std::log(std::max(1.0 - p, 1e-12));
        correct += (p >= 0.5) == (y == 1);
        backward(model, slots, cache, p - y);
      }
      ++t;
      const double scale = 1.0 / static_cast<double>(end - start);
      for (std::size_t li = 0; li < slots.size(); ++li) {
        if (!trainable(model.layers[li])) continue;
        adam_step(slots[li].a, options.rate, options.weight_decay, scale, t);
        adam_step(slots[li].b, options.rate, 0.0, scale, t);
      }
    }
    store_slots(model, slots);
    if (on_epoch) {
      on_epoch({epoch, loss / static_cast<double>(order.size()),
                static_cast<double>(correct) / static_cast<double>(order.size())});
    }
  }
  model.validate();
}

}  // namespace kws::testing
