// Copyright 2026 The Hanforge Authors.
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

#include "hanforge/encoder.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "hanforge/error.hpp"

namespace hanforge {

namespace {

constexpr double kNormEpsilon = 1e-5;
constexpr double kEmbeddingStddev = 0.5;

Matrix ones_row(int n) { return Matrix::Ones(1, n); }
Matrix zeros_row(int n) { return Matrix::Zero(1, n); }

Matrix add_bias(const Matrix& x, const Matrix& bias) {
  return x.rowwise() + bias.row(0);
}

Matrix layer_norm(const Matrix& x, const LayerNormParams& p, EncoderCache::Norm& cache) {
  const Eigen::Index n = x.rows();
  const double d = static_cast<double>(x.cols());
  cache.normalized.resize(n, x.cols());
  cache.inv_std.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mean = x.row(i).sum() / d;
    const auto centered = x.row(i).array() - mean;
    const double var = centered.square().sum() / d;
    const double inv = 1.0 / std::sqrt(var + kNormEpsilon);
    cache.inv_std[i] = inv;
    cache.normalized.row(i) = centered * inv;
  }
  Matrix y = cache.normalized.array().rowwise() * p.gain.row(0).array();
  return add_bias(y, p.bias);
}

Matrix layer_norm_backward(const Matrix& dy, const LayerNormParams& p,
                           const EncoderCache::Norm& cache, LayerNormParams* grads) {
  if (grads) {
    grads->gain += (dy.array() * cache.normalized.array()).colwise().sum().matrix();
    grads->bias += dy.colwise().sum();
  }
  const double d = static_cast<double>(dy.cols());
  Matrix dxhat = dy.array().rowwise() * p.gain.row(0).array();
  Matrix dx(dy.rows(), dy.cols());
  for (Eigen::Index i = 0; i < dy.rows(); ++i) {
    const double sum = dxhat.row(i).sum();
    const double dot = dxhat.row(i).dot(cache.normalized.row(i));
    dx.row(i) = (cache.inv_std[i] / d) *
                (d * dxhat.row(i).array() - sum - cache.normalized.row(i).array() * dot);
  }
  return dx;
}

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * std::numbers::sqrt2 / 2.0)); }

double gelu_grad(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x * std::numbers::sqrt2 / 2.0));
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return cdf + x * pdf;
}

Matrix layer_forward(const EncoderLayer& layer, const EncoderConfig& config, const Matrix& x,
                     std::span<const std::uint8_t> key_mask, EncoderCache::Layer& c) {
  const Eigen::Index n = x.rows();
  const int heads = config.num_heads;
  const int dh = config.hidden / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  c.h1 = layer_norm(x, layer.ln1, c.ln1);
  c.q = add_bias(c.h1 * layer.wq, layer.bq);
  c.k = add_bias(c.h1 * layer.wk, layer.bk);
  c.v = add_bias(c.h1 * layer.wv, layer.bv);
  c.context.resize(n, config.hidden);
  c.attention.resize(heads);
  for (int h = 0; h < heads; ++h) {
    Matrix scores = c.q.middleCols(h * dh, dh) * c.k.middleCols(h * dh, dh).transpose() * scale;
    Matrix& a = c.attention[h];
    a.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double mx = -std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < n; ++j) {
        if (key_mask[j]) mx = std::max(mx, scores(i, j));
      }
      double sum = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double e = key_mask[j] ? std::exp(scores(i, j) - mx) : 0.0;
        a(i, j) = e;
        sum += e;
      }
      a.row(i) /= sum;
    }
    c.context.middleCols(h * dh, dh) = a * c.v.middleCols(h * dh, dh);
  }
  Matrix mid = x + add_bias(c.context * layer.wo, layer.bo);

  c.h2 = layer_norm(mid, layer.ln2, c.ln2);
  c.pre_act = add_bias(c.h2 * layer.w1, layer.b1);
  c.act = c.pre_act.unaryExpr([](double v) { return gelu(v); });
  return mid + add_bias(c.act * layer.w2, layer.b2);
}

// Returns dLoss/dx for the block input.
Matrix layer_backward(const EncoderLayer& layer, const EncoderConfig& config,
                      const EncoderCache::Layer& c, const Matrix& dy, EncoderLayer* g) {
  const int heads = config.num_heads;
  const int dh = config.hidden / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  // Feed-forward branch.
  Matrix dact = dy * layer.w2.transpose();
  Matrix dpre = dact.array() * c.pre_act.unaryExpr([](double v) { return gelu_grad(v); }).array();
  if (g) {
    g->w2 += c.act.transpose() * dy;
    g->b2 += dy.colwise().sum();
    g->w1 += c.h2.transpose() * dpre;
    g->b1 += dpre.colwise().sum();
  }
  Matrix dh2 = dpre * layer.w1.transpose();
  Matrix dmid = dy + layer_norm_backward(dh2, layer.ln2, c.ln2, g ? &g->ln2 : nullptr);

  // Attention branch.
  if (g) {
    g->wo += c.context.transpose() * dmid;
    g->bo += dmid.colwise().sum();
  }
  Matrix dctx = dmid * layer.wo.transpose();
  Matrix dq(c.q.rows(), c.q.cols());
  Matrix dk(c.k.rows(), c.k.cols());
  Matrix dv(c.v.rows(), c.v.cols());
  for (int h = 0; h < heads; ++h) {
    const Matrix& a = c.attention[h];
    const auto dctx_h = dctx.middleCols(h * dh, dh);
    Matrix da = dctx_h * c.v.middleCols(h * dh, dh).transpose();
    dv.middleCols(h * dh, dh) = a.transpose() * dctx_h;
    Eigen::VectorXd row_dot = (da.array() * a.array()).rowwise().sum();
    Matrix ds = (a.array() * (da.colwise() - row_dot).array()).matrix() * scale;
    dq.middleCols(h * dh, dh) = ds * c.k.middleCols(h * dh, dh);
    dk.middleCols(h * dh, dh) = ds.transpose() * c.q.middleCols(h * dh, dh);
  }
  if (g) {
    g->wq += c.h1.transpose() * dq;
    g->bq += dq.colwise().sum();
    g->wk += c.h1.transpose() * dk;
    g->bk += dk.colwise().sum();
    g->wv += c.h1.transpose() * dv;
    g->bv += dv.colwise().sum();
  }
  Matrix dh1 = dq * layer.wq.transpose() + dk * layer.wk.transpose() + dv * layer.wv.transpose();
  return dmid + layer_norm_backward(dh1, layer.ln1, c.ln1, g ? &g->ln1 : nullptr);
}

std::vector<const EncoderLayer*> all_layers(const EncoderParams& params) {
  std::vector<const EncoderLayer*> out;
  for (const auto& l : params.layers) out.push_back(&l);
  return out;
}

}  // namespace

void EncoderConfig::validate() const {
  if (num_layers < 1) throw Error(ErrorCode::kConfigError, "num_layers must be >= 1");
  if (hidden < 1 || num_heads < 1 || hidden % num_heads != 0) {
    throw Error(ErrorCode::kConfigError, "hidden size must be divisible by num_heads");
  }
  if (ffn < 1 || max_len < 2 || vocab_size < 3) {
    throw Error(ErrorCode::kConfigError, "bad encoder dimensions");
  }
}

EncoderLayer EncoderLayer::init(const EncoderConfig& config, Rng& rng) {
  const int d = config.hidden;
  const double sd = 1.0 / std::sqrt(static_cast<double>(d));
  const double sd_ffn = 1.0 / std::sqrt(static_cast<double>(config.ffn));
  EncoderLayer l;
  l.wq = random_normal(d, d, sd, rng);
  l.bq = zeros_row(d);
  l.wk = random_normal(d, d, sd, rng);
  l.bk = zeros_row(d);
  l.wv = random_normal(d, d, sd, rng);
  l.bv = zeros_row(d);
  l.wo = random_normal(d, d, sd, rng);
  l.bo = zeros_row(d);
  l.ln1 = {ones_row(d), zeros_row(d)};
  l.ln2 = {ones_row(d), zeros_row(d)};
  l.w1 = random_normal(d, config.ffn, sd, rng);
  l.b1 = zeros_row(config.ffn);
  l.w2 = random_normal(config.ffn, d, sd_ffn, rng);
  l.b2 = zeros_row(d);
  return l;
}

EncoderLayer EncoderLayer::zeros_like() const {
  EncoderLayer z = *this;
  visit(z, "", [](const std::string&, Matrix& m) { m.setZero(); });
  return z;
}

EncoderParams EncoderParams::init(const EncoderConfig& config, Rng& rng) {
  config.validate();
  EncoderParams p;
  p.config = config;
  p.token_embedding = random_normal(config.vocab_size, config.hidden, kEmbeddingStddev, rng);
  p.position_embedding = random_normal(config.max_len, config.hidden, kEmbeddingStddev, rng);
  for (int i = 0; i < config.num_layers; ++i) p.layers.push_back(EncoderLayer::init(config, rng));
  p.final_ln = {ones_row(config.hidden), zeros_row(config.hidden)};
  return p;
}

EncoderParams EncoderParams::zeros_like() const {
  EncoderParams z = *this;
  visit(z, "", [](const std::string&, Matrix& m) { m.setZero(); });
  return z;
}

Matrix encoder_forward(const EncoderParams& params, int tag_id, std::span<const int> char_ids,
                       std::span<const std::uint8_t> mask, EncoderCache* cache) {
  auto layers = all_layers(params);
  return encoder_forward(params, layers, tag_id, char_ids, mask, cache);
}

Matrix encoder_forward(const EncoderParams& shell, std::span<const EncoderLayer* const> layers,
                       int tag_id, std::span<const int> char_ids,
                       std::span<const std::uint8_t> mask, EncoderCache* cache) {
  const EncoderConfig& config = shell.config;
  const Eigen::Index n = static_cast<Eigen::Index>(char_ids.size()) + 1;
  if (n > config.max_len) {
    throw Error(ErrorCode::kLengthExceeded, std::to_string(char_ids.size()) +
                                                " characters exceed encoder max_len " +
                                                std::to_string(config.max_len));
  }
  if (!mask.empty() && mask.size() != char_ids.size()) {
    throw Error(ErrorCode::kSpanMismatch, "mask length differs from input length");
  }
  EncoderCache local;
  EncoderCache& c = cache ? *cache : local;
  c.ids.assign(1, tag_id);
  c.ids.insert(c.ids.end(), char_ids.begin(), char_ids.end());
  c.key_mask.assign(n, 1);
  for (std::size_t i = 0; i < mask.size(); ++i) c.key_mask[i + 1] = mask[i] ? 1 : 0;
  for (int id : c.ids) {
    if (id < 0 || id >= shell.token_embedding.rows()) {
      throw Error(ErrorCode::kLabelOutOfRange, "token id " + std::to_string(id) + " out of range");
    }
  }

  Matrix x(n, config.hidden);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) = shell.token_embedding.row(c.ids[i]) + shell.position_embedding.row(i);
  }
  c.layers.resize(layers.size());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    x = layer_forward(*layers[l], config, x, c.key_mask, c.layers[l]);
  }
  return layer_norm(x, shell.final_ln, c.final_norm);
}

void encoder_backward(const EncoderParams& params, const EncoderCache& cache,
                      const Matrix& upstream, EncoderParams& grads) {
  auto layers = all_layers(params);
  std::vector<EncoderLayer*> layer_grads;
  for (auto& l : grads.layers) layer_grads.push_back(&l);
  encoder_backward(params, layers, cache, upstream, grads, layer_grads);
}

void encoder_backward(const EncoderParams& shell, std::span<const EncoderLayer* const> layers,
                      const EncoderCache& cache, const Matrix& upstream,
                      EncoderParams& shell_grads, std::span<EncoderLayer* const> layer_grads) {
  if (layer_grads.size() != layers.size() || cache.layers.size() != layers.size()) {
    throw Error(ErrorCode::kBindingMismatch, "layer stack and gradient stack differ");
  }
  Matrix dy = upstream;
  for (Eigen::Index i = 0; i < dy.rows(); ++i) {
    if (!cache.key_mask[i]) dy.row(i).setZero();
  }
  Matrix dx = layer_norm_backward(dy, shell.final_ln, cache.final_norm, &shell_grads.final_ln);
  for (std::size_t l = layers.size(); l-- > 0;) {
    dx = layer_backward(*layers[l], shell.config, cache.layers[l], dx, layer_grads[l]);
  }
  for (Eigen::Index i = 0; i < dx.rows(); ++i) {
    if (!cache.key_mask[i]) continue;
    shell_grads.token_embedding.row(cache.ids[i]) += dx.row(i);
    shell_grads.position_embedding.row(i) += dx.row(i);
  }
}

EncoderParams prune_layers(const EncoderParams& params, int k) {
  if (k < 1 || k > static_cast<int>(params.layers.size())) {
    throw Error(ErrorCode::kBadLayerCount, "cannot keep " + std::to_string(k) + " of " +
                                               std::to_string(params.layers.size()) + " layers");
  }
  EncoderParams out;
  out.config = params.config;
  out.config.num_layers = k;
  out.token_embedding = params.token_embedding;
  out.position_embedding = params.position_embedding;
  out.layers.assign(params.layers.begin(), params.layers.begin() + k);
  out.final_ln = params.final_ln;
  return out;
}

}  // namespace hanforge
