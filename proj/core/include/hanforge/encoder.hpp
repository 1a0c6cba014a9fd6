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

#ifndef HANFORGE_ENCODER_HPP_
#define HANFORGE_ENCODER_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hanforge/tensor.hpp"

namespace hanforge {

struct EncoderConfig {
  int num_layers = 4;
  int hidden = 128;
  int num_heads = 4;
  int ffn = 256;
  int max_len = 256;
  int vocab_size = 0;

  // Throws ConfigError.
  void validate() const;
  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

struct LayerNormParams {
  Matrix gain;  // 1 x d
  Matrix bias;  // 1 x d

  template <class Self, class F>
  static void visit(Self& self, const std::string& prefix, F&& f) {
    f(prefix + "gain", self.gain);
    f(prefix + "bias", self.bias);
  }
};

// One pre-norm transformer block:
//   x' = x + Attn(LN1(x)),  y = x' + FFN(LN2(x')).
struct EncoderLayer {
  Matrix wq, bq, wk, bk, wv, bv, wo, bo;
  LayerNormParams ln1, ln2;
  Matrix w1, b1, w2, b2;

  static EncoderLayer init(const EncoderConfig& config, Rng& rng);
  EncoderLayer zeros_like() const;

  template <class Self, class F>
  static void visit(Self& self, const std::string& prefix, F&& f) {
    f(prefix + "attn.wq", self.wq);
    f(prefix + "attn.bq", self.bq);
    f(prefix + "attn.wk", self.wk);
    f(prefix + "attn.bk", self.bk);
    f(prefix + "attn.wv", self.wv);
    f(prefix + "attn.bv", self.bv);
    f(prefix + "attn.wo", self.wo);
    f(prefix + "attn.bo", self.bo);
    LayerNormParams::visit(self.ln1, prefix + "ln1.", f);
    LayerNormParams::visit(self.ln2, prefix + "ln2.", f);
    f(prefix + "ffn.w1", self.w1);
    f(prefix + "ffn.b1", self.b1);
    f(prefix + "ffn.w2", self.w2);
    f(prefix + "ffn.b2", self.b2);
  }
};

struct EncoderParams {
  EncoderConfig config;
  Matrix token_embedding;     // vocab_size x d; corpus tags are ordinary rows
  Matrix position_embedding;  // max_len x d
  std::vector<EncoderLayer> layers;
  LayerNormParams final_ln;

  static EncoderParams init(const EncoderConfig& config, Rng& rng);
  EncoderParams zeros_like() const;

  template <class Self, class F>
  static void visit(Self& self, const std::string& prefix, F&& f) {
    f(prefix + "token_embedding", self.token_embedding);
    f(prefix + "position_embedding", self.position_embedding);
    for (std::size_t i = 0; i < self.layers.size(); ++i) {
      EncoderLayer::visit(self.layers[i], prefix + "layer" + std::to_string(i) + ".", f);
    }
    LayerNormParams::visit(self.final_ln, prefix + "final_ln.", f);
  }
};

// Activations kept by a forward pass for the matching backward pass.
struct EncoderCache {
  struct Norm {
    Matrix normalized;  // x-hat
    Eigen::VectorXd inv_std;
  };
  struct Layer {
    Norm ln1, ln2;
    Matrix h1, q, k, v;
    std::vector<Matrix> attention;  // one (N x N) matrix per head
    Matrix context, h2, pre_act, act;
  };
  std::vector<int> ids;  // tag id followed by character ids
  std::vector<std::uint8_t> key_mask;
  std::vector<Layer> layers;
  Norm final_norm;
};

// Runs the encoder over [tag, chars...]. mask[i] == 0 marks char i as padding;
// an empty mask means no padding. Returns a (T+1) x d matrix whose row 0 is
// the tag slot. Throws LengthExceeded when T+1 > max_len.
Matrix encoder_forward(const EncoderParams& params, int tag_id, std::span<const int> char_ids,
                       std::span<const std::uint8_t> mask = {}, EncoderCache* cache = nullptr);

// Same, but running an explicit sequence of blocks between the embeddings and
// the final norm taken from `shell`.
Matrix encoder_forward(const EncoderParams& shell, std::span<const EncoderLayer* const> layers,
                       int tag_id, std::span<const int> char_ids,
                       std::span<const std::uint8_t> mask, EncoderCache* cache);

// Accumulates parameter gradients for `upstream` = dLoss/dOutput. Rows of
// padding positions in `upstream` are ignored.
void encoder_backward(const EncoderParams& params, const EncoderCache& cache,
                      const Matrix& upstream, EncoderParams& grads);

// Explicit-stack variant. layer_grads[i] == nullptr freezes block i: gradients
// still flow through it to earlier blocks but its parameters receive none.
// Embedding and final-norm gradients go to `shell_grads`.
void encoder_backward(const EncoderParams& shell, std::span<const EncoderLayer* const> layers,
                      const EncoderCache& cache, const Matrix& upstream,
                      EncoderParams& shell_grads, std::span<EncoderLayer* const> layer_grads);

// Keeps the first k blocks. Throws BadLayerCount unless 1 <= k <= num_layers.
EncoderParams prune_layers(const EncoderParams& params, int k);

}  // namespace hanforge

#endif  // HANFORGE_ENCODER_HPP_
