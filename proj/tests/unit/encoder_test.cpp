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

#include <vector>

#include <gtest/gtest.h>

#include "hanforge/encoder.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace hanforge {
namespace {

EncoderConfig small_config(int layers = 2, int d = 8) {
  EncoderConfig c;
  c.num_layers = layers;
  c.hidden = d;
  c.num_heads = 2;
  c.ffn = 2 * d;
  c.max_len = 16;
  c.vocab_size = 12;
  return c;
}

// Randomizes every tensor, including the ones initialized to constants, so
// gradient checks exercise all paths.
EncoderParams random_params(const EncoderConfig& c, Rng& rng) {
  EncoderParams p = EncoderParams::init(c, rng);
  EncoderParams::visit(p, "", [&](const std::string&, Matrix& m) {
    m = random_normal(m.rows(), m.cols(), 0.5, rng);
  });
  return p;
}

TEST(Encoder, ShapesAndEmptySentence) {
  Rng rng(1);
  const auto p = EncoderParams::init(small_config(), rng);
  const std::vector<int> ids = {4, 5, 6};
  EXPECT_EQ(encoder_forward(p, 2, ids).rows(), 4);
  EXPECT_EQ(encoder_forward(p, 2, ids).cols(), 8);
  const Matrix tag_only = encoder_forward(p, 2, std::vector<int>{});
  EXPECT_EQ(tag_only.rows(), 1);
  EXPECT_EQ(tag_only.cols(), 8);
}

TEST(Encoder, LengthExceeded) {
  Rng rng(1);
  const auto p = EncoderParams::init(small_config(), rng);
  EXPECT_NO_THROW(encoder_forward(p, 2, std::vector<int>(15, 4)));
  EXPECT_THROW_CODE(encoder_forward(p, 2, std::vector<int>(16, 4)), ErrorCode::kLengthExceeded);
}

TEST(Encoder, ConfigValidation) {
  auto c = small_config();
  c.num_heads = 3;
  EXPECT_THROW_CODE(c.validate(), ErrorCode::kConfigError);
}

TEST(Encoder, AttentionRowsSumToOne) {
  Rng rng(2);
  const auto p = random_params(small_config(), rng);
  EncoderCache cache;
  const std::vector<int> ids = {4, 5, 6, 7};
  const std::vector<std::uint8_t> mask = {1, 1, 1, 0};
  encoder_forward(p, 2, ids, mask, &cache);
  for (const auto& layer : cache.layers) {
    for (const auto& a : layer.attention) {
      for (Eigen::Index r = 0; r < a.rows(); ++r) EXPECT_NEAR(a.row(r).sum(), 1.0, 1e-12);
      EXPECT_EQ(a.col(4).cwiseAbs().maxCoeff(), 0.0);  // padded key
    }
  }
}

TEST(Encoder, PaddingAndBatchOrderDoNotChangeOutputs) {
  Rng rng(3);
  const auto p = random_params(small_config(), rng);
  const std::vector<int> a = {4, 5, 6};
  const std::vector<int> b = {7, 8, 9, 10, 11};
  // Sentence a padded to b's length, as it would sit in either batch order.
  const std::vector<int> a_padded = {4, 5, 6, 0, 0};
  const std::vector<std::uint8_t> a_mask = {1, 1, 1, 0, 0};
  const Matrix alone = encoder_forward(p, 2, a);
  const Matrix padded = encoder_forward(p, 2, a_padded, a_mask);
  EXPECT_LT((padded.topRows(4) - alone).cwiseAbs().maxCoeff(), 1e-6);
  const Matrix b1 = encoder_forward(p, 2, b);
  const Matrix b2 = encoder_forward(p, 2, b, std::vector<std::uint8_t>(5, 1));
  EXPECT_LT((b1 - b2).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Encoder, PruneLayers) {
  Rng rng(4);
  const auto c = small_config(4);
  const auto p = random_params(c, rng);
  const std::vector<int> ids = {4, 5};
  EXPECT_EQ(encoder_forward(prune_layers(p, 4), 2, ids), encoder_forward(p, 2, ids));
  const auto half = prune_layers(p, 2);
  EXPECT_EQ(half.layers.size(), 2u);
  EXPECT_EQ(half.config.num_layers, 2);
  EXPECT_EQ(half.layers[1].wq, p.layers[1].wq);
  EXPECT_EQ(half.token_embedding, p.token_embedding);
  EXPECT_THROW_CODE(prune_layers(p, 0), ErrorCode::kBadLayerCount);
  EXPECT_THROW_CODE(prune_layers(p, 5), ErrorCode::kBadLayerCount);
}

TEST(Encoder, StoredValuesAreFloat32) {
  Rng rng(5);
  const auto p = EncoderParams::init(small_config(), rng);
  EncoderParams::visit(p, "", [](const std::string& name, const Matrix& m) {
    Matrix r = m;
    round_to_storage(r);
    EXPECT_EQ(r, m) << name;
  });
}

TEST(Encoder, ZeroUpstreamGivesZeroGradients) {
  Rng rng(6);
  const auto p = random_params(small_config(), rng);
  EncoderCache cache;
  const std::vector<int> ids = {4, 5, 6};
  const Matrix out = encoder_forward(p, 2, ids, {}, &cache);
  EncoderParams g = p.zeros_like();
  encoder_backward(p, cache, Matrix::Zero(out.rows(), out.cols()), g);
  EncoderParams::visit(g, "", [](const std::string& name, const Matrix& m) {
    EXPECT_EQ(m.cwiseAbs().maxCoeff(), 0.0) << name;
  });
}

TEST(Encoder, MaskedEmbeddingRowsGetNoGradient) {
  Rng rng(7);
  const auto p = random_params(small_config(), rng);
  const std::vector<int> ids = {4, 5, 11, 11};
  const std::vector<std::uint8_t> mask = {1, 1, 0, 0};
  EncoderCache cache;
  const Matrix out = encoder_forward(p, 2, ids, mask, &cache);
  EncoderParams g = p.zeros_like();
  encoder_backward(p, cache, random_normal(out.rows(), out.cols(), 1.0, rng), g);
  EXPECT_EQ(g.token_embedding.row(11).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(g.position_embedding.row(3).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(g.position_embedding.row(4).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(g.token_embedding.row(4).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Encoder, BackwardMatchesFiniteDifferences) {
  Rng rng(8);
  auto p = random_params(small_config(2, 8), rng);
  const std::vector<int> ids = {4, 5, 6, 4};
  const std::vector<std::uint8_t> mask = {1, 1, 1, 0};
  Matrix weights = random_normal(5, 8, 1.0, rng);
  weights.row(4).setZero();  // padded outputs are outside the loss
  auto loss = [&] {
    return (encoder_forward(p, 3, ids, mask).array() * weights.array()).sum();
  };
  EncoderCache cache;
  encoder_forward(p, 3, ids, mask, &cache);
  EncoderParams g = p.zeros_like();
  encoder_backward(p, cache, weights, g);
  std::vector<Matrix*> params, grads;
  std::vector<std::string> names;
  EncoderParams::visit(p, "", [&](const std::string& n, Matrix& m) {
    params.push_back(&m);
    names.push_back(n);
  });
  EncoderParams::visit(g, "", [&](const std::string&, Matrix& m) { grads.push_back(&m); });
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Matrix numeric = testing::numeric_gradient(*params[i], loss);
    EXPECT_LT(testing::relative_error(*grads[i], numeric), 1e-4) << names[i];
  }
}

TEST(Encoder, FrozenStackBlocksGetNoGradient) {
  Rng rng(9);
  const auto p = random_params(small_config(2), rng);
  const std::vector<const EncoderLayer*> stack = {&p.layers[0], &p.layers[1]};
  const std::vector<int> ids = {4, 5};
  EncoderCache cache;
  const Matrix out = encoder_forward(p, stack, 2, ids, {}, &cache);
  EXPECT_EQ(out, encoder_forward(p, 2, ids));
  EncoderParams shell = p.zeros_like();
  EncoderLayer l1 = p.layers[1].zeros_like();
  const std::vector<EncoderLayer*> layer_grads = {nullptr, &l1};
  encoder_backward(p, stack, cache, random_normal(3, 8, 1.0, rng), shell, layer_grads);
  EXPECT_GT(l1.w1.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(shell.token_embedding.cwiseAbs().maxCoeff(), 0.0);

  // Same upstream through the model's own backward gives the same block-1
  // and embedding gradients.
  EncoderCache c2;
  encoder_forward(p, 2, ids, {}, &c2);
  Rng again(9);
  random_params(small_config(2), again);
  EncoderParams full = p.zeros_like();
  encoder_backward(p, c2, random_normal(3, 8, 1.0, again), full);
  EXPECT_LT((full.layers[1].w1 - l1.w1).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((full.token_embedding - shell.token_embedding).cwiseAbs().maxCoeff(), 1e-12);
}

}  // namespace
}  // namespace hanforge
