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

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "hanforge/biaffine.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace hanforge {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Arc matrix with the same masking as score_arcs.
Matrix random_arcs(int n, Rng& rng, double sd = 1.0) {
  Matrix a = random_normal(n + 1, n + 1, sd, rng);
  a.row(0).setConstant(-kInf);
  a.diagonal().setConstant(-kInf);
  return a;
}

BiaffineParams random_params(int d, int pos, int rels, Rng& rng) {
  BiaffineConfig cfg{6, 4};
  BiaffineParams p = BiaffineParams::init(d, cfg, pos, rels, rng);
  BiaffineParams::visit(p, "", [&](const std::string&, Matrix& m) {
    m = random_normal(m.rows(), m.cols(), 0.5, rng);
  });
  return p;
}

TEST(Biaffine, PoolTokensMean) {
  Matrix chars(2, 2);
  chars << 1, 2, 3, 4;
  const Segmentation seg(std::vector<std::string>{"a", "b"}, {{0, 2}});
  const Matrix root = Matrix::Constant(1, 2, 9.0);
  const Matrix t = pool_tokens(chars, seg, root);
  ASSERT_EQ(t.rows(), 2);
  EXPECT_EQ(t.row(0), root);
  EXPECT_DOUBLE_EQ(t(1, 0), 2.0);
  EXPECT_DOUBLE_EQ(t(1, 1), 3.0);

  const Segmentation singles(std::vector<std::string>{"a", "b"}, {{0, 1}, {1, 2}});
  EXPECT_EQ(pool_tokens(chars, singles, root).bottomRows(2), chars);
}

TEST(Biaffine, PoolTokensRandomOracle) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const int T = 1 + static_cast<int>(rng() % 10);
    const Matrix chars = random_normal(T, 3, 1.0, rng);
    std::vector<Span> spans;
    for (std::size_t b = 0; b < static_cast<std::size_t>(T);) {
      const std::size_t e = std::min<std::size_t>(T, b + 1 + rng() % 3);
      spans.push_back({b, e});
      b = e;
    }
    const Segmentation seg(std::vector<std::string>(T, "x"), spans);
    const Matrix t = pool_tokens(chars, seg, Matrix::Zero(1, 3));
    for (std::size_t i = 0; i < spans.size(); ++i) {
      Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(3);
      for (std::size_t c = spans[i].begin; c < spans[i].end; ++c) mean += chars.row(c);
      mean /= static_cast<double>(spans[i].size());
      ASSERT_LT((t.row(i + 1) - mean).cwiseAbs().maxCoeff(), 1e-7);
    }
  }
}

TEST(Biaffine, AddPos) {
  Rng rng(2);
  const Matrix tokens = random_normal(3, 4, 1.0, rng);
  const std::vector<int> ids = {1, 0};
  EXPECT_EQ(add_pos(tokens, ids, Matrix::Zero(2, 4)), tokens);
  const Matrix table = random_normal(2, 4, 1.0, rng);
  const Matrix out = add_pos(tokens, ids, table);
  EXPECT_EQ(out.row(0), tokens.row(0));
  EXPECT_EQ(out.row(1), tokens.row(1) + table.row(1));
  EXPECT_EQ(out.row(2), tokens.row(2) + table.row(0));
  EXPECT_THROW_CODE(add_pos(tokens, std::vector<int>{0, 2}, table), ErrorCode::kUnknownPosLabel);
  EXPECT_THROW_CODE(add_pos(tokens, std::vector<int>{0, -1}, table), ErrorCode::kUnknownPosLabel);
}

TEST(Biaffine, ArcScoresMaskAndFiniteness) {
  Rng rng(3);
  const auto p = random_params(5, 2, 3, rng);
  const Matrix tokens = random_normal(4, 5, 1.0, rng);
  const Matrix arc = score_arcs(p, tokens);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i == 0 || i == j) {
        EXPECT_EQ(arc(i, j), -kInf);
      } else {
        EXPECT_TRUE(std::isfinite(arc(i, j)));
      }
    }
  }
  const Matrix labels = score_labels(p, tokens, std::vector<int>{0, 1, 2});
  EXPECT_EQ(labels.rows(), 3);
  EXPECT_EQ(labels.cols(), 3);
  EXPECT_TRUE(labels.allFinite());
}

TEST(Biaffine, SingleTokenHeadIsRoot) {
  Rng rng(4);
  const auto p = random_params(5, 2, 3, rng);
  const ParseScores s = score_parse(p, random_normal(2, 5, 1.0, rng));
  const DecodedTree t = decode_tree(s.arc, s.labels);
  EXPECT_EQ(t.heads, std::vector<int>{0});
}

TEST(Biaffine, Bilinearity) {
  Rng rng(5);
  const Matrix dep = random_normal(4, 3, 1.0, rng);
  const Matrix head = random_normal(4, 3, 1.0, rng);
  Matrix w = random_normal(4, 3, 1.0, rng);
  w.row(3).setZero();  // drop the head-prior row so only the bilinear term remains
  EXPECT_LT((biaffine_arc(2.0 * dep, head, w) - 2.0 * biaffine_arc(dep, head, w))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(Biaffine, LabelScoresAtGivenHeads) {
  Rng rng(6);
  const auto p = random_params(5, 2, 3, rng);
  const Matrix tokens = random_normal(4, 5, 1.0, rng);
  const std::vector<int> heads = {2, 0, 2};
  const ParseScores s = score_parse(p, tokens);
  const Matrix direct = score_labels(p, tokens, heads);
  for (int i = 0; i < 3; ++i) {
    for (int r = 0; r < 3; ++r) EXPECT_NEAR(direct(i, r), s.labels[r](i + 1, heads[i]), 1e-12);
  }
}

TEST(Biaffine, DecodeMatchesBruteForce) {
  Rng rng(7);
  for (int trial = 0; trial < 3000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const Matrix arc = random_arcs(n, rng, 2.0);
    double brute_score = 0.0;
    const auto brute = testing::brute_tree(arc, &brute_score);
    const DecodedTree t = decode_tree(arc, {});
    ASSERT_EQ(t.heads, brute) << arc;
    ASSERT_NEAR(t.score, brute_score, 1e-9);
  }
}

TEST(Biaffine, TwoCycleIsContracted) {
  // Greedy heads: 1 <- 2 and 2 <- 1, a cycle.
  Matrix arc = Matrix::Constant(3, 3, -kInf);
  arc(1, 0) = 1.0;
  arc(1, 2) = 10.0;
  arc(2, 0) = 2.0;
  arc(2, 1) = 10.0;
  const DecodedTree t = decode_tree(arc, {});
  EXPECT_TRUE(is_single_root_tree(t.heads));
  EXPECT_EQ(t.heads, (std::vector<int>{2, 0}));
  EXPECT_DOUBLE_EQ(t.score, 12.0);
}

TEST(Biaffine, DominantTree) {
  const std::vector<int> gold = {3, 3, 0, 5, 3};
  Matrix arc = Matrix::Zero(6, 6);
  arc.row(0).setConstant(-kInf);
  arc.diagonal().setConstant(-kInf);
  for (int i = 0; i < 5; ++i) arc(i + 1, gold[i]) = 50.0;
  EXPECT_EQ(decode_tree(arc, {}).heads, gold);
}

TEST(Biaffine, SingleRootEnforced) {
  // Both tokens strongly prefer ROOT.
  Matrix arc = Matrix::Constant(3, 3, -kInf);
  arc(1, 0) = 10.0;
  arc(2, 0) = 9.0;
  arc(1, 2) = 0.0;
  arc(2, 1) = 1.0;
  const auto unconstrained = chu_liu_edmonds(arc);
  EXPECT_EQ(unconstrained[1], 0);
  EXPECT_EQ(unconstrained[2], 0);
  EXPECT_EQ(decode_tree(arc, {}).heads, (std::vector<int>{0, 1}));
}

TEST(Biaffine, TreeInvariantsOnLargerInputs) {
  Rng rng(8);
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 12);
    const Matrix arc = random_arcs(n, rng, 3.0);
    std::vector<Matrix> labels = {random_normal(n + 1, n + 1, 1.0, rng),
                                  random_normal(n + 1, n + 1, 1.0, rng)};
    const DecodedTree t = decode_tree(arc, labels);
    ASSERT_EQ(t.heads.size(), static_cast<std::size_t>(n));
    ASSERT_TRUE(is_single_root_tree(t.heads));
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      s += arc(i + 1, t.heads[i]);
      const int r = t.rels[i];
      ASSERT_GE(labels[r](i + 1, t.heads[i]), labels[1 - r](i + 1, t.heads[i]));
    }
    ASSERT_NEAR(s, t.score, 1e-9);
  }
}

TEST(Biaffine, LossLimits) {
  const int n = 4;
  const std::vector<int> heads = {2, 0, 2, 3}, rels = {1, 0, 2, 1};
  ParseScores uniform;
  uniform.arc = Matrix::Zero(n + 1, n + 1);
  uniform.arc.row(0).setConstant(-kInf);
  uniform.arc.diagonal().setConstant(-kInf);
  uniform.labels.assign(3, Matrix::Zero(n + 1, n + 1));
  // Each dependent chooses among n heads (itself excluded) and 3 relations.
  EXPECT_NEAR(parse_loss(uniform, heads, rels), n * std::log(n) + n * std::log(3.0), 1e-12);

  ParseScores peaked = uniform;
  for (int i = 0; i < n; ++i) {
    peaked.arc(i + 1, heads[i]) = 100.0;
    peaked.labels[rels[i]](i + 1, heads[i]) = 100.0;
  }
  EXPECT_LT(parse_loss(peaked, heads, rels), 1e-12);

  EXPECT_THROW_CODE(parse_loss(uniform, std::vector<int>{0, 0, 2, 3}, rels),
                    ErrorCode::kInvalidGoldTree);
  EXPECT_THROW_CODE(parse_loss(uniform, std::vector<int>{2, 0}, std::vector<int>{0, 0}),
                    ErrorCode::kInvalidGoldTree);
}

TEST(Biaffine, GradientsMatchFiniteDifferences) {
  Rng rng(9);
  const int d = 5, npos = 3, nrel = 3;
  auto p = random_params(d, npos, nrel, rng);
  Matrix chars = random_normal(5, d, 1.0, rng);
  const Segmentation seg(std::vector<std::string>(5, "x"), {{0, 2}, {2, 3}, {3, 5}});
  const std::vector<int> pos_ids = {2, 0, 2};
  const std::vector<int> heads = {2, 0, 2}, rels = {0, 2, 1};

  auto loss = [&] {
    const Matrix tokens = add_pos(pool_tokens(chars, seg, p.root), pos_ids, p.pos_embedding);
    return parse_loss(score_parse(p, tokens), heads, rels);
  };

  const Matrix tokens = add_pos(pool_tokens(chars, seg, p.root), pos_ids, p.pos_embedding);
  BiaffineCache cache;
  const ParseScores scores = score_parse(p, tokens, &cache);
  ParseScores sg;
  parse_loss(scores, heads, rels, &sg);
  BiaffineParams g = p.zeros_like();
  const Matrix d_tokens = score_parse_backward(p, cache, sg, g);
  for (std::size_t i = 0; i < pos_ids.size(); ++i) g.pos_embedding.row(pos_ids[i]) += d_tokens.row(i + 1);
  const Matrix d_chars = pool_tokens_backward(d_tokens, seg, g.root);

  EXPECT_LT(testing::relative_error(d_chars, testing::numeric_gradient(chars, loss)), 1e-4);
  std::vector<Matrix*> params, grads;
  std::vector<std::string> names;
  BiaffineParams::visit(p, "", [&](const std::string& n, Matrix& m) {
    params.push_back(&m);
    names.push_back(n);
  });
  BiaffineParams::visit(g, "", [&](const std::string&, Matrix& m) { grads.push_back(&m); });
  for (std::size_t i = 0; i < params.size(); ++i) {
    EXPECT_LT(testing::relative_error(*grads[i], testing::numeric_gradient(*params[i], loss)), 1e-4)
        << names[i];
  }
  // Only the POS rows in use receive gradient.
  EXPECT_EQ(g.pos_embedding.row(1).cwiseAbs().maxCoeff(), 0.0);
}

}  // namespace
}  // namespace hanforge
