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

#include "hanforge/biaffine.hpp"

#include <cmath>
#include <limits>

#include "hanforge/error.hpp"

namespace hanforge {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Matrix with_ones(const Matrix& m) {
  Matrix out(m.rows(), m.cols() + 1);
  out.leftCols(m.cols()) = m;
  out.col(m.cols()).setOnes();
  return out;
}

Matrix tanh_layer(const Matrix& x, const Matrix& w, const Matrix& b) {
  return ((x * w).rowwise() + b.row(0)).array().tanh().matrix();
}

// Backprop through y = tanh(x w + b); returns dLoss/dx.
Matrix tanh_layer_backward(const Matrix& x, const Matrix& y, const Matrix& w, const Matrix& dy,
                           Matrix& dw, Matrix& db) {
  Matrix dpre = dy.array() * (1.0 - y.array().square());
  dw += x.transpose() * dpre;
  db += dpre.colwise().sum();
  return dpre * w.transpose();
}

Matrix label_block(const Matrix& label_w, int r) {
  const Eigen::Index k = label_w.cols();
  return label_w.middleRows(r * k, k);
}

void mask_arcs(Matrix& arc) {
  arc.row(0).setConstant(kNegInf);
  for (Eigen::Index i = 0; i < arc.rows(); ++i) arc(i, i) = kNegInf;
}

// Returns the nodes of one cycle in the head graph, or empty.
std::vector<int> find_cycle(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  std::vector<int> state(n, 0);  // 0 unvisited, 1 on current walk, 2 done
  state[0] = 2;
  for (int start = 1; start < n; ++start) {
    if (state[start]) continue;
    std::vector<int> walk;
    int node = start;
    while (node >= 0 && state[node] == 0) {
      state[node] = 1;
      walk.push_back(node);
      node = heads[node];
    }
    if (node >= 0 && state[node] == 1) {
      std::vector<int> cycle;
      int v = node;
      do {
        cycle.push_back(v);
        v = heads[v];
      } while (v != node);
      return cycle;
    }
    for (int v : walk) state[v] = 2;
  }
  return {};
}

double tree_score(const Matrix& scores, const std::vector<int>& heads) {
  double s = 0.0;
  for (std::size_t i = 1; i < heads.size(); ++i) s += scores(i, heads[i]);
  return s;
}

}  // namespace

BiaffineParams BiaffineParams::init(int hidden, const BiaffineConfig& config, int num_pos,
                                    int num_rels, Rng& rng) {
  const double sd = 1.0 / std::sqrt(static_cast<double>(hidden));
  BiaffineParams p;
  p.root = random_normal(1, hidden, 1.0, rng);
  p.pos_embedding = random_normal(num_pos, hidden, 0.5, rng);
  p.arc_dep_w = random_normal(hidden, config.arc_dim, sd, rng);
  p.arc_dep_b = Matrix::Zero(1, config.arc_dim);
  p.arc_head_w = random_normal(hidden, config.arc_dim, sd, rng);
  p.arc_head_b = Matrix::Zero(1, config.arc_dim);
  p.label_dep_w = random_normal(hidden, config.label_dim, sd, rng);
  p.label_dep_b = Matrix::Zero(1, config.label_dim);
  p.label_head_w = random_normal(hidden, config.label_dim, sd, rng);
  p.label_head_b = Matrix::Zero(1, config.label_dim);
  p.arc_w = Matrix::Zero(config.arc_dim + 1, config.arc_dim);
  p.label_w = Matrix::Zero(static_cast<Eigen::Index>(num_rels) * (config.label_dim + 1),
                           config.label_dim + 1);
  return p;
}

BiaffineParams BiaffineParams::zeros_like() const {
  BiaffineParams z = *this;
  visit(z, "", [](const std::string&, Matrix& m) { m.setZero(); });
  return z;
}

Matrix pool_tokens(const Matrix& char_features, const Segmentation& seg, const Matrix& root) {
  if (static_cast<std::size_t>(char_features.rows()) != seg.chars().size()) {
    throw Error(ErrorCode::kSpanMismatch,
                "segmentation covers " + std::to_string(seg.chars().size()) + " chars but " +
                    std::to_string(char_features.rows()) + " feature rows given");
  }
  Matrix out(seg.size() + 1, char_features.cols());
  out.row(0) = root.row(0);
  for (std::size_t i = 0; i < seg.size(); ++i) {
    const Span& s = seg.spans()[i];
    out.row(i + 1) = char_features.middleRows(s.begin, s.size()).colwise().mean();
  }
  return out;
}

Matrix pool_tokens_backward(const Matrix& d_tokens, const Segmentation& seg, Matrix& d_root) {
  d_root += d_tokens.row(0);
  Matrix d_chars(seg.chars().size(), d_tokens.cols());
  for (std::size_t i = 0; i < seg.size(); ++i) {
    const Span& s = seg.spans()[i];
    const double inv = 1.0 / static_cast<double>(s.size());
    for (std::size_t c = s.begin; c < s.end; ++c) d_chars.row(c) = d_tokens.row(i + 1) * inv;
  }
  return d_chars;
}

Matrix add_pos(const Matrix& tokens, std::span<const int> pos_ids, const Matrix& table) {
  if (pos_ids.size() + 1 != static_cast<std::size_t>(tokens.rows())) {
    throw Error(ErrorCode::kSpanMismatch, "one POS label per token required");
  }
  Matrix out = tokens;
  for (std::size_t i = 0; i < pos_ids.size(); ++i) {
    if (pos_ids[i] < 0 || pos_ids[i] >= table.rows()) {
      throw Error(ErrorCode::kUnknownPosLabel, "POS id " + std::to_string(pos_ids[i]));
    }
    out.row(i + 1) += table.row(pos_ids[i]);
  }
  return out;
}

Matrix biaffine_arc(const Matrix& dep, const Matrix& head, const Matrix& w) {
  return with_ones(dep) * w * head.transpose();
}

ParseScores score_parse(const BiaffineParams& params, const Matrix& tokens, BiaffineCache* cache) {
  BiaffineCache local;
  BiaffineCache& c = cache ? *cache : local;
  c.tokens = tokens;
  c.arc_dep = tanh_layer(tokens, params.arc_dep_w, params.arc_dep_b);
  c.arc_head = tanh_layer(tokens, params.arc_head_w, params.arc_head_b);
  c.label_dep = tanh_layer(tokens, params.label_dep_w, params.label_dep_b);
  c.label_head = tanh_layer(tokens, params.label_head_w, params.label_head_b);

  ParseScores s;
  s.arc = biaffine_arc(c.arc_dep, c.arc_head, params.arc_w);
  mask_arcs(s.arc);
  const Matrix ld = with_ones(c.label_dep);
  const Matrix lh_t = with_ones(c.label_head).transpose();
  for (int r = 0; r < params.num_rels(); ++r) {
    s.labels.push_back(ld * label_block(params.label_w, r) * lh_t);
  }
  return s;
}

Matrix score_arcs(const BiaffineParams& params, const Matrix& tokens) {
  Matrix dep = tanh_layer(tokens, params.arc_dep_w, params.arc_dep_b);
  Matrix head = tanh_layer(tokens, params.arc_head_w, params.arc_head_b);
  Matrix arc = biaffine_arc(dep, head, params.arc_w);
  mask_arcs(arc);
  return arc;
}

Matrix score_labels(const BiaffineParams& params, const Matrix& tokens, std::span<const int> heads) {
  const Matrix ld = with_ones(tanh_layer(tokens, params.label_dep_w, params.label_dep_b));
  const Matrix lh = with_ones(tanh_layer(tokens, params.label_head_w, params.label_head_b));
  const int n = static_cast<int>(tokens.rows()) - 1;
  if (heads.size() != static_cast<std::size_t>(n)) {
    throw Error(ErrorCode::kSpanMismatch, "one head per token required");
  }
  Matrix out(n, params.num_rels());
  for (int i = 1; i <= n; ++i) {
    for (int r = 0; r < params.num_rels(); ++r) {
      out(i - 1, r) =
          (ld.row(i) * label_block(params.label_w, r) * lh.row(heads[i - 1]).transpose())(0, 0);
    }
  }
  return out;
}

double parse_loss(const ParseScores& scores, std::span<const int> gold_heads,
                  std::span<const int> gold_rels, ParseScores* grads) {
  const int n = static_cast<int>(scores.arc.rows()) - 1;
  const int num_rels = static_cast<int>(scores.labels.size());
  if (gold_heads.size() != static_cast<std::size_t>(n) || gold_rels.size() != gold_heads.size() ||
      !is_single_root_tree(gold_heads)) {
    throw Error(ErrorCode::kInvalidGoldTree, "gold heads do not form a single-root tree");
  }
  for (int r : gold_rels) {
    if (r < 0 || r >= num_rels) throw Error(ErrorCode::kInvalidGoldTree, "relation out of range");
  }
  if (grads) {
    grads->arc = Matrix::Zero(n + 1, n + 1);
    grads->labels.assign(num_rels, Matrix::Zero(n + 1, n + 1));
  }
  double loss = 0.0;
  Eigen::VectorXd rel_scores(num_rels);
  for (int i = 1; i <= n; ++i) {
    const int h = gold_heads[i - 1];
    const Eigen::VectorXd row = scores.arc.row(i).transpose();
    const double lz = log_sum_exp(row);
    loss += lz - row[h];
    for (int r = 0; r < num_rels; ++r) rel_scores[r] = scores.labels[r](i, h);
    const double lr = log_sum_exp(rel_scores);
    loss += lr - rel_scores[gold_rels[i - 1]];
    if (grads) {
      for (int j = 0; j <= n; ++j) grads->arc(i, j) = std::exp(row[j] - lz);
      grads->arc(i, h) -= 1.0;
      for (int r = 0; r < num_rels; ++r) grads->labels[r](i, h) = std::exp(rel_scores[r] - lr);
      grads->labels[gold_rels[i - 1]](i, h) -= 1.0;
    }
  }
  return loss;
}

Matrix score_parse_backward(const BiaffineParams& params, const BiaffineCache& cache,
                            const ParseScores& grads, BiaffineParams& g) {
  const Eigen::Index p = params.arc_w.cols();
  const Matrix ad = with_ones(cache.arc_dep);
  const Matrix& ah = cache.arc_head;
  g.arc_w += ad.transpose() * grads.arc * ah;
  Matrix d_ad = (grads.arc * ah * params.arc_w.transpose()).leftCols(p);
  Matrix d_ah = grads.arc.transpose() * ad * params.arc_w;

  const Eigen::Index q = params.label_w.cols() - 1;
  const Matrix ld = with_ones(cache.label_dep);
  const Matrix lh = with_ones(cache.label_head);
  Matrix d_ld = Matrix::Zero(ld.rows(), q + 1);
  Matrix d_lh = Matrix::Zero(lh.rows(), q + 1);
  for (int r = 0; r < params.num_rels(); ++r) {
    const Matrix& gr = grads.labels[r];
    const Matrix w = label_block(params.label_w, r);
    g.label_w.middleRows(r * (q + 1), q + 1) += ld.transpose() * gr * lh;
    d_ld += gr * lh * w.transpose();
    d_lh += gr.transpose() * ld * w;
  }

  Matrix d_tokens = tanh_layer_backward(cache.tokens, cache.arc_dep, params.arc_dep_w, d_ad,
                                        g.arc_dep_w, g.arc_dep_b);
  d_tokens += tanh_layer_backward(cache.tokens, cache.arc_head, params.arc_head_w, d_ah,
                                  g.arc_head_w, g.arc_head_b);
  d_tokens += tanh_layer_backward(cache.tokens, cache.label_dep, params.label_dep_w,
                                  d_ld.leftCols(q), g.label_dep_w, g.label_dep_b);
  d_tokens += tanh_layer_backward(cache.tokens, cache.label_head, params.label_head_w,
                                  d_lh.leftCols(q), g.label_head_w, g.label_head_b);
  return d_tokens;
}

std::vector<int> chu_liu_edmonds(const Matrix& s) {
  const int n = static_cast<int>(s.rows());
  std::vector<int> heads(n, -1);
  for (int i = 1; i < n; ++i) {
    double best = kNegInf;
    int arg = 0;
    for (int j = 0; j < n; ++j) {
      if (j != i && s(i, j) > best) {
        best = s(i, j);
        arg = j;
      }
    }
    heads[i] = arg;
  }
  const std::vector<int> cycle = find_cycle(heads);
  if (cycle.empty()) return heads;

  // Contract the cycle into a single node placed last.
  std::vector<bool> in_cycle(n, false);
  for (int v : cycle) in_cycle[v] = true;
  std::vector<int> old_of_new;
  for (int v = 0; v < n; ++v) {
    if (!in_cycle[v]) old_of_new.push_back(v);
  }
  const int m = static_cast<int>(old_of_new.size());
  const int c = m;
  Matrix s2 = Matrix::Constant(m + 1, m + 1, kNegInf);
  std::vector<int> leave(m, -1);  // cycle node heading outside dependent a
  std::vector<int> enter(m, -1);  // cycle node whose head becomes outside node a
  for (int a = 0; a < m; ++a) {
    const int i = old_of_new[a];
    for (int b = 0; b < m; ++b) {
      if (a != b) s2(a, b) = s(i, old_of_new[b]);
    }
    if (i != 0) {
      double best = kNegInf;
      for (int v : cycle) {
        if (leave[a] < 0 || s(i, v) > best) {
          best = s(i, v);
          leave[a] = v;
        }
      }
      s2(a, c) = best;
    }
    double best = kNegInf;
    for (int v : cycle) {
      const double gain = s(v, i) - s(v, heads[v]);
      if (enter[a] < 0 || gain > best) {
        best = gain;
        enter[a] = v;
      }
    }
    s2(c, a) = best;
  }
  const std::vector<int> h2 = chu_liu_edmonds(s2);

  std::vector<int> out = heads;
  for (int a = 1; a < m; ++a) {
    const int i = old_of_new[a];
    out[i] = h2[a] == c ? leave[a] : old_of_new[h2[a]];
  }
  const int outside_head = h2[c];
  out[enter[outside_head]] = old_of_new[outside_head];
  return out;
}

DecodedTree decode_tree(const Matrix& arc_scores, const std::vector<Matrix>& label_scores) {
  const int n = static_cast<int>(arc_scores.rows()) - 1;
  DecodedTree result;
  if (n <= 0) return result;

  std::vector<int> heads = chu_liu_edmonds(arc_scores);
  int root_children = 0;
  for (int i = 1; i <= n; ++i) root_children += heads[i] == 0;
  if (root_children != 1) {
    // Best tree for each fixed root child; the global optimum is among them.
    double best = kNegInf;
    std::vector<int> best_heads;
    for (int child = 1; child <= n; ++child) {
      if (!std::isfinite(arc_scores(child, 0))) continue;
      Matrix s = arc_scores;
      for (int i = 1; i <= n; ++i) {
        if (i != child) s(i, 0) = kNegInf;
      }
      std::vector<int> h = chu_liu_edmonds(s);
      const double score = tree_score(s, h);
      if (best_heads.empty() || score > best) {
        best = score;
        best_heads = std::move(h);
      }
    }
    heads = std::move(best_heads);
  }

  result.heads.assign(heads.begin() + 1, heads.end());
  result.score = tree_score(arc_scores, heads);
  result.rels.assign(n, 0);
  for (int i = 1; i <= n; ++i) {
    double best = kNegInf;
    for (std::size_t r = 0; r < label_scores.size(); ++r) {
      const double v = label_scores[r](i, heads[i]);
      if (v > best) {
        best = v;
        result.rels[i - 1] = static_cast<int>(r);
      }
    }
  }
  return result;
}

}  // namespace hanforge
