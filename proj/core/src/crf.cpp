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

#include "hanforge/crf.hpp"

#include <cmath>
#include <limits>

#include "hanforge/error.hpp"

namespace hanforge {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// alpha(t, j): log-sum of scores of all prefixes ending in label j at t.
Matrix forward_scores(const Matrix& em, const Transitions& tr, std::size_t len) {
  const int L = static_cast<int>(em.cols());
  Matrix alpha(len, L);
  alpha.row(0) = tr.start.row(0) + em.row(0);
  Eigen::VectorXd scratch(L);
  for (std::size_t t = 1; t < len; ++t) {
    for (int j = 0; j < L; ++j) {
      for (int i = 0; i < L; ++i) scratch[i] = alpha(t - 1, i) + tr.trans(i, j);
      alpha(t, j) = log_sum_exp(scratch) + em(t, j);
    }
  }
  return alpha;
}

// beta(t, i): log-sum of scores of all suffixes after label i at t, end included.
Matrix backward_scores(const Matrix& em, const Transitions& tr, std::size_t len) {
  const int L = static_cast<int>(em.cols());
  Matrix beta(len, L);
  beta.row(len - 1) = tr.end.row(0);
  Eigen::VectorXd scratch(L);
  for (std::size_t t = len - 1; t-- > 0;) {
    for (int i = 0; i < L; ++i) {
      for (int j = 0; j < L; ++j) scratch[j] = tr.trans(i, j) + em(t + 1, j) + beta(t + 1, j);
      beta(t, i) = log_sum_exp(scratch);
    }
  }
  return beta;
}

void check_shapes(const Matrix& em, const Transitions& tr, std::size_t len) {
  if (len == 0) throw Error(ErrorCode::kEmptySequence, "CRF over an empty sequence");
  if (len > static_cast<std::size_t>(em.rows())) {
    throw Error(ErrorCode::kSpanMismatch, "length exceeds emission rows");
  }
  if (em.cols() != tr.trans.rows()) {
    throw Error(ErrorCode::kSpanMismatch, "emission width differs from label count");
  }
}

}  // namespace

Transitions Transitions::zeros(int num_labels) {
  return {Matrix::Zero(num_labels, num_labels), Matrix::Zero(1, num_labels),
          Matrix::Zero(1, num_labels)};
}

TransitionMask TransitionMask::from_scheme(const LabelScheme& scheme) {
  const auto L = static_cast<Eigen::Index>(scheme.size());
  TransitionMask m;
  m.allowed.resize(L, L);
  m.start_ok.resize(L);
  m.end_ok.resize(L);
  for (Eigen::Index i = 0; i < L; ++i) {
    m.start_ok[i] = scheme.legal_start(i);
    m.end_ok[i] = scheme.legal_end(i);
    for (Eigen::Index j = 0; j < L; ++j) m.allowed(i, j) = scheme.legal(i, j);
  }
  return m;
}

double path_score(const Matrix& em, const Transitions& tr, std::span<const int> labels) {
  if (labels.empty()) return 0.0;
  double s = tr.start(0, labels[0]) + tr.end(0, labels.back());
  for (std::size_t t = 0; t < labels.size(); ++t) {
    s += em(t, labels[t]);
    if (t > 0) s += tr.trans(labels[t - 1], labels[t]);
  }
  return s;
}

double log_partition(const Matrix& em, const Transitions& tr, std::size_t len) {
  check_shapes(em, tr, len);
  Matrix alpha = forward_scores(em, tr, len);
  Eigen::VectorXd last = (alpha.row(len - 1) + tr.end.row(0)).transpose();
  return log_sum_exp(last);
}

Matrix label_marginals(const Matrix& em, const Transitions& tr, std::size_t len) {
  check_shapes(em, tr, len);
  Matrix alpha = forward_scores(em, tr, len);
  Matrix beta = backward_scores(em, tr, len);
  Eigen::VectorXd last = (alpha.row(len - 1) + tr.end.row(0)).transpose();
  const double log_z = log_sum_exp(last);
  return (alpha + beta).array().unaryExpr([log_z](double v) { return std::exp(v - log_z); });
}

double nll_loss(const Matrix& em, const Transitions& tr, std::span<const int> gold,
                std::size_t len, CrfGradients* grads) {
  check_shapes(em, tr, len);
  const int L = static_cast<int>(em.cols());
  if (gold.size() < len) throw Error(ErrorCode::kLabelOutOfRange, "gold shorter than length");
  for (std::size_t t = 0; t < len; ++t) {
    if (gold[t] < 0 || gold[t] >= L) {
      throw Error(ErrorCode::kLabelOutOfRange,
                  "gold label " + std::to_string(gold[t]) + " at " + std::to_string(t));
    }
  }
  Matrix alpha = forward_scores(em, tr, len);
  Eigen::VectorXd last = (alpha.row(len - 1) + tr.end.row(0)).transpose();
  const double log_z = log_sum_exp(last);
  const double gold_score = path_score(em, tr, gold.first(len));
  if (!grads) return log_z - gold_score;

  Matrix beta = backward_scores(em, tr, len);
  grads->emissions = Matrix::Zero(em.rows(), L);
  for (std::size_t t = 0; t < len; ++t) {
    for (int j = 0; j < L; ++j) grads->emissions(t, j) = std::exp(alpha(t, j) + beta(t, j) - log_z);
  }
  Transitions& g = grads->transitions;
  g.start += grads->emissions.row(0);
  g.end += grads->emissions.row(len - 1);
  for (std::size_t t = 0; t + 1 < len; ++t) {
    for (int i = 0; i < L; ++i) {
      for (int j = 0; j < L; ++j) {
        g.trans(i, j) += std::exp(alpha(t, i) + tr.trans(i, j) + em(t + 1, j) + beta(t + 1, j) - log_z);
      }
    }
  }
  for (std::size_t t = 0; t < len; ++t) {
    grads->emissions(t, gold[t]) -= 1.0;
    if (t + 1 < len) g.trans(gold[t], gold[t + 1]) -= 1.0;
  }
  g.start(0, gold[0]) -= 1.0;
  g.end(0, gold[len - 1]) -= 1.0;
  return log_z - gold_score;
}

ViterbiResult viterbi(const Matrix& em, const Transitions& tr, const TransitionMask* mask,
                      const Matrix* bias) {
  const std::size_t T = static_cast<std::size_t>(em.rows());
  const int L = static_cast<int>(em.cols());
  if (T == 0) return {};
  check_shapes(em, tr, T);
  if (bias && (bias->rows() != em.rows() || bias->cols() != em.cols())) {
    throw Error(ErrorCode::kSpanMismatch, "bias shape differs from emissions");
  }
  auto emit = [&](std::size_t t, int j) { return em(t, j) + (bias ? (*bias)(t, j) : 0.0); };
  auto trans = [&](int i, int j) {
    return (!mask || mask->allowed(i, j)) ? tr.trans(i, j) : kNegInf;
  };

  Matrix score(T, L);
  Eigen::MatrixXi back(T, L);
  for (int j = 0; j < L; ++j) {
    score(0, j) = (!mask || mask->start_ok[j]) ? tr.start(0, j) + emit(0, j) : kNegInf;
  }
  for (std::size_t t = 1; t < T; ++t) {
    for (int j = 0; j < L; ++j) {
      double best = kNegInf;
      int arg = 0;
      for (int i = 0; i < L; ++i) {
        const double s = score(t - 1, i) + trans(i, j);
        if (s > best) {
          best = s;
          arg = i;
        }
      }
      score(t, j) = best + emit(t, j);
      back(t, j) = arg;
    }
  }
  double best = kNegInf;
  int arg = 0;
  for (int j = 0; j < L; ++j) {
    const double s = score(T - 1, j) + ((!mask || mask->end_ok[j]) ? tr.end(0, j) : kNegInf);
    if (s > best) {
      best = s;
      arg = j;
    }
  }
  if (!std::isfinite(best)) throw Error(ErrorCode::kNoLegalPath, "no legal label path");

  ViterbiResult result;
  result.score = best;
  result.labels.resize(T);
  result.labels[T - 1] = arg;
  for (std::size_t t = T - 1; t > 0; --t) result.labels[t - 1] = back(t, result.labels[t]);
  return result;
}

CrfHead CrfHead::init(int hidden, int num_labels, Rng& rng) {
  const double sd = 1.0 / std::sqrt(static_cast<double>(hidden));
  CrfHead h;
  h.w1 = random_normal(hidden, hidden, sd, rng);
  h.b1 = Matrix::Zero(1, hidden);
  h.w2 = random_normal(hidden, num_labels, sd, rng);
  h.b2 = Matrix::Zero(1, num_labels);
  h.transitions = Transitions::zeros(num_labels);
  return h;
}

CrfHead CrfHead::zeros_like() const {
  CrfHead z = *this;
  visit(z, "", [](const std::string&, Matrix& m) { m.setZero(); });
  return z;
}

Matrix crf_emissions(const CrfHead& head, const Matrix& features, CrfHeadCache* cache) {
  Matrix hidden = ((features * head.w1).rowwise() + head.b1.row(0)).array().tanh().matrix();
  Matrix em = (hidden * head.w2).rowwise() + head.b2.row(0);
  if (cache) {
    cache->input = features;
    cache->hidden = std::move(hidden);
  }
  return em;
}

Matrix crf_emissions_backward(const CrfHead& head, const CrfHeadCache& cache,
                              const Matrix& d_emissions, CrfHead& grads) {
  grads.w2 += cache.hidden.transpose() * d_emissions;
  grads.b2 += d_emissions.colwise().sum();
  Matrix d_hidden = d_emissions * head.w2.transpose();
  Matrix d_pre = d_hidden.array() * (1.0 - cache.hidden.array().square());
  grads.w1 += cache.input.transpose() * d_pre;
  grads.b1 += d_pre.colwise().sum();
  return d_pre * head.w1.transpose();
}

}  // namespace hanforge
