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

#include "hanforge/theseus.hpp"

#include <algorithm>
#include <string>

#include "hanforge/error.hpp"

namespace hanforge {

ModuleBinding ModuleBinding::halving(int large_layers) {
  if (large_layers < 2 || large_layers % 2 != 0) {
    throw Error(ErrorCode::kBindingMismatch,
                "large model needs an even number of blocks, got " + std::to_string(large_layers));
  }
  return ModuleBinding(large_layers / 2);
}

void ModuleBinding::check(const EncoderParams& base, const EncoderParams& large) const {
  const auto nb = static_cast<int>(base.layers.size());
  const auto nl = static_cast<int>(large.layers.size());
  if (nb != base_layers_ || nl != large_layers()) {
    throw Error(ErrorCode::kBindingMismatch, "binding expects " + std::to_string(base_layers_) +
                                                 "/" + std::to_string(large_layers()) +
                                                 " blocks, got " + std::to_string(nb) + "/" +
                                                 std::to_string(nl));
  }
  if (base.config.hidden != large.config.hidden || base.config.ffn != large.config.ffn ||
      base.config.num_heads != large.config.num_heads) {
    throw Error(ErrorCode::kBindingMismatch, "base and large block shapes differ");
  }
}

double TheseusSchedule::p(long step) const {
  if (phase1_steps <= 0) return 0.0;
  const double v = p0 * (1.0 - static_cast<double>(step) / static_cast<double>(phase1_steps));
  return std::clamp(v, 0.0, p0);
}

std::vector<bool> draw_replacements(int slots, double p, Rng& rng) {
  std::vector<bool> out(static_cast<std::size_t>(std::max(slots, 0)));
  for (auto&& r : out) r = uniform01(rng) < p;
  return out;
}

LayerPlan build_plan(const EncoderParams& base, const EncoderParams& large,
                     const ModuleBinding& binding, const std::vector<bool>& replaced) {
  binding.check(base, large);
  if (static_cast<int>(replaced.size()) != binding.slots()) {
    throw Error(ErrorCode::kBindingMismatch, "one replacement choice per slot expected");
  }
  LayerPlan plan;
  for (int s = 0; s < binding.slots(); ++s) {
    if (replaced[s]) {
      const auto [a, b] = binding.large_pair(s);
      plan.layers.push_back(&large.layers[a]);
      plan.owner.push_back(-1);
      plan.layers.push_back(&large.layers[b]);
      plan.owner.push_back(-1);
    } else {
      plan.layers.push_back(&base.layers[s]);
      plan.owner.push_back(s);
    }
  }
  return plan;
}

Matrix sample_forward(const EncoderParams& base, const EncoderParams& large,
                      const ModuleBinding& binding, double p, Rng& rng, int tag_id,
                      std::span<const int> char_ids, std::vector<bool>* choices) {
  binding.check(base, large);
  const auto replaced = draw_replacements(binding.slots(), p, rng);
  const LayerPlan plan = build_plan(base, large, binding, replaced);
  if (choices) *choices = replaced;
  return encoder_forward(base, plan.layers, tag_id, char_ids, {}, nullptr);
}

Model compress(const Model& large, std::span<const TrainingSet> data,
               const CompressOptions& options, const CompressCallback& on_step) {
  const auto binding = ModuleBinding::halving(large.config.encoder.num_layers);
  Model base = large;
  base.params.encoder = prune_layers(large.params.encoder, binding.base_layers());
  base.config.encoder = base.params.encoder.config;
  binding.check(base.params.encoder, large.params.encoder);

  BatchSampler sampler({data.begin(), data.end()}, options.batch_size, options.seed);
  Rng replace_rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
  Trainer trainer(base, options.optimizer);
  const TheseusSchedule& sched = options.schedule;

  for (long step = 0; step < sched.phase1_steps; ++step) {
    const double p = sched.p(step);
    const auto replaced = draw_replacements(binding.slots(), p, replace_rng);
    const LayerPlan plan = build_plan(base.params.encoder, large.params.encoder, binding, replaced);
    const auto batch = sampler.next();
    const double loss = trainer.step(batch, &plan);
    if (on_step) on_step(1, step, p, loss);
  }
  for (long step = 0; step < sched.phase2_steps; ++step) {
    const auto batch = sampler.next();
    const double loss = trainer.step(batch);
    if (on_step) on_step(2, step, 0.0, loss);
  }
  return base;
}

}  // namespace hanforge
