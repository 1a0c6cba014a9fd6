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

#ifndef HANFORGE_THESEUS_HPP_
#define HANFORGE_THESEUS_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "hanforge/encoder.hpp"
#include "hanforge/model.hpp"
#include "hanforge/trainer.hpp"

namespace hanforge {

// Base block i stands in for large blocks 2i and 2i+1 (0-based).
class ModuleBinding {
 public:
  // Throws BindingMismatch unless large_layers is even and positive.
  static ModuleBinding halving(int large_layers);

  int slots() const { return base_layers_; }
  int base_layers() const { return base_layers_; }
  int large_layers() const { return 2 * base_layers_; }
  std::pair<int, int> large_pair(int slot) const { return {2 * slot, 2 * slot + 1}; }

  // Throws BindingMismatch if the stacks do not fit the binding.
  void check(const EncoderParams& base, const EncoderParams& large) const;

 private:
  explicit ModuleBinding(int base_layers) : base_layers_(base_layers) {}
  int base_layers_;
};

struct TheseusSchedule {
  double p0 = 0.5;
  long phase1_steps = 0;
  long phase2_steps = 0;

  // Linear decay from p0 at step 0 to 0 at phase1_steps, clamped to [0, p0].
  double p(long step) const;
};

// One Bernoulli(p) draw per slot, in slot order.
std::vector<bool> draw_replacements(int slots, double p, Rng& rng);

// Block sequence for a set of replacement choices. Base blocks are owned by
// their own index; large blocks are frozen.
LayerPlan build_plan(const EncoderParams& base, const EncoderParams& large,
                     const ModuleBinding& binding, const std::vector<bool>& replaced);

// Encoder forward through a freshly sampled mix of base and large blocks.
// Embeddings and the final norm come from `base`.
Matrix sample_forward(const EncoderParams& base, const EncoderParams& large,
                      const ModuleBinding& binding, double p, Rng& rng, int tag_id,
                      std::span<const int> char_ids, std::vector<bool>* choices = nullptr);

struct CompressOptions {
  TheseusSchedule schedule;
  std::size_t batch_size = 16;
  OptimizerConfig optimizer;
  std::uint64_t seed = 1;
};

// phase is 1 or 2; p is 0 throughout phase 2.
using CompressCallback = std::function<void(int phase, long step, double p, double loss)>;

// Builds a half-depth successor of `large` (first half of its blocks, shared
// embeddings and heads copied) and trains it in two phases: module
// replacement against the frozen large blocks, then plain fine-tuning.
// Training sets must reference corpus tags of `large`.
Model compress(const Model& large, std::span<const TrainingSet> data,
               const CompressOptions& options, const CompressCallback& on_step = {});

}  // namespace hanforge

#endif  // HANFORGE_THESEUS_HPP_
