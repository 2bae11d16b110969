// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "binharm/rng.hpp"

namespace binharm {

struct ConditionSpec;
struct TrialStimulus;

// Anything that answers a 3-interval trial. The reference interval is shown
// but never selectable: `choose` returns an index into trial.comparisons.
class Observer {
 public:
  virtual ~Observer() = default;
  virtual int choose(const TrialStimulus& trial, const ConditionSpec& spec, Rng& rng) const = 0;
};

}  // namespace binharm
