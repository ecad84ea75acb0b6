// Copyright 2026 The epicolor Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace epicolor {

struct SelfTestOptions {
  std::uint64_t seed = 20260101;
  int instances = 100;
  // Runs the M-step with a sign error in the variance update; the M-step
  // oracle property must then fail.
  bool inject_variance_sign_fault = false;
};

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Small-instance oracle checks: posterior normalization, accelerated vs
// reference patch likelihoods, and M-step vs explicit summation.
std::vector<PropertyResult> run_selftest(const SelfTestOptions& options = {});

}  // namespace epicolor
