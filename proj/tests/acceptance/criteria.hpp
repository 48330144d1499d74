// Copyright 2026 The MKPNet Authors
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
#ifndef MKP_TESTS_ACCEPTANCE_CRITERIA_HPP_
#define MKP_TESTS_ACCEPTANCE_CRITERIA_HPP_

#include <string>

// Precision-neutral interface between the f32 driver and the f64 checks.
namespace mkp_acceptance {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Implemented against the double-precision core.
Outcome gradient_correctness();
Outcome loss_algebra();

}  // namespace mkp_acceptance

#endif  // MKP_TESTS_ACCEPTANCE_CRITERIA_HPP_
