// Copyright 2026 The dgof Authors
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

#ifndef DGOF_CONSTANTS_H_
#define DGOF_CONSTANTS_H_

// Frozen constants. Values marked "calibrated" were produced by
// tools/calibrate.cc; rerun it and paste its output here to refresh them.

namespace dgof {

// Codebook has m = 2^kC0 * n vectors, so a seed costs sigma + kC0 bits.
inline constexpr int kC0 = 3;
// Certified subsets keep at least a (1 - kC1) fraction of the vectors.
inline constexpr double kC1 = 0.1;
// Calibrated: 0.8 times the smallest subset eigenvalue seen at n = 64.
inline constexpr double kC2 = 0.0724;
inline constexpr int kSubsetTrials = 200;
// Cap on the top eigenvalue of the centered average Gram matrix.
inline constexpr double kLambdaMaxCap = 425.0 / 32.0;
inline constexpr int kMaxCertificationRetries = 64;

// Amplifier parameters used by the protocol by default.
inline constexpr double kDeskEta = 0.5;
inline constexpr double kDeskGamma = 0.3;
// Bad-seed fraction tolerated by the paper-faithful profile.
inline constexpr double kFaithfulEta = 0.75;

// Multipliers in the private-coin tester rates k^1.5 / (2^l eps^2) and
// k^1.5 / (eps^2 rho^2). Worst calibrated value times 1.5.
inline constexpr double kCTesterComm = 34.0;
inline constexpr double kCTesterLdp = 15.0;

// Multipliers in the protocol's required player count. One constant has to
// cover every coin budget, and at small k the compressed groups are by far
// the most expensive (calibrate players).
inline constexpr double kCComm = 96.0;
inline constexpr double kCLdp = 35000.0;

}  // namespace dgof

#endif  // DGOF_CONSTANTS_H_
