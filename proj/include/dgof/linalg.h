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

#ifndef DGOF_LINALG_H_
#define DGOF_LINALG_H_

#include <cstdint>
#include <vector>

namespace dgof {

// Dense row-major symmetric matrix helpers backed by a self-adjoint
// eigensolver. Only the lower triangle is read.
std::vector<double> SymmetricEigenvalues(const std::vector<double>& a,
                                         int64_t n);

double MinEigenvalue(const std::vector<double>& a, int64_t n);
double MaxEigenvalue(const std::vector<double>& a, int64_t n);

}  // namespace dgof

#endif  // DGOF_LINALG_H_
