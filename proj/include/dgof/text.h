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

#ifndef DGOF_TEXT_H_
#define DGOF_TEXT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dgof {

std::vector<std::string_view> SplitString(std::string_view text, char sep,
                                          bool skip_empty = false);
std::string_view TrimWhitespace(std::string_view text);

// Whole-string numeric parsing; trailing garbage fails.
bool ParseInt64(std::string_view text, int64_t* out);
bool ParseUint64(std::string_view text, uint64_t* out);
bool ParseInt(std::string_view text, int* out);
bool ParseDouble(std::string_view text, double* out);

}  // namespace dgof

#endif  // DGOF_TEXT_H_
