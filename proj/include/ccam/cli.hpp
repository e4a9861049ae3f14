/*
 * Copyright 2026 The ccam Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ccam {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

inline constexpr unsigned long long kDefaultVerifySeed = 20230917ULL;

// Entry point of the `ccam` binary. args[0] is the program name.
//
//   ccam explain --record DIR --mode MODE --weights SCHEME --alpha F
//                --tanh {on|off} --score-space {softmax|logit} --out PREFIX
//   ccam eval --manifest FILE --jobs N --out FILE
//   ccam verify [--seed N]          (CCAM_SEED overrides the seed)
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace ccam
