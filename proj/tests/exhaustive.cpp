/*
 * Copyright 2026 The clustersim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Every operand triple of both 8-bit formats through fma and add3.

#include <chrono>
#include <cstdio>

#include "sweeps.hpp"

using clustersim::minifloat::Format;

int main() {
  int failed = 0;
  for (Format f : {Format::FP8, Format::FP8ALT}) {
    const auto t0 = std::chrono::steady_clock::now();
    const sweeps::Outcome o = sweeps::exhaustive_ternary(f);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = o.ok() && o.cases == 2ull << 24;
    std::printf("%s %s: %llu cases, %llu mismatches%s%s (%.1fs)\n", ok ? "PASS" : "FAIL",
                f == Format::FP8 ? "FP8" : "FP8ALT", static_cast<unsigned long long>(o.cases),
                static_cast<unsigned long long>(o.mismatches), o.first.empty() ? "" : ", first ", o.first.c_str(),
                secs);
    failed += ok ? 0 : 1;
  }
  return failed;
}
