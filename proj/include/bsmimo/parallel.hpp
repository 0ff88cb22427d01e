// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace bsm {

enum class Exec { serial, parallel };

// Evaluates f(i) for i in [0, n) and returns the results in index order. The
// parallel path only changes which thread computes each entry, so any
// reduction done afterwards over the returned vector is bit-identical.
template <class R, class F>
std::vector<R> trial_map(std::int64_t n, Exec exec, F&& f) {
  std::vector<R> out(static_cast<std::size_t>(n));
  if (exec == Exec::serial) {
    for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = f(i);
    return out;
  }
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = f(i);
  return out;
}

void set_worker_count(int workers);
int worker_count();

}  // namespace bsm
