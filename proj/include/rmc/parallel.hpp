// Copyright 2026 The rmc Authors. All Rights Reserved.
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

#ifndef RMC_PARALLEL_HPP_
#define RMC_PARALLEL_HPP_

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rmc {

// Calls body(k) for k in [0, count) on up to `workers` threads using
// contiguous static blocks. The first exception thrown by any block is
// rethrown on the caller after all threads join.
template <typename Body>
void parallel_for(std::ptrdiff_t count, int workers, Body&& body) {
  const std::ptrdiff_t threads =
      std::clamp<std::ptrdiff_t>(workers, 1, std::max<std::ptrdiff_t>(count, 1));
  if (threads == 1) {
    for (std::ptrdiff_t k = 0; k < count; ++k) body(k);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run_block = [&](std::ptrdiff_t begin, std::ptrdiff_t end) {
    try {
      for (std::ptrdiff_t k = begin; k < end; ++k) body(k);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(threads - 1));
    const std::ptrdiff_t block = (count + threads - 1) / threads;
    for (std::ptrdiff_t t = 1; t < threads; ++t) {
      const std::ptrdiff_t begin = std::min(count, t * block);
      const std::ptrdiff_t end = std::min(count, begin + block);
      pool.emplace_back(run_block, begin, end);
    }
    run_block(0, std::min(count, block));
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace rmc

#endif  // RMC_PARALLEL_HPP_
