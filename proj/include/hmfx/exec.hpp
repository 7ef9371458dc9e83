#pragma once

// Node-loop execution policies. Every kernel that walks grid nodes takes an
// Exec argument; the serial path is the reference the OpenMP path is tested
// against. Each iteration writes only its own output slots, so both paths
// produce bit-identical results.

#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>

namespace hmfx {

enum class Exec { Serial, OpenMP };

int max_threads();
void set_threads(int n);

template <class F>
void for_each_index(Exec exec, std::size_t count, F&& fn) {
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_lock;
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> guard(error_lock);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace hmfx
