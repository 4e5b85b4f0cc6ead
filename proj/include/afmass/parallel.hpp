#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <vector>

namespace afmass {

/// Worker bound: AFMASS_THREADS when set to a positive integer, else the hardware
/// concurrency (at least 1).
unsigned worker_count();

/// out[i] = fn(i) for i < n, evaluated on up to worker_count() threads. Results are
/// stored by index, so the output never depends on scheduling. When several calls
/// throw, the exception of the lowest index is rethrown.
template <class T>
std::vector<T> parallel_map(std::size_t n, const std::function<T(std::size_t)>& fn);

namespace detail {
void run_indexed(std::size_t n, const std::function<void(std::size_t)>& task);
}  // namespace detail

template <class T>
std::vector<T> parallel_map(std::size_t n, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  detail::run_indexed(n, [&](std::size_t i) {
    try {
      out[i] = fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace afmass
