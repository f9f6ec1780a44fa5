#include "softrec/common.hpp"

#include <algorithm>
#include <cstdlib>
#include <mutex>

namespace softrec {

unsigned worker_count() {
  if (const char* env = std::getenv("SOFTREC_THREADS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed >= 1) return static_cast<unsigned>(std::min(parsed, 64L));
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return std::min(hw == 0 ? 1u : hw, 16u);
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(n));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (int i = static_cast<int>(w); i < n; i += static_cast<int>(workers)) fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace softrec
