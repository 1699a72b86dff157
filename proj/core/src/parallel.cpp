#include "amgd/parallel.hpp"

#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "amgd/error.hpp"

namespace amgd {

long parallel_degree(long n) {
  if (n <= 1) return n < 1 ? 0 : 1;
  const char* raw = std::getenv("AMGD_PARALLEL");
  if (raw == nullptr || *raw == '\0') return n;
  long degree = 0;
  const std::string s(raw);
  auto res = std::from_chars(s.data(), s.data() + s.size(), degree);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || degree < 1)
    throw Error("BadConstants", "AMGD_PARALLEL must be a positive integer");
  return degree < n ? degree : n;
}

void parallel_for(long n, const std::function<void(long)>& fn) {
  if (n <= 0) return;
  const long workers = parallel_degree(n);
  if (workers <= 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (long w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace amgd
