#ifndef COVBODY_PARALLEL_HPP
#define COVBODY_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <random>
#include <string_view>
#include <thread>
#include <vector>

namespace covbody {

/// Worker cap shared by all parallel loops; 0 means hardware concurrency.
inline std::atomic<int>& thread_cap() {
  static std::atomic<int> cap{0};
  return cap;
}

inline int worker_count(std::size_t jobs) {
  int cap = thread_cap().load();
  if (cap <= 0) cap = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(cap), std::max<std::size_t>(jobs, 1)));
}

/// Evaluates f(i) for i in [0, n) and returns results by index. Output does not
/// depend on the number of workers.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& f) {
  std::vector<T> out(n);
  const int workers = worker_count(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto body = [&] {
    for (std::size_t i = next++; i < n && !failed; i = next++) {
      try {
        out[i] = f(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a base seed, a tag and an index.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ULL;
  return splitmix64(splitmix64(seed ^ h) + index);
}

using Rng = std::mt19937_64;

}  // namespace covbody

#endif  // COVBODY_PARALLEL_HPP
