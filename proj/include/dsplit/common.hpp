#pragma once

// Shared plumbing for the dsplit library: error taxonomy, a portable
// deterministic RNG, stable number formatting and a deterministic
// parallel map used by the scan/profile drivers.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace dsplit {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violated by the caller (mismatched systems, k > d, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Work refused because it exceeds a configured cutoff.
class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

// A numeric computation failed; carries the module that raised it.
class NumericError : public Error {
 public:
  NumericError(const std::string& module, const std::string& what)
      : Error(module + ": " + what), module_(module) {}
  const std::string& module() const { return module_; }

 private:
  std::string module_;
};

class SingularityError : public Error {
 public:
  using Error::Error;
};

// An internal invariant failed; always a bug, never user input.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class DiagnosticsConflict : public Error {
 public:
  using Error::Error;
};

// Configuration rejected; key_path points at the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key_path, const std::string& what)
      : Error(key_path + ": " + what), key_path_(key_path) {}
  const std::string& key_path() const { return key_path_; }

 private:
  std::string key_path_;
};

// splitmix64 generator. Deliberately not std::mt19937: the stream and the
// derived uniform/normal variates are identical on every platform, which the
// byte-stable report contract relies on.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit mantissa.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Inclusive bounds.
  int uniform_int(int lo, int hi) {
    if (hi < lo) throw DomainError("uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next_u64() % span);
  }

  // Box-Muller; always consumes exactly two draws so substreams stay aligned.
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Derived generator for item `tag`, independent of iteration order.
  Rng fork(std::uint64_t tag) const {
    Rng r(state_ ^ (0x94d049bb133111ebULL * (tag + 1)));
    r.next_u64();
    return r;
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = 14695981039346656037ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

// 12 significant digits, the precision used for every number a report emits.
inline std::string format_sig(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline int default_thread_count() {
  if (const char* env = std::getenv("DSPLIT_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

// Runs fn(i) for i in [0, count). Each item must write only to its own
// preallocated slot, so the result is identical for any thread count.
template <typename F>
void parallel_for(std::size_t count, int threads, F&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const int t = std::min<std::size_t>(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(t);
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (int w = 0; w < t; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (std::size_t i = w; i < count; i += t) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace dsplit
