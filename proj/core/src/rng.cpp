#include "ltr/rng.hpp"

#include <algorithm>
#include <cmath>

#include "ltr/error.hpp"

namespace ltr {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double Rng::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  // Box-Muller; u1 bounded away from 0 so the log is finite.
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * 3.14159265358979323846 * u2;
  cached_normal_ = r * std::sin(a);
  has_cached_normal_ = true;
  return r * std::cos(a);
}

long long Rng::binomial(long long n, double p) {
  if (n < 0) throw Error("binomial: negative n");
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  if (p > 0.5) return n - binomial(n, 1.0 - p);
  // Count successes by jumping over runs of failures: the gap between
  // successes is geometric with parameter p.
  double log_q = std::log1p(-p);
  long long count = 0;
  long long pos = 0;
  while (true) {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    pos += static_cast<long long>(std::floor(std::log(u) / log_q)) + 1;
    if (pos > n) break;
    ++count;
  }
  return count;
}

std::vector<std::uint32_t> Rng::sample_without_replacement(std::uint32_t n,
                                                           std::uint32_t k) {
  if (k > n) k = n;
  // Partial Fisher-Yates over an index vector.
  std::vector<std::uint32_t> idx(n);
  for (std::uint32_t i = 0; i < n; ++i) idx[i] = i;
  for (std::uint32_t i = 0; i < k; ++i) {
    std::uint32_t j = i + static_cast<std::uint32_t>(uniform_int(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace ltr
