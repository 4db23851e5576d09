#ifndef COVBODY_ORACLE_HPP
#define COVBODY_ORACLE_HPP

// Brute-force estimators used as independent ground truth.

#include "parallel.hpp"
#include "sphere.hpp"
#include "types.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace covbody::oracle {

/// Rejection estimate of the integral of phi * 1_A over the box [lo, hi].
/// Samples are split into fixed partitions with their own streams, so the result
/// does not depend on the number of workers.
inline Estimate mc_measure(const std::function<double(const Vector&)>& phi,
                           const std::function<bool(const Vector&)>& member, const Vector& lo, const Vector& hi,
                           long n_samples, std::uint64_t seed, int partitions = 16) {
  if (n_samples < 2) throw InputError("mc_measure: needs at least two samples");
  const int d = static_cast<int>(lo.size());
  double box = 1.0;
  for (int i = 0; i < d; ++i) box *= hi(i) - lo(i);
  struct Partial {
    double sum = 0.0, sq = 0.0;
  };
  auto parts = parallel_map<Partial>(static_cast<std::size_t>(partitions), [&](std::size_t p) {
    const long begin = n_samples * static_cast<long>(p) / partitions;
    const long end = n_samples * static_cast<long>(p + 1) / partitions;
    Rng rng(derive_seed(seed, "oracle", p));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Partial out;
    Vector x(d);
    for (long i = begin; i < end; ++i) {
      for (int k = 0; k < d; ++k) x(k) = lo(k) + (hi(k) - lo(k)) * uni(rng);
      const double v = member(x) ? phi(x) : 0.0;
      out.sum += v;
      out.sq += v * v;
    }
    return out;
  });
  double sum = 0.0, sq = 0.0;
  for (const auto& p : parts) {
    sum += p.sum;
    sq += p.sq;
  }
  const double nn = static_cast<double>(n_samples);
  const double mean = sum / nn;
  const double var = std::max(sq / nn - mean * mean, 0.0) * nn / (nn - 1.0);
  return {box * mean, box * std::sqrt(var / nn)};
}

}  // namespace covbody::oracle

#endif  // COVBODY_ORACLE_HPP
