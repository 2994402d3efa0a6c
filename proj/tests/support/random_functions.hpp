#pragma once

#include <random>

#include "smirnov/blaschke_smirnov.hpp"

namespace testing_support {

using smirnov::cplx;

inline smirnov::FiniteBlaschkeProduct random_blaschke(std::mt19937_64& rng, int degree, double max_radius = 0.85) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<cplx> zeros;
  for (int k = 0; k < degree; ++k)
    zeros.push_back(std::polar(max_radius * std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng)));
  return smirnov::FiniteBlaschkeProduct(zeros, std::polar(1.0, 2.0 * std::numbers::pi * u(rng)));
}

// Random Helson function with deg B1 = n1, deg B2 = n2, drawn until the
// denominator B1 - B2 has no zero in the disk.
inline smirnov::RationalRealSmirnov random_helson(std::mt19937_64& rng, int n1, int n2) {
  for (int attempt = 0; attempt < 200000; ++attempt) {
    try {
      return smirnov::from_blaschke(random_blaschke(rng, n1), random_blaschke(rng, n2));
    } catch (const smirnov::Error&) {
    }
  }
  throw std::runtime_error("no outer Helson pair found");
}

// Degrees drawn so that at least one is positive and both are at most max_degree.
// High total degree is rarely outer, so the sum is capped at max_degree + 1.
inline smirnov::RationalRealSmirnov random_helson_up_to(std::mt19937_64& rng, int max_degree) {
  std::uniform_int_distribution<int> d(0, max_degree);
  for (;;) {
    const int n1 = d(rng), n2 = d(rng);
    if (n1 + n2 == 0 || n1 + n2 > max_degree + 1) continue;
    return random_helson(rng, n1, n2);
  }
}

}  // namespace testing_support
