#pragma once

#include <random>
#include <vector>

#include "exitwaves/cost_models.hpp"

namespace support {

inline std::vector<exitwaves::CostSpec> exponential_team(const std::vector<double>& betas, double rate = 1.0) {
  std::vector<exitwaves::CostSpec> out;
  for (double b : betas) out.push_back(exitwaves::exponential_cost(rate, b));
  return out;
}

/// Strictly increasing multipliers starting at 1 with log-gaps up to `spread`.
inline std::vector<double> random_wellordered_betas(std::mt19937_64& rng, std::size_t n, double spread) {
  std::uniform_real_distribution<double> gap(0.02, spread);
  std::vector<double> betas{1.0};
  while (betas.size() < n) betas.push_back(betas.back() * std::exp(gap(rng)));
  return betas;
}

}  // namespace support
