#include "omplab/rng.hpp"

#include <algorithm>

namespace omplab::rng {

std::vector<std::size_t> Xoshiro256::sample_combination(std::size_t n, std::size_t k) {
  // Floyd's algorithm: k distinct draws without building [0, n).
  std::vector<std::size_t> chosen;
  chosen.reserve(k);
  for (std::size_t j = n - k; j < n; ++j) {
    const std::size_t t = static_cast<std::size_t>(below(j + 1));
    if (std::find(chosen.begin(), chosen.end(), t) != chosen.end()) {
      chosen.push_back(j);
    } else {
      chosen.push_back(t);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace omplab::rng
