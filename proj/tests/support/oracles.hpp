#ifndef AUTHCLUST_TESTS_ORACLES_HPP
#define AUTHCLUST_TESTS_ORACLES_HPP

#include <vector>

// Brute-force clustering-metric oracles, kept independent of the library
// implementations they check: B-cubed by explicit per-item set enumeration,
// ARI by explicit pair counting.
namespace oracles {

struct BCubedRef {
  double precision;
  double recall;
  double f;
};

BCubedRef bcubed(const std::vector<int>& pred, const std::vector<int>& truth);
double ari(const std::vector<int>& pred, const std::vector<int>& truth);

// Every set partition of {0..n-1} as a dense label vector (restricted
// growth strings); Bell(6) = 203.
std::vector<std::vector<int>> all_partitions(int n);

}  // namespace oracles

#endif
