#ifndef AUTHCLUST_CLUSTER_HPP
#define AUTHCLUST_CLUSTER_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "authclust/constraints.hpp"
#include "authclust/lssr.hpp"

namespace authclust {

// A partition of n documents into dense 0-based cluster labels.
struct Clustering {
  std::vector<int> labels;
  int k = 0;

  // Compacts arbitrary labels into dense 0..k-1 ids (ascending label order).
  static Clustering from_labels(std::vector<int> raw);
  std::vector<std::vector<int>> groups() const;
};

struct SphericalModel {
  std::vector<std::vector<double>> centroids;  // k x t unit vectors
  double objective = 0.0;                      // sum of cosines to own centroid
  int iterations_run = 0;
  std::vector<double> objective_trace;         // objective after each iteration
};

// COP-KMeans outcome: a clustering, or the point/iteration where no legal
// cluster existed. Failure is an expected value, not an exception.
struct CopResult {
  std::optional<Clustering> clustering;
  int blocking_point = -1;
  int iteration = -1;
  int attempts = 1;

  bool ok() const { return clustering.has_value(); }
};

double dot(const std::vector<double>& a, const std::vector<double>& b);
inline double cosine_distance(const std::vector<double>& a, const std::vector<double>& b) {
  return 1.0 - dot(a, b);
}
// Normalized mean of the selected rows; nullopt when the mean is zero.
std::optional<std::vector<double>> spherical_centroid(
    const std::vector<std::vector<double>>& rows, const std::vector<int>& members);

// Spherical k-means with k-means++ seeding (cosine-distance-squared
// weighting). The objective is non-decreasing across iterations.
std::pair<Clustering, SphericalModel> spherical_kmeans(const Lssr& lssr, int k,
                                                       std::uint64_t seed);

// COP-KMeans: each point goes to the most similar centroid that violates no
// must-link/cannot-link constraint against assignments made so far in the
// pass; a point with no legal cluster aborts the run.
CopResult cop_kmeans(const Lssr& lssr, int k, const ConstraintSet& constraints,
                     std::uint64_t seed);

// Up to `attempts` restarts with derived seeds before conceding failure.
CopResult cop_kmeans_retry(const Lssr& lssr, int k, const ConstraintSet& constraints,
                           std::uint64_t seed, int attempts = 10);

Clustering baseline_random(int n, std::uint64_t seed);
Clustering baseline_singleton(int n);

}  // namespace authclust

#endif
