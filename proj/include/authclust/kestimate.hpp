#ifndef AUTHCLUST_KESTIMATE_HPP
#define AUTHCLUST_KESTIMATE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "authclust/cluster.hpp"

namespace authclust {

enum class KMethod { Gmeans, Gap, Intrinsic, Averaged, ConstrainedGrid };

enum class IntrinsicMetric { Silhouette, CalinskiHarabasz, DaviesBouldin };

struct GapCurve {
  std::vector<int> ks;
  std::vector<double> log_wk;
  std::vector<double> expected_log_wk;
  std::vector<double> gap;
  std::vector<double> s;
  int b_refs = 0;
};

struct KEstimate {
  int k = 0;
  KMethod method = KMethod::Averaged;
  int gmeans_k = -1;                    // inputs of the averaged estimate
  int gap_k = -1;
  std::optional<GapCurve> gap_curve;
  std::map<int, double> grid_scores;    // constrained grid: k -> DBI * k
  std::vector<int> grid_failures;       // ks where COP-KMeans failed
  std::optional<Clustering> grid_best;  // winning constrained clustering
};

struct KEstimateOptions {
  double gmeans_significance = 0.0001;
  int gap_b_refs = 10;
  int gap_k_max = 0;  // 0: min(n - 1, 10)
};

// Intrinsic cluster-quality index under cosine distance with spherical
// centroids. Requires at least 2 clusters.
double intrinsic_score(const Lssr& lssr, const Clustering& clustering,
                       IntrinsicMetric metric);

// Adjusted Anderson-Darling normality statistic (mean/variance estimated)
// mapped to an approximate p-value. Exposed for tests.
double anderson_darling_pvalue(std::vector<double> standardized);

KEstimate estimate_k_gmeans(const Lssr& lssr, double significance, std::uint64_t seed);
KEstimate estimate_k_gap(const Lssr& lssr, int k_max, int b_refs, std::uint64_t seed);

// Arithmetic mean of the two estimates, rounded half up, clamped to [2, n].
int average_k_estimates(int gmeans_k, int gap_k, int n);

// Mean of the G-means and Gap estimates per average_k_estimates.
KEstimate estimate_k_unsupervised(const Lssr& lssr, std::uint64_t seed,
                                  const KEstimateOptions& options = {});
// Grid search over [2, n-1] minimizing DBI * k among ks where COP-KMeans
// succeeds.
KEstimate estimate_k_constrained(const Lssr& lssr, const ConstraintSet& constraints,
                                 std::uint64_t seed);

}  // namespace authclust

#endif
