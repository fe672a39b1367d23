#include "authclust/kestimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "authclust/rng.hpp"

namespace authclust {

namespace {

double log_norm_cdf(double x) {
  if (x > -37.0) return std::log(0.5 * std::erfc(-x / M_SQRT2));
  // Asymptotic left tail: log phi(x) - log(-x).
  return -0.5 * x * x - 0.9189385332046727 - std::log(-x);
}

std::vector<std::vector<double>> cluster_centroids(const Lssr& lssr,
                                                   const Clustering& clustering) {
  std::vector<std::vector<double>> centroids(clustering.k);
  const auto members = clustering.groups();
  for (int c = 0; c < clustering.k; ++c) {
    auto centroid = spherical_centroid(lssr.matrix, members[c]);
    // Zero mean only happens for exactly antipodal members; fall back to the
    // first member's direction.
    centroids[c] = centroid ? std::move(*centroid) : lssr.matrix[members[c][0]];
  }
  return centroids;
}

double silhouette_score(const Lssr& lssr, const Clustering& clustering) {
  const int n = static_cast<int>(lssr.rows());
  const auto& x = lssr.matrix;
  const auto& labels = clustering.labels;
  std::vector<int> sizes(clustering.k, 0);
  for (int label : labels) ++sizes[label];

  double total = 0.0;
  std::vector<double> sums(clustering.k, 0.0);
  for (int i = 0; i < n; ++i) {
    if (sizes[labels[i]] <= 1) continue;  // singleton: silhouette term 0
    std::fill(sums.begin(), sums.end(), 0.0);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      sums[labels[j]] += cosine_distance(x[i], x[j]);
    }
    const double a = sums[labels[i]] / (sizes[labels[i]] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < clustering.k; ++c) {
      if (c == labels[i] || sizes[c] == 0) continue;
      b = std::min(b, sums[c] / sizes[c]);
    }
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / n;
}

double calinski_harabasz_score(const Lssr& lssr, const Clustering& clustering) {
  const int n = static_cast<int>(lssr.rows());
  const int k = clustering.k;
  const auto centroids = cluster_centroids(lssr, clustering);
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  const auto global = spherical_centroid(lssr.matrix, all);
  if (!global) return 0.0;

  double within = 0.0;
  for (int i = 0; i < n; ++i)
    within += cosine_distance(lssr.matrix[i], centroids[clustering.labels[i]]);
  double between = 0.0;
  std::vector<int> sizes(k, 0);
  for (int label : clustering.labels) ++sizes[label];
  for (int c = 0; c < k; ++c)
    between += sizes[c] * cosine_distance(centroids[c], *global);

  if (within <= 1e-12 || n == k)
    return between <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
  return (between / (k - 1)) / (within / (n - k));
}

double davies_bouldin_score(const Lssr& lssr, const Clustering& clustering) {
  const int k = clustering.k;
  const auto centroids = cluster_centroids(lssr, clustering);
  const auto members = clustering.groups();

  std::vector<double> scatter(k, 0.0);
  for (int c = 0; c < k; ++c) {
    for (int i : members[c]) scatter[c] += cosine_distance(lssr.matrix[i], centroids[c]);
    scatter[c] /= members[c].size();
  }

  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    double worst = 0.0;
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      const double sep = cosine_distance(centroids[i], centroids[j]);
      const double mix = scatter[i] + scatter[j];
      double r;
      if (sep > 1e-12)
        r = mix / sep;
      else
        r = mix <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
      worst = std::max(worst, r);
    }
    total += worst;
  }
  return total / k;
}

}  // namespace

double intrinsic_score(const Lssr& lssr, const Clustering& clustering,
                       IntrinsicMetric metric) {
  if (clustering.labels.size() != lssr.rows())
    throw std::invalid_argument("intrinsic_score: clustering size mismatch");
  if (clustering.k < 2)
    throw std::invalid_argument("intrinsic_score: need at least 2 clusters");
  switch (metric) {
    case IntrinsicMetric::Silhouette: return silhouette_score(lssr, clustering);
    case IntrinsicMetric::CalinskiHarabasz: return calinski_harabasz_score(lssr, clustering);
    case IntrinsicMetric::DaviesBouldin: return davies_bouldin_score(lssr, clustering);
  }
  throw std::logic_error("intrinsic_score: unknown metric");
}

double anderson_darling_pvalue(std::vector<double> standardized) {
  const int n = static_cast<int>(standardized.size());
  if (n < 2) return 1.0;
  std::sort(standardized.begin(), standardized.end());
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double log_cdf = log_norm_cdf(standardized[i]);
    const double log_sf = log_norm_cdf(-standardized[n - 1 - i]);
    s += (2.0 * (i + 1) - 1.0) * (log_cdf + log_sf);
  }
  const double a2 = -n - s / n;
  const double adj = a2 * (1.0 + 4.0 / n - 25.0 / (static_cast<double>(n) * n));
  double p;
  if (adj >= 0.6)
    p = std::exp(1.2937 - 5.709 * adj + 0.0186 * adj * adj);
  else if (adj >= 0.34)
    p = std::exp(0.9177 - 4.279 * adj - 1.38 * adj * adj);
  else if (adj >= 0.2)
    p = 1.0 - std::exp(-8.318 + 42.796 * adj - 59.938 * adj * adj);
  else
    p = 1.0 - std::exp(-13.436 + 101.14 * adj - 223.73 * adj * adj);
  return std::clamp(p, 0.0, 1.0);
}

namespace {

Lssr subset_lssr(const Lssr& lssr, const std::vector<int>& rows) {
  Lssr sub;
  sub.normalized = lssr.normalized;
  sub.matrix.reserve(rows.size());
  for (int i : rows) {
    sub.matrix.push_back(lssr.matrix[i]);
    if (!lssr.doc_ids.empty()) sub.doc_ids.push_back(lssr.doc_ids[i]);
  }
  return sub;
}

// Tibshirani pooled within-cluster dispersion with cosine distances:
// sum over clusters of (pairwise distance sum) / (2 * cluster size).
double within_dispersion(const Lssr& lssr, const Clustering& clustering) {
  double w = 0.0;
  for (const auto& members : clustering.groups()) {
    double pair_sum = 0.0;
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b)
        pair_sum += 2.0 * cosine_distance(lssr.matrix[members[a]], lssr.matrix[members[b]]);
    w += pair_sum / (2.0 * members.size());
  }
  return w;
}

}  // namespace

KEstimate estimate_k_gmeans(const Lssr& lssr, double significance, std::uint64_t seed) {
  const int n = static_cast<int>(lssr.rows());
  if (n < 2) throw std::invalid_argument("estimate_k_gmeans: need n >= 2");

  std::vector<std::vector<int>> pending, accepted;
  {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    pending.push_back(std::move(all));
  }
  int split_counter = 0;
  while (!pending.empty()) {
    std::vector<int> members = std::move(pending.back());
    pending.pop_back();

    const auto accept = [&] { accepted.push_back(members); };
    if (static_cast<int>(accepted.size() + pending.size()) + 1 >= n ||
        members.size() < 8) {
      accept();
      continue;
    }

    const Lssr sub = subset_lssr(lssr, members);
    auto [split, model] =
        spherical_kmeans(sub, 2, derive_seed(seed, "gmeans-split", split_counter++));
    if (split.k < 2) {
      accept();
      continue;
    }

    // Project onto the axis between the two child centroids.
    std::vector<double> axis(model.centroids[0]);
    for (std::size_t j = 0; j < axis.size(); ++j) axis[j] -= model.centroids[1][j];
    std::vector<double> projection(members.size());
    for (std::size_t i = 0; i < members.size(); ++i)
      projection[i] = dot(sub.matrix[i], axis);

    double mean = 0.0;
    for (double v : projection) mean += v;
    mean /= projection.size();
    double var = 0.0;
    for (double v : projection) var += (v - mean) * (v - mean);
    var /= (projection.size() - 1);
    if (var <= 1e-24) {
      accept();
      continue;
    }
    const double sd = std::sqrt(var);
    for (double& v : projection) v = (v - mean) / sd;

    if (anderson_darling_pvalue(projection) < significance) {
      std::vector<int> left, right;
      for (std::size_t i = 0; i < members.size(); ++i)
        (split.labels[i] == 0 ? left : right).push_back(members[i]);
      pending.push_back(std::move(left));
      pending.push_back(std::move(right));
    } else {
      accept();
    }
  }

  KEstimate est;
  est.method = KMethod::Gmeans;
  est.k = static_cast<int>(accepted.size());
  return est;
}

KEstimate estimate_k_gap(const Lssr& lssr, int k_max, int b_refs, std::uint64_t seed) {
  const int n = static_cast<int>(lssr.rows());
  if (k_max < 1 || k_max > n) throw std::invalid_argument("estimate_k_gap: bad k_max");
  if (b_refs < 1) throw std::invalid_argument("estimate_k_gap: need b_refs >= 1");
  const std::size_t dims = lssr.dims();

  // Feature-wise bounding box of the data.
  std::vector<double> lo(dims, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dims, -std::numeric_limits<double>::infinity());
  for (const auto& row : lssr.matrix)
    for (std::size_t j = 0; j < dims; ++j) {
      lo[j] = std::min(lo[j], row[j]);
      hi[j] = std::max(hi[j], row[j]);
    }

  // Reference sets: uniform in the box, pushed back onto the unit sphere.
  std::vector<Lssr> refs(b_refs);
  for (int b = 0; b < b_refs; ++b) {
    Rng rng(derive_seed(seed, "gap-ref", b));
    refs[b].normalized = true;
    refs[b].matrix.assign(n, std::vector<double>(dims, 0.0));
    for (int i = 0; i < n; ++i) {
      double sq = 0.0;
      do {
        sq = 0.0;
        for (std::size_t j = 0; j < dims; ++j) {
          refs[b].matrix[i][j] = lo[j] + (hi[j] - lo[j]) * rng.uniform();
          sq += refs[b].matrix[i][j] * refs[b].matrix[i][j];
        }
      } while (sq <= 1e-24);
      const double norm = std::sqrt(sq);
      for (double& x : refs[b].matrix[i]) x /= norm;
    }
  }

  GapCurve curve;
  curve.b_refs = b_refs;
  constexpr double kTinyW = 1e-12;
  for (int k = 1; k <= k_max; ++k) {
    auto [clustering, model] =
        spherical_kmeans(lssr, k, derive_seed(seed, "gap-data", k));
    (void)model;
    const double log_wk = std::log(std::max(within_dispersion(lssr, clustering), kTinyW));

    double mean_ref = 0.0;
    std::vector<double> ref_logs(b_refs);
    for (int b = 0; b < b_refs; ++b) {
      auto [ref_clustering, ref_model] =
          spherical_kmeans(refs[b], k, derive_seed(seed, "gap-ref-cluster",
                                                   static_cast<std::uint64_t>(b) * 1000 + k));
      (void)ref_model;
      ref_logs[b] = std::log(std::max(within_dispersion(refs[b], ref_clustering), kTinyW));
      mean_ref += ref_logs[b];
    }
    mean_ref /= b_refs;
    double sd = 0.0;
    for (double v : ref_logs) sd += (v - mean_ref) * (v - mean_ref);
    sd = std::sqrt(sd / b_refs);

    curve.ks.push_back(k);
    curve.log_wk.push_back(log_wk);
    curve.expected_log_wk.push_back(mean_ref);
    curve.gap.push_back(mean_ref - log_wk);
    curve.s.push_back(sd * std::sqrt(1.0 + 1.0 / b_refs));
  }

  KEstimate est;
  est.method = KMethod::Gap;
  est.k = k_max;
  for (int i = 0; i + 1 < static_cast<int>(curve.gap.size()); ++i) {
    if (curve.gap[i] >= curve.gap[i + 1] - curve.s[i + 1]) {
      est.k = curve.ks[i];
      break;
    }
  }
  est.gap_curve = std::move(curve);
  return est;
}

int average_k_estimates(int gmeans_k, int gap_k, int n) {
  const int rounded = static_cast<int>(std::floor((gmeans_k + gap_k) / 2.0 + 0.5));
  return std::clamp(rounded, 2, n);
}

KEstimate estimate_k_unsupervised(const Lssr& lssr, std::uint64_t seed,
                                  const KEstimateOptions& options) {
  const int n = static_cast<int>(lssr.rows());
  if (n < 2) throw std::invalid_argument("estimate_k_unsupervised: need n >= 2");
  const int k_max = options.gap_k_max > 0 ? options.gap_k_max : std::min(n - 1, 10);

  const KEstimate gmeans =
      estimate_k_gmeans(lssr, options.gmeans_significance, derive_seed(seed, "gmeans"));
  const KEstimate gap =
      estimate_k_gap(lssr, k_max, options.gap_b_refs, derive_seed(seed, "gap"));

  KEstimate est;
  est.method = KMethod::Averaged;
  est.gmeans_k = gmeans.k;
  est.gap_k = gap.k;
  est.gap_curve = gap.gap_curve;
  est.k = average_k_estimates(gmeans.k, gap.k, n);
  return est;
}

KEstimate estimate_k_constrained(const Lssr& lssr, const ConstraintSet& constraints,
                                 std::uint64_t seed) {
  const int n = static_cast<int>(lssr.rows());
  KEstimate est;
  est.method = KMethod::ConstrainedGrid;

  double best_score = std::numeric_limits<double>::infinity();
  for (int k = 2; k <= n - 1; ++k) {
    if (!check_feasible(constraints, k, n)) {
      est.grid_failures.push_back(k);
      continue;
    }
    CopResult result =
        cop_kmeans_retry(lssr, k, constraints, derive_seed(seed, "grid", k));
    if (!result.ok() || result.clustering->k < 2) {
      est.grid_failures.push_back(k);
      continue;
    }
    const double score =
        intrinsic_score(lssr, *result.clustering, IntrinsicMetric::DaviesBouldin) * k;
    est.grid_scores[k] = score;
    if (score < best_score) {
      best_score = score;
      est.k = k;
      est.grid_best = std::move(result.clustering);
    }
  }
  if (est.k == 0)
    throw std::runtime_error("estimate_k_constrained: no feasible k in [2, n-1]");
  return est;
}

}  // namespace authclust
