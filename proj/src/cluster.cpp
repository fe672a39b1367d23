#include "authclust/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "authclust/rng.hpp"

namespace authclust {

Clustering Clustering::from_labels(std::vector<int> raw) {
  std::map<int, int> remap;
  for (int label : raw) remap.emplace(label, 0);
  int next = 0;
  for (auto& [_, dense] : remap) dense = next++;
  for (int& label : raw) label = remap[label];
  Clustering c;
  c.labels = std::move(raw);
  c.k = next;
  return c;
}

std::vector<std::vector<int>> Clustering::groups() const {
  std::vector<std::vector<int>> out(k);
  for (std::size_t i = 0; i < labels.size(); ++i)
    out[labels[i]].push_back(static_cast<int>(i));
  return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::optional<std::vector<double>> spherical_centroid(
    const std::vector<std::vector<double>>& rows, const std::vector<int>& members) {
  if (members.empty() || rows.empty()) return std::nullopt;
  std::vector<double> mean(rows[0].size(), 0.0);
  for (int i : members)
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += rows[i][j];
  double sq = 0.0;
  for (double x : mean) sq += x * x;
  if (sq <= 0.0) return std::nullopt;
  const double norm = std::sqrt(sq);
  for (double& x : mean) x /= norm;
  return mean;
}

namespace {

void require_unit_rows(const Lssr& lssr) {
  if (!lssr.normalized)
    throw std::invalid_argument("clustering requires an l2-normalized LSSR");
  for (const auto& row : lssr.matrix) {
    double sq = 0.0;
    for (double x : row) sq += x * x;
    if (std::abs(sq - 1.0) > 1e-6)
      throw std::invalid_argument("clustering input row is not unit-norm");
  }
}

// k-means++ over the unit sphere: the next seed is drawn with probability
// proportional to the squared cosine distance to the nearest chosen seed.
std::vector<std::vector<double>> kmeanspp_init(const std::vector<std::vector<double>>& x,
                                               int k, Rng& rng) {
  const int n = static_cast<int>(x.size());
  std::vector<std::vector<double>> centroids;
  centroids.reserve(k);
  centroids.push_back(x[rng.uniform_int(n)]);
  std::vector<double> d(n, 0.0);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double nearest = cosine_distance(x[i], centroids[0]);
      for (std::size_t m = 1; m < centroids.size(); ++m)
        nearest = std::min(nearest, cosine_distance(x[i], centroids[m]));
      d[i] = nearest * nearest;
      total += d[i];
    }
    if (total <= 0.0) {
      centroids.push_back(x[rng.uniform_int(n)]);
      continue;
    }
    double u = rng.uniform() * total;
    int pick = n - 1;
    for (int i = 0; i < n; ++i) {
      u -= d[i];
      if (u < 0.0) {
        pick = i;
        break;
      }
    }
    centroids.push_back(x[pick]);
  }
  return centroids;
}

constexpr int kMaxIterations = 300;

}  // namespace

std::pair<Clustering, SphericalModel> spherical_kmeans(const Lssr& lssr, int k,
                                                       std::uint64_t seed) {
  const int n = static_cast<int>(lssr.rows());
  if (k < 1 || k > n) throw std::invalid_argument("spherical_kmeans: k out of range");
  require_unit_rows(lssr);
  const auto& x = lssr.matrix;

  Rng rng(seed);
  SphericalModel model;
  model.centroids = kmeanspp_init(x, k, rng);

  std::vector<int> labels(n, -1), previous;
  double last_objective = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    previous = labels;
    // Assign to the most similar centroid; ties go to the lowest index.
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_dot = dot(x[i], model.centroids[0]);
      for (int c = 1; c < k; ++c) {
        const double s = dot(x[i], model.centroids[c]);
        if (s > best_dot) {
          best_dot = s;
          best = c;
        }
      }
      labels[i] = best;
    }

    // Reseed empty clusters at the point fitting its own centroid worst.
    std::vector<int> sizes(k, 0);
    for (int label : labels) ++sizes[label];
    for (int c = 0; c < k; ++c) {
      if (sizes[c] > 0) continue;
      int worst = -1;
      double worst_dot = std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i) {
        if (sizes[labels[i]] < 2) continue;
        const double s = dot(x[i], model.centroids[labels[i]]);
        if (s < worst_dot) {
          worst_dot = s;
          worst = i;
        }
      }
      if (worst < 0) continue;  // nothing movable
      --sizes[labels[worst]];
      labels[worst] = c;
      sizes[c] = 1;
      model.centroids[c] = x[worst];
    }

    // Update step: normalized means maximize the cosine objective.
    std::vector<std::vector<int>> members(k);
    for (int i = 0; i < n; ++i) members[labels[i]].push_back(i);
    for (int c = 0; c < k; ++c)
      if (auto centroid = spherical_centroid(x, members[c]))
        model.centroids[c] = std::move(*centroid);

    double objective = 0.0;
    for (int i = 0; i < n; ++i) objective += dot(x[i], model.centroids[labels[i]]);
    if (objective < last_objective - 1e-9)
      throw std::logic_error("spherical_kmeans: objective decreased");
    last_objective = objective;
    model.objective_trace.push_back(objective);
    model.iterations_run = iter + 1;

    if (labels == previous) break;
  }

  model.objective = last_objective;
  Clustering clustering = Clustering::from_labels(labels);
  // Drop centroids of clusters that ended empty so centroids match labels.
  if (clustering.k < k) {
    std::vector<std::vector<double>> kept;
    std::vector<bool> used(k, false);
    for (int label : labels) used[label] = true;
    for (int c = 0; c < k; ++c)
      if (used[c]) kept.push_back(std::move(model.centroids[c]));
    model.centroids = std::move(kept);
  }
  return {std::move(clustering), std::move(model)};
}

CopResult cop_kmeans(const Lssr& lssr, int k, const ConstraintSet& constraints,
                     std::uint64_t seed) {
  const int n = static_cast<int>(lssr.rows());
  if (k < 1 || k > n) throw std::invalid_argument("cop_kmeans: k out of range");
  require_unit_rows(lssr);
  const auto& x = lssr.matrix;

  // Partner lists per document.
  std::vector<std::vector<int>> ml(n), cl(n);
  for (const auto& [a, b] : constraints.ml) {
    ml[a].push_back(b);
    ml[b].push_back(a);
  }
  for (const auto& [a, b] : constraints.cl) {
    cl[a].push_back(b);
    cl[b].push_back(a);
  }

  Rng rng(seed);
  auto centroids = kmeanspp_init(x, k, rng);

  std::vector<int> labels(n, -1), previous(n, -2);
  std::vector<int> order(k);
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    std::fill(labels.begin(), labels.end(), -1);
    for (int i = 0; i < n; ++i) {
      std::iota(order.begin(), order.end(), 0);
      std::vector<double> sims(k);
      for (int c = 0; c < k; ++c) sims[c] = dot(x[i], centroids[c]);
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return sims[a] > sims[b]; });
      int chosen = -1;
      for (int c : order) {
        bool violates = false;
        for (int p : ml[i])
          if (labels[p] != -1 && labels[p] != c) {
            violates = true;
            break;
          }
        if (!violates)
          for (int p : cl[i])
            if (labels[p] == c) {
              violates = true;
              break;
            }
        if (!violates) {
          chosen = c;
          break;
        }
      }
      if (chosen == -1) {
        CopResult failure;
        failure.blocking_point = i;
        failure.iteration = iter;
        return failure;
      }
      labels[i] = chosen;
    }

    std::vector<std::vector<int>> members(k);
    for (int i = 0; i < n; ++i) members[labels[i]].push_back(i);
    for (int c = 0; c < k; ++c)
      if (auto centroid = spherical_centroid(x, members[c]))
        centroids[c] = std::move(*centroid);

    if (labels == previous) break;
    previous = labels;
  }

  CopResult result;
  result.clustering = Clustering::from_labels(labels);
  return result;
}

CopResult cop_kmeans_retry(const Lssr& lssr, int k, const ConstraintSet& constraints,
                           std::uint64_t seed, int attempts) {
  CopResult last;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    CopResult r = cop_kmeans(lssr, k, constraints, derive_seed(seed, "cop-retry", attempt));
    r.attempts = attempt + 1;
    if (r.ok()) return r;
    last = r;
  }
  return last;
}

Clustering baseline_random(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("baseline_random: n must be >= 1");
  Rng rng(seed);
  const int k = 1 + static_cast<int>(rng.uniform_int(n));
  std::vector<int> labels(n);
  for (int& label : labels) label = static_cast<int>(rng.uniform_int(k));
  return Clustering::from_labels(labels);
}

Clustering baseline_singleton(int n) {
  if (n < 1) throw std::invalid_argument("baseline_singleton: n must be >= 1");
  std::vector<int> labels(n);
  std::iota(labels.begin(), labels.end(), 0);
  return Clustering::from_labels(labels);
}

}  // namespace authclust
