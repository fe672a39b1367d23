#include "authclust/eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace authclust {

BCubed bcubed(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size() || pred.empty())
    throw std::invalid_argument("bcubed: partitions must cover the same documents");
  const int n = static_cast<int>(pred.size());

  // Joint cell sizes and marginals.
  std::map<std::pair<int, int>, int> joint;
  std::map<int, int> pred_size, truth_size;
  for (int i = 0; i < n; ++i) {
    ++joint[{pred[i], truth[i]}];
    ++pred_size[pred[i]];
    ++truth_size[truth[i]];
  }

  double precision = 0.0, recall = 0.0;
  for (int i = 0; i < n; ++i) {
    const int overlap = joint[{pred[i], truth[i]}];
    precision += static_cast<double>(overlap) / pred_size[pred[i]];
    recall += static_cast<double>(overlap) / truth_size[truth[i]];
  }
  BCubed out;
  out.precision = precision / n;
  out.recall = recall / n;
  out.f = out.precision + out.recall > 0.0
              ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
              : 0.0;
  return out;
}

double adjusted_rand_index(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size() || pred.empty())
    throw std::invalid_argument("adjusted_rand_index: partitions must cover the same documents");
  const long n = static_cast<long>(pred.size());
  if (n < 2) return 1.0;  // a single document has one possible partition

  std::map<std::pair<int, int>, long> joint;
  std::map<int, long> a, b;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ++joint[{pred[i], truth[i]}];
    ++a[pred[i]];
    ++b[truth[i]];
  }
  auto comb2 = [](long m) { return static_cast<double>(m) * (m - 1) / 2.0; };

  double index = 0.0;
  for (const auto& [_, count] : joint) index += comb2(count);
  double sum_a = 0.0, sum_b = 0.0;
  for (const auto& [_, count] : a) sum_a += comb2(count);
  for (const auto& [_, count] : b) sum_b += comb2(count);

  const double expected = sum_a * sum_b / comb2(n);
  const double maximum = 0.5 * (sum_a + sum_b);
  if (std::abs(maximum - expected) < 1e-12) return 1.0;  // both partitions trivial
  return (index - expected) / (maximum - expected);
}

double rmse_k(const std::vector<int>& estimates, const std::vector<int>& truths) {
  if (estimates.size() != truths.size())
    throw std::invalid_argument("rmse_k: length mismatch");
  if (estimates.empty()) throw std::invalid_argument("rmse_k: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const double d = estimates[i] - truths[i];
    sum += d * d;
  }
  return std::sqrt(sum / estimates.size());
}

std::map<std::string, double> mean_rank(
    const std::map<std::string, std::map<std::string, double>>& scores_by_method) {
  if (scores_by_method.empty()) throw std::invalid_argument("mean_rank: no methods");

  std::set<std::string> groups;
  for (const auto& [method, by_group] : scores_by_method)
    for (const auto& [group, _] : by_group) groups.insert(group);
  for (const auto& [method, by_group] : scores_by_method)
    for (const auto& group : groups)
      if (!by_group.count(group))
        throw std::invalid_argument("mean_rank: method " + method +
                                    " missing group " + group);

  std::map<std::string, double> totals;
  for (const auto& group : groups) {
    std::vector<std::pair<double, std::string>> scored;
    for (const auto& [method, by_group] : scores_by_method)
      scored.emplace_back(by_group.at(group), method);
    std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
      return x.first > y.first || (x.first == y.first && x.second < y.second);
    });
    // Tied scores share the mean of the ranks they span.
    std::size_t i = 0;
    while (i < scored.size()) {
      std::size_t j = i;
      while (j + 1 < scored.size() && scored[j + 1].first == scored[i].first) ++j;
      const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
      for (std::size_t m = i; m <= j; ++m) totals[scored[m].second] += shared;
      i = j + 1;
    }
  }
  for (auto& [_, total] : totals) total /= static_cast<double>(groups.size());
  return totals;
}

AggregateReport aggregate_report(
    const std::vector<EvalRecord>& per_problem,
    const std::map<std::string, std::string>& group_of_problem) {
  if (per_problem.empty()) throw std::invalid_argument("aggregate_report: no records");

  AggregateReport report;
  report.per_problem = per_problem;

  std::map<std::string, std::vector<int>> est_by_method, true_by_method;
  std::map<std::string, std::map<std::string, MethodAggregate>> group_method;
  for (const auto& record : per_problem) {
    if (record.failed) continue;
    auto group_it = group_of_problem.find(record.problem_id);
    const std::string group =
        group_it != group_of_problem.end() ? group_it->second : std::string("all");

    for (MethodAggregate* agg :
         {&report.overall[record.method], &group_method[group][record.method]}) {
      agg->b3_precision += record.b3_precision;
      agg->b3_recall += record.b3_recall;
      agg->b3_f += record.b3_f;
      agg->ari += record.ari;
      ++agg->problems;
    }
    if (record.k_true) {
      est_by_method[record.method].push_back(record.k_est);
      true_by_method[record.method].push_back(*record.k_true);
    }
  }

  auto finish = [](MethodAggregate& agg) {
    if (agg.problems == 0) return;
    agg.b3_precision /= agg.problems;
    agg.b3_recall /= agg.problems;
    agg.b3_f /= agg.problems;
    agg.ari /= agg.problems;
  };
  for (auto& [_, agg] : report.overall) finish(agg);
  for (auto& [group, methods] : group_method)
    for (auto& [_, agg] : methods) finish(agg);
  report.per_group = std::move(group_method);

  for (const auto& [method, estimates] : est_by_method)
    report.rmse_by_method[method] = rmse_k(estimates, true_by_method[method]);

  // Mean ranks need every method present in every group.
  if (report.overall.size() > 1) {
    std::map<std::string, std::map<std::string, double>> b3f, ari;
    bool complete = true;
    for (const auto& [method, _] : report.overall) {
      for (const auto& [group, methods] : report.per_group) {
        auto it = methods.find(method);
        if (it == methods.end()) {
          complete = false;
          break;
        }
        b3f[method][group] = it->second.b3_f;
        ari[method][group] = it->second.ari;
      }
      if (!complete) break;
    }
    if (complete) {
      report.mean_ranks_b3f = mean_rank(b3f);
      report.mean_ranks_ari = mean_rank(ari);
    }
  }
  return report;
}

}  // namespace authclust
