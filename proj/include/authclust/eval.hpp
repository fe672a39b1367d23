#ifndef AUTHCLUST_EVAL_HPP
#define AUTHCLUST_EVAL_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "authclust/cluster.hpp"

namespace authclust {

struct BCubed {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

// Per-item B-cubed precision/recall averaged over items; F is the harmonic
// mean of the two averages.
BCubed bcubed(const std::vector<int>& pred, const std::vector<int>& truth);

// Pair-counting agreement adjusted for chance under the permutation model.
double adjusted_rand_index(const std::vector<int>& pred, const std::vector<int>& truth);

double rmse_k(const std::vector<int>& estimates, const std::vector<int>& truths);

// Per-group ranks (1 = best, descending score, ties share the mean rank),
// averaged across groups.
std::map<std::string, double> mean_rank(
    const std::map<std::string, std::map<std::string, double>>& scores_by_method);

struct EvalRecord {
  std::string problem_id;
  std::string method;
  bool failed = false;  // e.g. COP-KMeans infeasible for every k
  double b3_precision = 0.0;
  double b3_recall = 0.0;
  double b3_f = 0.0;
  double ari = 0.0;
  int k_est = 0;
  std::optional<int> k_true;
};

struct MethodAggregate {
  double b3_precision = 0.0;
  double b3_recall = 0.0;
  double b3_f = 0.0;
  double ari = 0.0;
  int problems = 0;
};

struct AggregateReport {
  std::vector<EvalRecord> per_problem;
  std::map<std::string, MethodAggregate> overall;                      // by method
  std::map<std::string, std::map<std::string, MethodAggregate>> per_group;  // group -> method
  std::map<std::string, double> mean_ranks_b3f;
  std::map<std::string, double> mean_ranks_ari;
  std::map<std::string, double> rmse_by_method;
};

// Unweighted means per method and per (group, method); mean ranks over
// groups when several methods are present; RMSE of k where truth is known.
AggregateReport aggregate_report(const std::vector<EvalRecord>& per_problem,
                                 const std::map<std::string, std::string>& group_of_problem);

}  // namespace authclust

#endif
