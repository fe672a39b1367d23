#ifndef AUTHCLUST_PIPELINE_HPP
#define AUTHCLUST_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "authclust/corpus.hpp"
#include "authclust/eval.hpp"
#include "authclust/hdp.hpp"
#include "authclust/kestimate.hpp"

namespace authclust {

enum class KMode { Estimated, True };

struct RunConfig {
  std::uint64_t master_seed = 42;
  HdpConfig hdp;  // sparse preset, desk-scale iterations
  double constraint_ratio = 0.12;
  int sp_runs = 5;
  KMode k_mode = KMode::Estimated;
  std::set<std::string> methods = {"spkmeans", "cop_kmeans", "bl_r", "bl_s"};
  int workers = 1;
  std::filesystem::path out_dir;  // empty: no artifacts persisted
  TruthFormat truth_format = TruthFormat::Native;
  bool lowercase = true;
  KEstimateOptions kopts;

  void validate() const;
};

struct ProblemOutcome {
  std::string problem_id;
  std::vector<EvalRecord> records;  // per requested method; empty without truth
};

// Full per-problem pass: vectorize -> HDP -> LSSR -> k estimation ->
// clustering per method -> evaluation. Artifacts are written under
// cfg.out_dir/<problem_id>/ when an output directory is configured.
ProblemOutcome run_problem(ProblemSet& problem, const RunConfig& cfg);

struct CollectionResult {
  AggregateReport report;
  std::map<std::string, std::string> groups;            // problem -> group tag
  std::vector<std::pair<std::string, std::string>> failures;  // (problem, error)
};

// Runs every problem directory under root (optionally in parallel), groups
// via a groups.json manifest when present, and writes report.json and
// report.csv. Results are deterministic for a given master seed regardless
// of worker count.
CollectionResult run_collection(const std::filesystem::path& root, const RunConfig& cfg);

void write_report_json(const std::filesystem::path& file, const AggregateReport& report,
                       const std::vector<std::pair<std::string, std::string>>& failures);
void write_report_csv(const std::filesystem::path& file, const AggregateReport& report);

}  // namespace authclust

#endif
