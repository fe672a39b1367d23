#include "authclust/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "authclust/lssr.hpp"
#include "authclust/rng.hpp"
#include "json.hpp"

namespace authclust {

namespace fs = std::filesystem;
using nlohmann::json;

void RunConfig::validate() const {
  if (sp_runs < 1) throw std::invalid_argument("run config: sp_runs must be >= 1");
  if (constraint_ratio < 0.0 || constraint_ratio > 1.0)
    throw std::invalid_argument("run config: constraint ratio must be in [0, 1]");
  if (workers < 1) throw std::invalid_argument("run config: workers must be >= 1");
  static const std::set<std::string> known = {"spkmeans", "cop_kmeans", "bl_r", "bl_s"};
  for (const auto& m : methods)
    if (!known.count(m)) throw std::invalid_argument("run config: unknown method " + m);
  hdp.validate();
}

namespace {

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

std::uint64_t method_seed(const RunConfig& cfg, const std::string& problem_id,
                          const std::string& method, std::uint64_t run_index = 0) {
  return derive_seed(cfg.master_seed, problem_id + "/" + method, run_index);
}

json clusters_entry(const std::string& method, const Clustering& clustering,
                    const std::vector<std::string>& doc_ids, std::uint64_t seed) {
  json entry;
  entry["method"] = method;
  entry["k"] = clustering.k;
  json groups = json::array();
  for (const auto& members : clustering.groups()) {
    json cluster = json::array();
    for (int i : members) cluster.push_back(doc_ids.at(i));
    groups.push_back(std::move(cluster));
  }
  entry["clusters"] = std::move(groups);
  entry["seed"] = seed;
  return entry;
}

EvalRecord make_record(const std::string& problem_id, const std::string& method,
                       const Clustering& pred, const std::vector<int>& truth_labels,
                       std::optional<int> k_true) {
  EvalRecord record;
  record.problem_id = problem_id;
  record.method = method;
  const BCubed b3 = bcubed(pred.labels, truth_labels);
  record.b3_precision = b3.precision;
  record.b3_recall = b3.recall;
  record.b3_f = b3.f;
  record.ari = adjusted_rand_index(pred.labels, truth_labels);
  record.k_est = pred.k;
  record.k_true = k_true;
  return record;
}

}  // namespace

ProblemOutcome run_problem(ProblemSet& problem, const RunConfig& cfg) {
  cfg.validate();
  const std::string& pid = problem.problem_id;
  const auto doc_ids = problem.doc_ids();
  const int n = static_cast<int>(problem.size());

  const bool needs_truth =
      cfg.methods.count("cop_kmeans") > 0 || cfg.k_mode == KMode::True;
  if (needs_truth && !problem.truth)
    throw CorpusError(pid + ": ground truth required for the requested configuration");

  DocTermMatrix dtm = vectorize(problem, cfg.lowercase);

  HdpConfig hdp_cfg = cfg.hdp;
  hdp_cfg.seed = derive_seed(cfg.master_seed, pid + "/hdp");
  const TopicPosterior posterior = run_sampler(dtm, hdp_cfg);

  const Lssr raw = build_lssr(posterior, doc_ids);
  const Lssr lssr = l2_normalize(raw);

  std::optional<std::vector<int>> truth_labels;
  std::optional<int> true_k;
  if (problem.truth) {
    truth_labels = problem.truth->labels_for(doc_ids);
    true_k = problem.truth->cluster_count();
  }

  fs::path problem_dir;
  if (!cfg.out_dir.empty()) {
    problem_dir = cfg.out_dir / pid;
    fs::create_directories(problem_dir);
    write_lssr_raw(problem_dir / "lssr_raw.tsv", posterior, doc_ids);
    write_lssr_l2(problem_dir / "lssr_l2.tsv", lssr);
    write_topics_tsv(problem_dir / "topics.tsv", posterior, dtm.vocabulary);
    write_ll_trace(problem_dir / "ll_trace.csv", posterior);
  }

  ProblemOutcome outcome;
  outcome.problem_id = pid;
  json clusters_json = json::array();

  // Unsupervised estimates: one per SPKMeans run in estimated mode, a single
  // diagnostic pass otherwise. The reported value is the rounded mean.
  std::vector<KEstimate> unsup_estimates;
  const bool run_spk = cfg.methods.count("spkmeans") > 0;
  const int estimate_passes = cfg.k_mode == KMode::Estimated && run_spk ? cfg.sp_runs : 1;
  for (int r = 0; r < estimate_passes; ++r)
    unsup_estimates.push_back(estimate_k_unsupervised(
        lssr, derive_seed(method_seed(cfg, pid, "spkmeans", r), "estimate"), cfg.kopts));
  double gmeans_mean = 0.0, gap_mean = 0.0, averaged_mean = 0.0;
  for (const auto& est : unsup_estimates) {
    gmeans_mean += est.gmeans_k;
    gap_mean += est.gap_k;
    averaged_mean += est.k;
  }
  gmeans_mean /= unsup_estimates.size();
  gap_mean /= unsup_estimates.size();
  averaged_mean /= unsup_estimates.size();

  if (run_spk) {
    double p = 0.0, rcl = 0.0, f = 0.0, ari_sum = 0.0, k_mean = 0.0;
    std::optional<Clustering> first_run;
    for (int r = 0; r < cfg.sp_runs; ++r) {
      const std::uint64_t run_seed = method_seed(cfg, pid, "spkmeans", r);
      const int k = cfg.k_mode == KMode::True
                        ? *true_k
                        : unsup_estimates[std::min<std::size_t>(r, unsup_estimates.size() - 1)].k;
      auto [clustering, model] =
          spherical_kmeans(lssr, std::min(k, n), derive_seed(run_seed, "cluster"));
      (void)model;
      k_mean += k;
      if (truth_labels) {
        const EvalRecord rec = make_record(pid, "spkmeans", clustering, *truth_labels, true_k);
        p += rec.b3_precision;
        rcl += rec.b3_recall;
        f += rec.b3_f;
        ari_sum += rec.ari;
      }
      if (r == 0) first_run = std::move(clustering);
    }
    if (truth_labels) {
      EvalRecord rec;
      rec.problem_id = pid;
      rec.method = "spkmeans";
      rec.b3_precision = p / cfg.sp_runs;
      rec.b3_recall = rcl / cfg.sp_runs;
      rec.b3_f = f / cfg.sp_runs;
      rec.ari = ari_sum / cfg.sp_runs;
      rec.k_est = round_half_up(k_mean / cfg.sp_runs);
      rec.k_true = true_k;
      outcome.records.push_back(rec);
    }
    clusters_json.push_back(clusters_entry("spkmeans", *first_run, doc_ids,
                                           method_seed(cfg, pid, "spkmeans", 0)));
  }

  std::optional<ConstraintSet> constraints;
  std::optional<int> constrained_k;
  if (cfg.methods.count("cop_kmeans")) {
    constraints = derive_constraints(*truth_labels, cfg.constraint_ratio,
                                     derive_seed(cfg.master_seed, pid + "/constraints"));
    if (!problem_dir.empty())
      write_constraints_json(problem_dir / "constraints.json", *constraints, doc_ids);

    const std::uint64_t cop_seed = method_seed(cfg, pid, "cop_kmeans");
    std::optional<Clustering> result;
    int requested_k = 0;
    try {
      if (cfg.k_mode == KMode::True) {
        requested_k = *true_k;
        CopResult r = cop_kmeans_retry(lssr, requested_k, *constraints, cop_seed);
        if (r.ok()) result = std::move(r.clustering);
      } else {
        KEstimate est = estimate_k_constrained(lssr, *constraints, cop_seed);
        constrained_k = est.k;
        requested_k = est.k;
        result = std::move(est.grid_best);
      }
    } catch (const std::runtime_error&) {
      // no feasible k: recorded as a failed (null) result below
    }
    if (result) {
      constrained_k = requested_k;
      outcome.records.push_back(
          make_record(pid, "cop_kmeans", *result, *truth_labels, true_k));
      clusters_json.push_back(clusters_entry("cop_kmeans", *result, doc_ids, cop_seed));
    } else {
      EvalRecord rec;
      rec.problem_id = pid;
      rec.method = "cop_kmeans";
      rec.failed = true;
      rec.k_true = true_k;
      outcome.records.push_back(rec);
    }
  }

  if (cfg.methods.count("bl_r")) {
    const std::uint64_t seed = method_seed(cfg, pid, "bl_r");
    const Clustering clustering = baseline_random(n, seed);
    if (truth_labels)
      outcome.records.push_back(make_record(pid, "bl_r", clustering, *truth_labels, true_k));
    clusters_json.push_back(clusters_entry("bl_r", clustering, doc_ids, seed));
  }
  if (cfg.methods.count("bl_s")) {
    const Clustering clustering = baseline_singleton(n);
    if (truth_labels)
      outcome.records.push_back(make_record(pid, "bl_s", clustering, *truth_labels, true_k));
    clusters_json.push_back(
        clusters_entry("bl_s", clustering, doc_ids, method_seed(cfg, pid, "bl_s")));
  }

  if (!problem_dir.empty()) {
    {
      std::ofstream out(problem_dir / "clusters.json");
      out << clusters_json.dump(2) << "\n";
    }
    json k_report;
    k_report["gmeans"] = round_half_up(gmeans_mean);
    k_report["gap"] = round_half_up(gap_mean);
    k_report["averaged"] = round_half_up(averaged_mean);
    k_report["constrained"] = constrained_k ? json(*constrained_k) : json(nullptr);
    k_report["true_k"] = true_k ? json(*true_k) : json(nullptr);
    json curve = json::array();
    if (unsup_estimates.front().gap_curve) {
      const GapCurve& gc = *unsup_estimates.front().gap_curve;
      for (std::size_t i = 0; i < gc.ks.size(); ++i) {
        curve.push_back({{"k", gc.ks[i]},
                         {"log_wk", gc.log_wk[i]},
                         {"expected_log_wk", gc.expected_log_wk[i]},
                         {"gap", gc.gap[i]},
                         {"s", gc.s[i]}});
      }
    }
    k_report["gap_curve"] = std::move(curve);
    std::ofstream out(problem_dir / "k_report.json");
    out << k_report.dump(2) << "\n";
  }
  return outcome;
}

CollectionResult run_collection(const fs::path& root, const RunConfig& cfg) {
  cfg.validate();
  if (!fs::is_directory(root))
    throw std::runtime_error("missing collection root: " + root.string());

  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) throw std::runtime_error("no problem directories under " + root.string());

  CollectionResult result;
  const fs::path manifest = root / "groups.json";
  if (fs::exists(manifest)) {
    std::ifstream in(manifest);
    json j = json::parse(in);
    for (const auto& [key, value] : j.items())
      result.groups[key] = value.get<std::string>();
  }

  std::vector<std::optional<ProblemOutcome>> outcomes(dirs.size());
  std::vector<std::optional<std::string>> errors(dirs.size());
  std::atomic<std::size_t> next{0};
  const int workers = std::min<int>(cfg.workers, static_cast<int>(dirs.size()));

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= dirs.size()) return;
      const auto started = std::chrono::steady_clock::now();
      try {
        ProblemSet problem = load_problem_set(dirs[i], cfg.truth_format);
        outcomes[i] = run_problem(problem, cfg);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        std::fprintf(stderr, "[%s] done in %.1fs\n", problem.problem_id.c_str(), secs);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  std::vector<EvalRecord> records;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    if (errors[i]) {
      result.failures.emplace_back(dirs[i].filename().string(), *errors[i]);
    } else if (outcomes[i]) {
      for (const auto& rec : outcomes[i]->records) records.push_back(rec);
    }
  }
  if (records.empty() && !result.failures.empty())
    throw std::runtime_error("every problem failed; first error: " +
                             result.failures.front().second);

  if (!records.empty())
    result.report = aggregate_report(records, result.groups);

  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    write_report_json(cfg.out_dir / "report.json", result.report, result.failures);
    write_report_csv(cfg.out_dir / "report.csv", result.report);
  }
  return result;
}

namespace {

json aggregate_to_json(const MethodAggregate& agg) {
  return {{"b3_p", agg.b3_precision},
          {"b3_r", agg.b3_recall},
          {"b3_f", agg.b3_f},
          {"ari", agg.ari},
          {"problems", agg.problems}};
}

json record_to_json(const EvalRecord& rec) {
  json j;
  j["problem_id"] = rec.problem_id;
  j["method"] = rec.method;
  if (rec.failed) {
    j["failed"] = true;
  } else {
    j["b3_p"] = rec.b3_precision;
    j["b3_r"] = rec.b3_recall;
    j["b3_f"] = rec.b3_f;
    j["ari"] = rec.ari;
    j["k_est"] = rec.k_est;
  }
  j["k_true"] = rec.k_true ? json(*rec.k_true) : json(nullptr);
  return j;
}

}  // namespace

void write_report_json(const fs::path& file, const AggregateReport& report,
                       const std::vector<std::pair<std::string, std::string>>& failures) {
  json j;
  j["problems"] = json::array();
  for (const auto& rec : report.per_problem) j["problems"].push_back(record_to_json(rec));

  json overall = json::object();
  for (const auto& [method, agg] : report.overall) overall[method] = aggregate_to_json(agg);
  json per_group = json::object();
  for (const auto& [group, methods] : report.per_group) {
    json m = json::object();
    for (const auto& [method, agg] : methods) m[method] = aggregate_to_json(agg);
    per_group[group] = std::move(m);
  }
  j["aggregate"] = {{"overall", std::move(overall)},
                    {"per_group", std::move(per_group)},
                    {"mean_ranks", {{"b3f", report.mean_ranks_b3f},
                                    {"ari", report.mean_ranks_ari}}},
                    {"rmse_k", report.rmse_by_method}};

  json errs = json::array();
  for (const auto& [pid, message] : failures)
    errs.push_back({{"problem_id", pid}, {"error", message}});
  j["errors"] = std::move(errs);

  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << j.dump(2) << "\n";
}

void write_report_csv(const fs::path& file, const AggregateReport& report) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << "problem_id,method,b3_p,b3_r,b3_f,ari,k_est,k_true\n";
  char buf[256];
  for (const auto& rec : report.per_problem) {
    if (rec.failed) {
      std::snprintf(buf, sizeof buf, "%s,%s,,,,,,%s\n", rec.problem_id.c_str(),
                    rec.method.c_str(),
                    rec.k_true ? std::to_string(*rec.k_true).c_str() : "");
      out << buf;
      continue;
    }
    std::snprintf(buf, sizeof buf, "%s,%s,%.12g,%.12g,%.12g,%.12g,%d,%s\n",
                  rec.problem_id.c_str(), rec.method.c_str(), rec.b3_precision,
                  rec.b3_recall, rec.b3_f, rec.ari, rec.k_est,
                  rec.k_true ? std::to_string(*rec.k_true).c_str() : "");
    out << buf;
  }
}

}  // namespace authclust
