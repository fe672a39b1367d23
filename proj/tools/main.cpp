// cluster-authors: authorial clustering of short texts in a latent topic
// space. Subcommands expose the full pipeline plus its individual stages.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "authclust/pipeline.hpp"
#include "authclust/lssr.hpp"
#include "authclust/rng.hpp"

using namespace authclust;
using nlohmann::json;

namespace {

struct HdpFlags {
  int iterations = 2000;
  double eta = 0.3;
  double gamma_shape = 0.1, gamma_scale = 1.0;
  double alpha_shape = 0.1, alpha_scale = 1.0;
  bool sample_average = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--iterations", iterations, "Gibbs sweeps (paper scale: 10000)");
    cmd->add_option("--eta", eta, "topic Dirichlet prior");
    cmd->add_option("--gamma-shape", gamma_shape);
    cmd->add_option("--gamma-scale", gamma_scale);
    cmd->add_option("--alpha-shape", alpha_shape);
    cmd->add_option("--alpha-scale", alpha_scale);
    cmd->add_flag("--sample-average", sample_average,
                  "average doc-topic counts over the trailing sweeps");
  }

  HdpConfig to_config() const {
    HdpConfig cfg = HdpConfig::sparse();
    cfg.iterations = iterations;
    cfg.eta = eta;
    cfg.gamma_prior = {gamma_shape, gamma_scale};
    cfg.alpha_prior = {alpha_shape, alpha_scale};
    cfg.sample_average = sample_average;
    return cfg;
  }
};

std::set<std::string> parse_methods(const std::string& csv) {
  std::set<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.insert(item);
  return out;
}

void emit_errors(const std::vector<std::pair<std::string, std::string>>& failures) {
  json errs = json::array();
  for (const auto& [pid, message] : failures)
    errs.push_back({{"problem_id", pid}, {"error", message}});
  std::cerr << errs.dump() << "\n";
}

json k_estimate_json(const KEstimate& averaged, const std::optional<KEstimate>& constrained,
                     std::optional<int> true_k) {
  json j;
  j["gmeans"] = averaged.gmeans_k;
  j["gap"] = averaged.gap_k;
  j["averaged"] = averaged.k;
  j["constrained"] = constrained ? json(constrained->k) : json(nullptr);
  j["true_k"] = true_k ? json(*true_k) : json(nullptr);
  json curve = json::array();
  if (averaged.gap_curve) {
    const GapCurve& gc = *averaged.gap_curve;
    for (std::size_t i = 0; i < gc.ks.size(); ++i)
      curve.push_back({{"k", gc.ks[i]},
                       {"log_wk", gc.log_wk[i]},
                       {"expected_log_wk", gc.expected_log_wk[i]},
                       {"gap", gc.gap[i]},
                       {"s", gc.s[i]}});
  }
  j["gap_curve"] = std::move(curve);
  return j;
}

void write_or_print(const std::string& out_file, const json& j) {
  if (out_file.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream out(out_file);
    if (!out) throw std::runtime_error("cannot write " + out_file);
    out << j.dump(2) << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Authorial clustering of shorter texts in a latent topic space"};
  app.require_subcommand(1);

  // ---- run ----
  auto* run = app.add_subcommand("run", "full pipeline over a collection of problems");
  std::string run_root, run_out, run_k_mode = "estimated";
  std::string run_methods = "spkmeans,cop_kmeans,bl_r,bl_s";
  std::uint64_t run_seed = 42;
  double run_ratio = 0.12;
  int run_sp_runs = 5, run_workers = 1;
  bool run_pan_truth = false, run_no_lowercase = false;
  HdpFlags run_hdp;
  run->add_option("--root", run_root, "directory of problem directories")->required();
  run->add_option("--seed", run_seed, "master seed");
  run->add_option("--ratio", run_ratio, "constraint sampling ratio");
  run->add_option("--sp-runs", run_sp_runs, "SPKMeans repetitions");
  run->add_option("--k-mode", run_k_mode)->check(CLI::IsMember({"estimated", "true"}));
  run->add_option("--methods", run_methods, "comma-separated method list");
  run->add_option("--out", run_out, "artifact output directory");
  run->add_option("--workers", run_workers, "parallel problem workers");
  run->add_flag("--pan-truth", run_pan_truth, "read PAN-style clustering.json truth");
  run->add_flag("--no-lowercase", run_no_lowercase, "keep the original casing of word tokens");
  run_hdp.attach(run);

  // ---- topics ----
  auto* topics = app.add_subcommand("topics", "HDP topic inference for one problem");
  std::string topics_problem, topics_out;
  std::uint64_t topics_seed = 42;
  bool topics_pan_truth = false, topics_no_lowercase = false;
  HdpFlags topics_hdp;
  topics->add_option("--problem", topics_problem, "problem directory")->required();
  topics->add_option("--out", topics_out, "output directory")->required();
  topics->add_option("--seed", topics_seed);
  topics->add_flag("--pan-truth", topics_pan_truth);
  topics->add_flag("--no-lowercase", topics_no_lowercase);
  topics_hdp.attach(topics);

  // ---- estimate-k ----
  auto* estk = app.add_subcommand("estimate-k", "cluster-count estimation on a persisted LSSR");
  std::string estk_lssr, estk_truth, estk_constraints, estk_out;
  std::uint64_t estk_seed = 42;
  double estk_ratio = 0.12;
  bool estk_pan_truth = false;
  estk->add_option("--lssr", estk_lssr, "lssr_l2.tsv file")->required();
  estk->add_option("--truth", estk_truth, "truth file (enables constrained estimate)");
  estk->add_option("--constraints", estk_constraints, "constraints.json file");
  estk->add_option("--ratio", estk_ratio);
  estk->add_option("--seed", estk_seed);
  estk->add_option("--out", estk_out, "write k_report.json here (default: stdout)");
  estk->add_flag("--pan-truth", estk_pan_truth);

  // ---- cluster ----
  auto* cluster = app.add_subcommand("cluster", "cluster a persisted LSSR");
  std::string cluster_lssr, cluster_method = "spkmeans", cluster_constraints, cluster_out;
  std::string cluster_truth;
  int cluster_k = 0;
  std::uint64_t cluster_seed = 42;
  double cluster_ratio = 0.12;
  bool cluster_pan_truth = false;
  cluster->add_option("--lssr", cluster_lssr)->required();
  cluster->add_option("--method", cluster_method)
      ->check(CLI::IsMember({"spkmeans", "cop_kmeans", "bl_r", "bl_s"}));
  cluster->add_option("--k", cluster_k, "number of clusters (required for spkmeans/cop_kmeans)");
  cluster->add_option("--constraints", cluster_constraints, "constraints.json for cop_kmeans");
  cluster->add_option("--truth", cluster_truth, "derive constraints from this truth file");
  cluster->add_option("--ratio", cluster_ratio);
  cluster->add_option("--seed", cluster_seed);
  cluster->add_option("--out", cluster_out, "write clusters.json here (default: stdout)");
  cluster->add_flag("--pan-truth", cluster_pan_truth);

  // ---- evaluate ----
  auto* evaluate = app.add_subcommand("evaluate", "score clusters.json against a truth file");
  std::string eval_clusters, eval_truth, eval_out;
  bool eval_pan_truth = false;
  evaluate->add_option("--clusters", eval_clusters)->required();
  evaluate->add_option("--truth", eval_truth)->required();
  evaluate->add_option("--out", eval_out);
  evaluate->add_flag("--pan-truth", eval_pan_truth);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      RunConfig cfg;
      cfg.master_seed = run_seed;
      cfg.hdp = run_hdp.to_config();
      cfg.constraint_ratio = run_ratio;
      cfg.sp_runs = run_sp_runs;
      cfg.k_mode = run_k_mode == "true" ? KMode::True : KMode::Estimated;
      cfg.methods = parse_methods(run_methods);
      cfg.workers = run_workers;
      cfg.out_dir = run_out;
      cfg.truth_format = run_pan_truth ? TruthFormat::Pan : TruthFormat::Native;
      cfg.lowercase = !run_no_lowercase;
      const CollectionResult result = run_collection(run_root, cfg);
      for (const auto& [method, agg] : result.report.overall)
        std::printf("%-12s b3f=%.4f ari=%.4f over %d problems\n", method.c_str(),
                    agg.b3_f, agg.ari, agg.problems);
      if (!result.failures.empty()) {
        emit_errors(result.failures);
        return 2;
      }
      return 0;
    }

    if (*topics) {
      ProblemSet problem = load_problem_set(
          topics_problem, topics_pan_truth ? TruthFormat::Pan : TruthFormat::Native);
      DocTermMatrix dtm = vectorize(problem, !topics_no_lowercase);
      HdpConfig cfg = topics_hdp.to_config();
      cfg.seed = derive_seed(topics_seed, problem.problem_id + "/hdp");
      const TopicPosterior posterior = run_sampler(dtm, cfg);
      const Lssr lssr = l2_normalize(build_lssr(posterior, problem.doc_ids()));
      std::filesystem::create_directories(topics_out);
      const std::filesystem::path out(topics_out);
      write_lssr_raw(out / "lssr_raw.tsv", posterior, problem.doc_ids());
      write_lssr_l2(out / "lssr_l2.tsv", lssr);
      write_topics_tsv(out / "topics.tsv", posterior, dtm.vocabulary);
      write_ll_trace(out / "ll_trace.csv", posterior);
      std::printf("t=%d per_word_ll=%.6f\n", posterior.t, posterior.per_word_ll);
      return 0;
    }

    if (*estk) {
      Lssr lssr = read_lssr_tsv(estk_lssr);
      lssr.normalized = true;
      const KEstimate averaged = estimate_k_unsupervised(lssr, derive_seed(estk_seed, "estimate"));
      std::optional<KEstimate> constrained;
      std::optional<int> true_k;
      std::optional<ConstraintSet> constraints;
      if (!estk_constraints.empty()) {
        constraints = read_constraints_json(estk_constraints, lssr.doc_ids);
      } else if (!estk_truth.empty()) {
        const Truth truth = load_truth(
            estk_truth, estk_pan_truth ? TruthFormat::Pan : TruthFormat::Native);
        true_k = truth.cluster_count();
        constraints = derive_constraints(truth.labels_for(lssr.doc_ids), estk_ratio,
                                         derive_seed(estk_seed, "constraints"));
      }
      if (constraints)
        constrained = estimate_k_constrained(lssr, *constraints,
                                             derive_seed(estk_seed, "constrained"));
      write_or_print(estk_out, k_estimate_json(averaged, constrained, true_k));
      return 0;
    }

    if (*cluster) {
      Lssr lssr = read_lssr_tsv(cluster_lssr);
      lssr.normalized = true;
      const int n = static_cast<int>(lssr.rows());
      Clustering clustering;
      if (cluster_method == "bl_s") {
        clustering = baseline_singleton(n);
      } else if (cluster_method == "bl_r") {
        clustering = baseline_random(n, cluster_seed);
      } else if (cluster_method == "spkmeans") {
        if (cluster_k < 1) throw std::runtime_error("--k required for spkmeans");
        clustering = spherical_kmeans(lssr, cluster_k, cluster_seed).first;
      } else {
        if (cluster_k < 1) throw std::runtime_error("--k required for cop_kmeans");
        ConstraintSet constraints;
        if (!cluster_constraints.empty()) {
          constraints = read_constraints_json(cluster_constraints, lssr.doc_ids);
        } else if (!cluster_truth.empty()) {
          const Truth truth = load_truth(
              cluster_truth, cluster_pan_truth ? TruthFormat::Pan : TruthFormat::Native);
          constraints = derive_constraints(truth.labels_for(lssr.doc_ids), cluster_ratio,
                                           derive_seed(cluster_seed, "constraints"));
        }
        const CopResult result = cop_kmeans_retry(lssr, cluster_k, constraints, cluster_seed);
        if (!result.ok())
          throw std::runtime_error("cop_kmeans failed: no legal cluster for document " +
                                   lssr.doc_ids.at(result.blocking_point));
        clustering = *result.clustering;
      }
      json entry;
      entry["method"] = cluster_method;
      entry["k"] = clustering.k;
      json groups = json::array();
      for (const auto& members : clustering.groups()) {
        json cl = json::array();
        for (int i : members) cl.push_back(lssr.doc_ids.at(i));
        groups.push_back(std::move(cl));
      }
      entry["clusters"] = std::move(groups);
      entry["seed"] = cluster_seed;
      write_or_print(cluster_out, json::array({entry}));
      return 0;
    }

    if (*evaluate) {
      std::ifstream in(eval_clusters);
      if (!in) throw std::runtime_error("cannot read " + eval_clusters);
      json entries = json::parse(in);
      if (entries.is_object()) entries = json::array({entries});
      const Truth truth =
          load_truth(eval_truth, eval_pan_truth ? TruthFormat::Pan : TruthFormat::Native);

      json out = json::array();
      for (const auto& entry : entries) {
        std::vector<std::string> doc_ids;
        for (const auto& cl : entry.at("clusters"))
          for (const auto& name : cl) doc_ids.push_back(name.get<std::string>());
        std::sort(doc_ids.begin(), doc_ids.end());
        std::map<std::string, int> row_of;
        for (std::size_t i = 0; i < doc_ids.size(); ++i)
          row_of[doc_ids[i]] = static_cast<int>(i);

        std::vector<int> pred(doc_ids.size(), 0);
        int label = 0;
        for (const auto& cl : entry.at("clusters")) {
          for (const auto& name : cl) pred[row_of.at(name.get<std::string>())] = label;
          ++label;
        }
        const std::vector<int> truth_labels = truth.labels_for(doc_ids);
        const BCubed b3 = bcubed(pred, truth_labels);
        out.push_back({{"method", entry.value("method", std::string("unknown"))},
                       {"b3_p", b3.precision},
                       {"b3_r", b3.recall},
                       {"b3_f", b3.f},
                       {"ari", adjusted_rand_index(pred, truth_labels)},
                       {"k_est", label},
                       {"k_true", truth.cluster_count()}});
      }
      write_or_print(eval_out, out);
      return 0;
    }
  } catch (const std::exception& e) {
    json errs = json::array();
    errs.push_back({{"error", e.what()}});
    std::cerr << errs.dump() << "\n";
    return 1;
  }
  return 0;
}
