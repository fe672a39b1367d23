#ifndef AUTHCLUST_HDP_HPP
#define AUTHCLUST_HDP_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "authclust/corpus.hpp"
#include "authclust/rng.hpp"

namespace authclust {

enum class HdpInit { Sequential, SingleTopic };

struct GammaPrior {
  double shape = 1.0;
  double scale = 1.0;
  double mean() const { return shape * scale; }
};

struct HdpConfig {
  double eta = 0.3;                      // topic Dirichlet prior
  GammaPrior gamma_prior{0.1, 1.0};      // top-level concentration hyperprior
  GammaPrior alpha_prior{0.1, 1.0};      // document-level concentration hyperprior
  // Starting values for the concentrations. Resampling conditions on the
  // current seating, so a cold start (prior mean under a sparse prior) can
  // freeze the chain at one topic before any structure forms; a neutral 1.0
  // start avoids that and washes out within a few sweeps.
  double gamma_init = 1.0;
  double alpha_init = 1.0;
  int iterations = 2000;
  std::uint64_t seed = 0;
  bool resample_concentrations = true;
  HdpInit init = HdpInit::Sequential;
  int trace_every = 10;                  // per-word LL recording interval
  bool sample_average = false;           // average doc-topic counts over the
  double average_window = 0.1;           // trailing fraction of sweeps

  void validate() const;

  // Hyperparameter presets. "sparse" is the shipping default.
  static HdpConfig sparse();
  static HdpConfig dense();
  static HdpConfig standard();
};

// Mutable sampler state for the direct-assignment representation of the
// Chinese restaurant franchise: every token carries a topic, and per
// (document, topic) table counts tie the document level to the shared
// top-level stick weights.
class HdpState {
 public:
  HdpState(const DocTermMatrix& dtm, const HdpConfig& cfg);

  // One full Gibbs sweep: resample every token, then table counts, stick
  // weights, and (optionally) the concentration parameters. Empty topics
  // are removed and topic ids compacted.
  void gibbs_sweep();

  // Mean log predictive probability per token under the current state.
  double per_word_log_likelihood() const;

  // Reconciles the count matrices against the raw assignments; used by
  // tests and the acceptance suite.
  bool counts_consistent() const;

  int num_topics() const { return static_cast<int>(topic_totals_.size()); }
  long total_tokens() const { return total_tokens_; }
  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }
  const std::vector<std::vector<int>>& doc_topic_counts() const { return doc_topic_; }
  const std::vector<std::vector<int>>& topic_word_counts() const { return topic_word_; }
  const std::vector<std::vector<int>>& assignments() const { return z_; }
  const std::vector<std::pair<int, double>>& ll_trace() const { return ll_trace_; }

  void record_ll(int sweep);
  void accumulate_average();
  std::optional<std::vector<std::vector<double>>> finish_average() const;

 private:
  void add_token(int d, int w, int k);
  void remove_token(int d, int w, int k);
  int sample_topic(int d, int w);
  void append_topic();
  void compact_topics();
  void resample_tables();
  void resample_beta();
  void resample_alpha();
  void resample_gamma();

  HdpConfig cfg_;
  int vocab_size_;
  long total_tokens_ = 0;
  std::vector<std::vector<int>> words_;      // token streams per document
  std::vector<std::vector<int>> z_;          // topic per token
  std::vector<std::vector<int>> doc_topic_;  // n_dt
  std::vector<std::vector<int>> topic_word_; // n_tw
  std::vector<long> topic_totals_;           // n_t
  std::vector<std::vector<int>> tables_;     // m_dt
  std::vector<double> beta_;                 // stick weights, [K] + unallocated
  double alpha_;
  double gamma_;
  Rng rng_;
  std::vector<double> weight_buf_;
  std::vector<std::pair<int, double>> ll_trace_;
  std::vector<std::vector<double>> avg_accum_;
  long avg_samples_ = 0;
};

struct TopicPosterior {
  std::vector<std::vector<int>> doc_topic_counts;   // n x t
  std::vector<std::vector<int>> topic_word_counts;  // t x V
  int t = 0;
  double per_word_ll = 0.0;
  std::vector<std::pair<int, double>> ll_trace;     // (sweep, per-word LL)
  // Present when cfg.sample_average was set: mean doc-topic counts over the
  // trailing window, aligned to the final topic ids.
  std::optional<std::vector<std::vector<double>>> doc_topic_mean;
};

TopicPosterior run_sampler(const DocTermMatrix& dtm, const HdpConfig& cfg);

void write_lssr_raw(const std::filesystem::path& file, const TopicPosterior& posterior,
                    const std::vector<std::string>& doc_ids);
void write_topics_tsv(const std::filesystem::path& file, const TopicPosterior& posterior,
                      const Vocabulary& vocabulary);
void write_ll_trace(const std::filesystem::path& file, const TopicPosterior& posterior);

}  // namespace authclust

#endif
