#include "authclust/hdp.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace authclust {

void HdpConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("hdp: iterations must be >= 1");
  if (eta <= 0.0) throw std::invalid_argument("hdp: eta must be > 0");
  if (gamma_prior.shape <= 0.0 || gamma_prior.scale <= 0.0 ||
      alpha_prior.shape <= 0.0 || alpha_prior.scale <= 0.0)
    throw std::invalid_argument("hdp: Gamma hyperprior parameters must be > 0");
  if (gamma_init <= 0.0 || alpha_init <= 0.0)
    throw std::invalid_argument("hdp: initial concentrations must be > 0");
  if (trace_every < 1) throw std::invalid_argument("hdp: trace_every must be >= 1");
  if (average_window <= 0.0 || average_window > 1.0)
    throw std::invalid_argument("hdp: average_window must be in (0, 1]");
}

HdpConfig HdpConfig::sparse() {
  HdpConfig cfg;
  cfg.eta = 0.3;
  cfg.gamma_prior = {0.1, 1.0};
  cfg.alpha_prior = {0.1, 1.0};
  return cfg;
}

HdpConfig HdpConfig::dense() {
  HdpConfig cfg;
  cfg.eta = 0.8;
  cfg.gamma_prior = {1.5, 1.0};
  cfg.alpha_prior = {1.5, 1.0};
  return cfg;
}

HdpConfig HdpConfig::standard() {
  HdpConfig cfg;
  cfg.eta = 0.5;
  cfg.gamma_prior = {1.0, 1.0};
  cfg.alpha_prior = {1.0, 1.0};
  return cfg;
}

HdpState::HdpState(const DocTermMatrix& dtm, const HdpConfig& cfg)
    : cfg_(cfg),
      vocab_size_(static_cast<int>(dtm.cols())),
      alpha_(cfg.alpha_init),
      gamma_(cfg.gamma_init),
      rng_(cfg.seed) {
  cfg_.validate();
  if (vocab_size_ == 0) throw std::invalid_argument("hdp: empty vocabulary");

  const std::size_t n = dtm.rows();
  words_.resize(n);
  z_.resize(n);
  doc_topic_.resize(n);
  tables_.resize(n);
  for (std::size_t d = 0; d < n; ++d) {
    long len = 0;
    for (int w = 0; w < vocab_size_; ++w) {
      for (int c = 0; c < dtm.counts[d][w]; ++c) words_[d].push_back(w);
      len += dtm.counts[d][w];
    }
    if (len == 0) throw std::invalid_argument("hdp: document with no retained tokens");
    z_[d].assign(words_[d].size(), -1);
    total_tokens_ += len;
  }

  if (cfg_.init == HdpInit::SingleTopic) {
    append_topic();
    for (std::size_t d = 0; d < n; ++d)
      for (std::size_t i = 0; i < words_[d].size(); ++i) {
        z_[d][i] = 0;
        add_token(static_cast<int>(d), words_[d][i], 0);
      }
  } else {
    // Sequential CRF-style pass: seat each token given the counts so far,
    // using table counts in place of the not-yet-sampled stick weights.
    long total_tables = 0;
    std::vector<long> tables_by_topic;
    for (std::size_t d = 0; d < n; ++d) {
      for (std::size_t i = 0; i < words_[d].size(); ++i) {
        const int w = words_[d][i];
        const int k_count = num_topics();
        weight_buf_.assign(k_count + 1, 0.0);
        for (int k = 0; k < k_count; ++k) {
          const double popularity =
              alpha_ * static_cast<double>(tables_by_topic[k]) / (total_tables + gamma_);
          const double f = (topic_word_[k][w] + cfg_.eta) /
                           (topic_totals_[k] + vocab_size_ * cfg_.eta);
          weight_buf_[k] = (doc_topic_[d][k] + popularity) * f;
        }
        weight_buf_[k_count] =
            alpha_ * (gamma_ / (total_tables + gamma_)) / vocab_size_;
        int k = static_cast<int>(rng_.categorical(weight_buf_));
        if (k == k_count) {
          append_topic();
          tables_by_topic.push_back(0);
        }
        if (doc_topic_[d][k] == 0) {
          ++tables_by_topic[k];
          ++total_tables;
        }
        z_[d][i] = k;
        add_token(static_cast<int>(d), w, k);
      }
    }
  }
  resample_tables();
  resample_beta();
}

void HdpState::append_topic() {
  topic_word_.emplace_back(vocab_size_, 0);
  topic_totals_.push_back(0);
  for (auto& row : doc_topic_) row.push_back(0);
  for (auto& row : tables_) row.push_back(0);
  if (beta_.empty()) {
    beta_.assign(2, 0.5);  // placeholder; resample_beta runs before any sweep
  } else {
    // Split the unallocated stick mass for the newborn topic.
    const double remaining = beta_.back();
    const double nu = rng_.beta(1.0, gamma_);
    beta_.back() = nu * remaining;
    beta_.push_back((1.0 - nu) * remaining);
  }
  if (!avg_accum_.empty())
    for (auto& row : avg_accum_) row.push_back(0.0);
}

void HdpState::add_token(int d, int w, int k) {
  ++doc_topic_[d][k];
  ++topic_word_[k][w];
  ++topic_totals_[k];
}

void HdpState::remove_token(int d, int w, int k) {
  --doc_topic_[d][k];
  --topic_word_[k][w];
  --topic_totals_[k];
}

int HdpState::sample_topic(int d, int w) {
  const int k_count = num_topics();
  weight_buf_.assign(k_count + 1, 0.0);
  for (int k = 0; k < k_count; ++k) {
    const double f =
        (topic_word_[k][w] + cfg_.eta) / (topic_totals_[k] + vocab_size_ * cfg_.eta);
    weight_buf_[k] = (doc_topic_[d][k] + alpha_ * beta_[k]) * f;
  }
  weight_buf_[k_count] = alpha_ * beta_[k_count] / vocab_size_;
  int k = static_cast<int>(rng_.categorical(weight_buf_));
  if (k == k_count) append_topic();
  return k;
}

void HdpState::gibbs_sweep() {
  for (std::size_t d = 0; d < words_.size(); ++d) {
    for (std::size_t i = 0; i < words_[d].size(); ++i) {
      const int w = words_[d][i];
      remove_token(static_cast<int>(d), w, z_[d][i]);
      const int k = sample_topic(static_cast<int>(d), w);
      z_[d][i] = k;
      add_token(static_cast<int>(d), w, k);
    }
  }
  compact_topics();
  resample_tables();
  resample_beta();
  if (cfg_.resample_concentrations) {
    resample_alpha();
    resample_gamma();
  }
}

void HdpState::compact_topics() {
  const int k_count = num_topics();
  std::vector<int> remap(k_count, -1);
  int next = 0;
  for (int k = 0; k < k_count; ++k)
    if (topic_totals_[k] > 0) remap[k] = next++;
  if (next == k_count) return;

  for (auto& zd : z_)
    for (int& zi : zd) zi = remap[zi];

  double freed = 0.0;
  std::vector<std::vector<int>> tw(next);
  std::vector<long> totals(next, 0);
  for (int k = 0; k < k_count; ++k) {
    if (remap[k] >= 0) {
      tw[remap[k]] = std::move(topic_word_[k]);
      totals[remap[k]] = topic_totals_[k];
    } else {
      freed += beta_[k];
    }
  }
  topic_word_ = std::move(tw);
  topic_totals_ = std::move(totals);

  std::vector<double> beta(next + 1, 0.0);
  for (int k = 0; k < k_count; ++k)
    if (remap[k] >= 0) beta[remap[k]] = beta_[k];
  beta[next] = beta_[k_count] + freed;
  beta_ = std::move(beta);

  auto compact_rows = [&](auto& matrix) {
    for (auto& row : matrix) {
      std::remove_reference_t<decltype(row)> packed(next, 0);
      for (int k = 0; k < k_count; ++k)
        if (remap[k] >= 0) packed[remap[k]] = row[k];
      row = std::move(packed);
    }
  };
  compact_rows(doc_topic_);
  compact_rows(tables_);
  if (!avg_accum_.empty()) {
    for (auto& row : avg_accum_) {
      std::vector<double> packed(next, 0.0);
      for (int k = 0; k < k_count; ++k)
        if (remap[k] >= 0) packed[remap[k]] = row[k];
      row = std::move(packed);
    }
  }
}

void HdpState::resample_tables() {
  for (std::size_t d = 0; d < doc_topic_.size(); ++d) {
    for (int k = 0; k < num_topics(); ++k) {
      const int n = doc_topic_[d][k];
      if (n == 0) {
        tables_[d][k] = 0;
        continue;
      }
      const double mass = alpha_ * beta_[k];
      int m = 1;
      for (int i = 1; i < n; ++i)
        if (rng_.bernoulli(mass / (mass + i))) ++m;
      tables_[d][k] = m;
    }
  }
}

void HdpState::resample_beta() {
  std::vector<double> weights(num_topics() + 1, 0.0);
  for (const auto& row : tables_)
    for (int k = 0; k < num_topics(); ++k) weights[k] += row[k];
  weights[num_topics()] = gamma_;
  beta_ = rng_.dirichlet(weights);
}

void HdpState::resample_alpha() {
  long total_tables = 0;
  for (const auto& row : tables_)
    for (int m : row) total_tables += m;

  const double shape = cfg_.alpha_prior.shape;
  const double scale = cfg_.alpha_prior.scale;
  for (int step = 0; step < 10; ++step) {
    double sum_log_w = 0.0;
    double sum_s = 0.0;
    for (const auto& doc : words_) {
      const double len = static_cast<double>(doc.size());
      sum_log_w += std::log(rng_.beta(alpha_ + 1.0, len));
      sum_s += rng_.bernoulli(len / (len + alpha_)) ? 1.0 : 0.0;
    }
    const double rate = 1.0 / scale - sum_log_w;
    alpha_ = rng_.gamma(shape + total_tables - sum_s, 1.0 / rate);
  }
}

void HdpState::resample_gamma() {
  long total_tables = 0;
  for (const auto& row : tables_)
    for (int m : row) total_tables += m;
  const int k_count = num_topics();

  const double shape = cfg_.gamma_prior.shape;
  const double scale = cfg_.gamma_prior.scale;
  const double aux = rng_.beta(gamma_ + 1.0, static_cast<double>(total_tables));
  const double rate = 1.0 / scale - std::log(aux);
  double pi = shape + k_count - 1;
  pi = pi / (pi + rate * total_tables);
  if (rng_.bernoulli(pi))
    gamma_ = rng_.gamma(shape + k_count, 1.0 / rate);
  else
    gamma_ = rng_.gamma(shape + k_count - 1, 1.0 / rate);
}

double HdpState::per_word_log_likelihood() const {
  double total = 0.0;
  for (std::size_t d = 0; d < words_.size(); ++d) {
    const double denom = static_cast<double>(words_[d].size()) + alpha_;
    for (int w : words_[d]) {
      double p = alpha_ * beta_[num_topics()] / denom / vocab_size_;
      for (int k = 0; k < num_topics(); ++k) {
        const double theta = (doc_topic_[d][k] + alpha_ * beta_[k]) / denom;
        const double f =
            (topic_word_[k][w] + cfg_.eta) / (topic_totals_[k] + vocab_size_ * cfg_.eta);
        p += theta * f;
      }
      total += std::log(p);
    }
  }
  return total / static_cast<double>(total_tokens_);
}

bool HdpState::counts_consistent() const {
  std::vector<std::vector<int>> dt(doc_topic_.size(),
                                   std::vector<int>(num_topics(), 0));
  std::vector<std::vector<int>> tw(num_topics(), std::vector<int>(vocab_size_, 0));
  std::vector<long> totals(num_topics(), 0);
  long tokens = 0;
  for (std::size_t d = 0; d < words_.size(); ++d) {
    for (std::size_t i = 0; i < words_[d].size(); ++i) {
      const int k = z_[d][i];
      if (k < 0 || k >= num_topics()) return false;
      ++dt[d][k];
      ++tw[k][words_[d][i]];
      ++totals[k];
      ++tokens;
    }
  }
  return dt == doc_topic_ && tw == topic_word_ && totals == topic_totals_ &&
         tokens == total_tokens_;
}

void HdpState::record_ll(int sweep) {
  ll_trace_.emplace_back(sweep, per_word_log_likelihood());
}

void HdpState::accumulate_average() {
  if (avg_accum_.empty())
    avg_accum_.assign(doc_topic_.size(), std::vector<double>(num_topics(), 0.0));
  for (std::size_t d = 0; d < doc_topic_.size(); ++d)
    for (int k = 0; k < num_topics(); ++k)
      avg_accum_[d][k] += doc_topic_[d][k];
  ++avg_samples_;
}

std::optional<std::vector<std::vector<double>>> HdpState::finish_average() const {
  if (avg_samples_ == 0) return std::nullopt;
  auto mean = avg_accum_;
  for (auto& row : mean)
    for (double& x : row) x /= static_cast<double>(avg_samples_);
  return mean;
}

TopicPosterior run_sampler(const DocTermMatrix& dtm, const HdpConfig& cfg) {
  cfg.validate();
  HdpState state(dtm, cfg);
  state.record_ll(0);
  const int avg_start =
      cfg.iterations - static_cast<int>(cfg.iterations * cfg.average_window);
  for (int sweep = 1; sweep <= cfg.iterations; ++sweep) {
    state.gibbs_sweep();
    if (sweep % cfg.trace_every == 0 || sweep == cfg.iterations)
      state.record_ll(sweep);
    if (cfg.sample_average && sweep > avg_start) state.accumulate_average();
  }

  TopicPosterior posterior;
  posterior.doc_topic_counts = state.doc_topic_counts();
  posterior.topic_word_counts = state.topic_word_counts();
  posterior.t = state.num_topics();
  posterior.ll_trace = state.ll_trace();
  posterior.per_word_ll = posterior.ll_trace.back().second;
  posterior.doc_topic_mean = state.finish_average();
  return posterior;
}

void write_lssr_raw(const std::filesystem::path& file, const TopicPosterior& posterior,
                    const std::vector<std::string>& doc_ids) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << "doc_id";
  for (int k = 0; k < posterior.t; ++k) out << "\tt" << k;
  out << "\n";
  for (std::size_t d = 0; d < posterior.doc_topic_counts.size(); ++d) {
    out << doc_ids[d];
    for (int c : posterior.doc_topic_counts[d]) out << "\t" << c;
    out << "\n";
  }
}

void write_topics_tsv(const std::filesystem::path& file, const TopicPosterior& posterior,
                      const Vocabulary& vocabulary) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << "topic";
  for (const auto& term : vocabulary.terms) out << "\t" << term;
  out << "\n";
  for (int k = 0; k < posterior.t; ++k) {
    out << "t" << k;
    for (int c : posterior.topic_word_counts[k]) out << "\t" << c;
    out << "\n";
  }
}

void write_ll_trace(const std::filesystem::path& file, const TopicPosterior& posterior) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << "sweep,per_word_ll\n";
  char buf[64];
  for (const auto& [sweep, ll] : posterior.ll_trace) {
    std::snprintf(buf, sizeof buf, "%d,%.12g\n", sweep, ll);
    out << buf;
  }
}

}  // namespace authclust
