#include <cmath>

#include "authclust/hdp.hpp"
#include "doctest.h"
#include "support/synthetic.hpp"

using namespace authclust;

namespace {

DocTermMatrix tiny_dtm(std::vector<std::vector<int>> counts,
                       std::vector<std::string> terms) {
  DocTermMatrix dtm;
  dtm.counts = std::move(counts);
  for (const auto& term : terms) {
    dtm.vocabulary.index[term] = static_cast<int>(dtm.vocabulary.terms.size());
    dtm.vocabulary.terms.push_back(term);
  }
  return dtm;
}

long total_topic_tokens(const HdpState& state) {
  long sum = 0;
  for (const auto& row : state.doc_topic_counts())
    for (int c : row) sum += c;
  return sum;
}

}  // namespace

TEST_CASE("single-topic initialization") {
  // 2 docs, 5 tokens in total.
  DocTermMatrix dtm = tiny_dtm({{2, 1}, {1, 1}}, {"a", "b"});
  HdpConfig cfg = HdpConfig::sparse();
  cfg.init = HdpInit::SingleTopic;
  cfg.seed = 1;
  HdpState state(dtm, cfg);
  CHECK(state.num_topics() == 1);
  CHECK(state.total_tokens() == 5);
  CHECK(total_topic_tokens(state) == 5);
  CHECK(state.counts_consistent());
}

TEST_CASE("empty vocabulary is rejected") {
  DocTermMatrix dtm;
  dtm.counts = {{}, {}};
  CHECK_THROWS_AS(HdpState(dtm, HdpConfig::sparse()), std::invalid_argument);
}

TEST_CASE("config validation") {
  DocTermMatrix dtm = tiny_dtm({{2}}, {"a"});
  HdpConfig cfg = HdpConfig::sparse();
  cfg.iterations = 0;
  CHECK_THROWS_AS(run_sampler(dtm, cfg), std::invalid_argument);
  cfg = HdpConfig::sparse();
  cfg.eta = 0.0;
  CHECK_THROWS_AS(run_sampler(dtm, cfg), std::invalid_argument);
}

TEST_CASE("sampler is deterministic in the seed") {
  const auto corpus = synthetic::disjoint_topic_corpus(8, 30, 2, 10, 3);
  HdpConfig cfg = HdpConfig::sparse();
  cfg.iterations = 50;
  cfg.seed = 424242;
  const TopicPosterior a = run_sampler(corpus.dtm, cfg);
  const TopicPosterior b = run_sampler(corpus.dtm, cfg);
  CHECK(a.t == b.t);
  CHECK(a.doc_topic_counts == b.doc_topic_counts);
  CHECK(a.topic_word_counts == b.topic_word_counts);
  CHECK(a.per_word_ll == b.per_word_ll);

  cfg.seed = 424243;
  const TopicPosterior c = run_sampler(corpus.dtm, cfg);
  CHECK((c.doc_topic_counts != a.doc_topic_counts || c.t != a.t));
}

TEST_CASE("sweeps conserve tokens, compact topics, and keep counts consistent") {
  const auto corpus = synthetic::disjoint_topic_corpus(10, 40, 3, 8, 9);
  HdpConfig cfg = HdpConfig::sparse();
  cfg.seed = 7;
  HdpState state(corpus.dtm, cfg);
  const long tokens = state.total_tokens();
  for (int sweep = 0; sweep < 30; ++sweep) {
    state.gibbs_sweep();
    CHECK(total_topic_tokens(state) == tokens);
    for (int k = 0; k < state.num_topics(); ++k) {
      long topic_total = 0;
      for (int w : state.topic_word_counts()[k]) topic_total += w;
      CHECK(topic_total > 0);  // no empty topic survives compaction
    }
    if (sweep % 10 == 0) CHECK(state.counts_consistent());
  }
  CHECK(state.counts_consistent());
}

TEST_CASE("single-term corpus collapses to one topic") {
  // "a a a a a": one document, one term.
  DocTermMatrix dtm = tiny_dtm({{5}}, {"a"});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    HdpConfig cfg = HdpConfig::sparse();
    cfg.iterations = 100;
    cfg.seed = seed;
    const TopicPosterior posterior = run_sampler(dtm, cfg);
    CHECK(posterior.t == 1);
  }
}

TEST_CASE("per-word log likelihood") {
  SUBCASE("V=1 forces probability one") {
    DocTermMatrix dtm = tiny_dtm({{5}}, {"a"});
    HdpConfig cfg = HdpConfig::sparse();
    cfg.init = HdpInit::SingleTopic;
    cfg.seed = 3;
    HdpState state(dtm, cfg);
    CHECK(state.per_word_log_likelihood() == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("eta -> infinity gives the uniform predictive log(1/2) on V=2") {
    DocTermMatrix dtm = tiny_dtm({{6, 6}}, {"a", "b"});
    HdpConfig cfg = HdpConfig::sparse();
    cfg.eta = 1e12;
    cfg.init = HdpInit::SingleTopic;
    cfg.seed = 3;
    HdpState state(dtm, cfg);
    CHECK(state.per_word_log_likelihood() ==
          doctest::Approx(std::log(0.5)).epsilon(1e-6));
  }
  SUBCASE("trace stays finite and nonpositive") {
    const auto corpus = synthetic::disjoint_topic_corpus(6, 25, 2, 6, 5);
    HdpConfig cfg = HdpConfig::sparse();
    cfg.iterations = 40;
    cfg.trace_every = 5;
    cfg.seed = 11;
    const TopicPosterior posterior = run_sampler(corpus.dtm, cfg);
    REQUIRE(!posterior.ll_trace.empty());
    for (const auto& [sweep, ll] : posterior.ll_trace) {
      CHECK(std::isfinite(ll));
      CHECK(ll <= 0.0);
    }
  }
}

TEST_CASE("posterior row sums equal document token counts") {
  const auto corpus = synthetic::disjoint_topic_corpus(8, 35, 2, 9, 13);
  HdpConfig cfg = HdpConfig::sparse();
  cfg.iterations = 30;
  cfg.seed = 2;
  const TopicPosterior posterior = run_sampler(corpus.dtm, cfg);
  CHECK(posterior.t >= 1);
  for (std::size_t d = 0; d < corpus.dtm.rows(); ++d) {
    int doc_tokens = 0;
    for (int c : corpus.dtm.counts[d]) doc_tokens += c;
    int row = 0;
    for (int c : posterior.doc_topic_counts[d]) row += c;
    CHECK(row == doc_tokens);
  }
}

TEST_CASE("sample averaging yields a mean aligned to the final topics") {
  const auto corpus = synthetic::disjoint_topic_corpus(6, 30, 2, 8, 21);
  HdpConfig cfg = HdpConfig::sparse();
  cfg.iterations = 60;
  cfg.sample_average = true;
  cfg.average_window = 0.5;
  cfg.seed = 19;
  const TopicPosterior posterior = run_sampler(corpus.dtm, cfg);
  REQUIRE(posterior.doc_topic_mean.has_value());
  CHECK(posterior.doc_topic_mean->size() == corpus.dtm.rows());
  CHECK(posterior.doc_topic_mean->front().size() ==
        static_cast<std::size_t>(posterior.t));
}
