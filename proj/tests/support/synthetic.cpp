#include "support/synthetic.hpp"

#include <cmath>
#include <fstream>

#include "authclust/rng.hpp"
#include "json.hpp"

namespace synthetic {

using authclust::Rng;
using nlohmann::json;

LabeledLssr direction_clusters(int n, int k, int dims, double noise_sd,
                               std::uint64_t seed) {
  if (k > dims) throw std::invalid_argument("direction_clusters: need k <= dims");
  Rng rng(seed);
  LabeledLssr out;
  out.lssr.normalized = true;
  out.lssr.matrix.reserve(n);
  out.labels.reserve(n);
  for (int i = 0; i < n; ++i) {
    const int c = i % k;  // near-balanced clusters
    std::vector<double> x(dims, 0.0);
    x[c] = 1.0;
    double sq = 0.0;
    for (int j = 0; j < dims; ++j) {
      x[j] += noise_sd * rng.normal();
      sq += x[j] * x[j];
    }
    const double norm = std::sqrt(sq);
    for (double& v : x) v /= norm;
    out.lssr.matrix.push_back(std::move(x));
    out.labels.push_back(c);
    out.lssr.doc_ids.push_back("d" + std::to_string(i) + ".txt");
  }
  return out;
}

TopicCorpus disjoint_topic_corpus(int docs, int tokens_per_doc, int topics,
                                  int vocab_per_topic, std::uint64_t seed) {
  Rng rng(seed);
  TopicCorpus out;
  out.vocab_per_topic = vocab_per_topic;
  const int v = topics * vocab_per_topic;
  out.dtm.counts.assign(docs, std::vector<int>(v, 0));
  for (int t = 0; t < topics; ++t)
    for (int w = 0; w < vocab_per_topic; ++w) {
      const std::string term = "t" + std::to_string(t) + "w" + std::to_string(w);
      out.dtm.vocabulary.index[term] = static_cast<int>(out.dtm.vocabulary.terms.size());
      out.dtm.vocabulary.terms.push_back(term);
    }
  for (int d = 0; d < docs; ++d) {
    const int topic = d % topics;
    out.topic_of_doc.push_back(topic);
    for (int i = 0; i < tokens_per_doc; ++i) {
      const int w = topic * vocab_per_topic +
                    static_cast<int>(rng.uniform_int(vocab_per_topic));
      ++out.dtm.counts[d][w];
    }
  }
  for (const auto& term : out.dtm.vocabulary.terms) {
    long total = 0;
    for (int d = 0; d < docs; ++d)
      total += out.dtm.counts[d][out.dtm.vocabulary.index[term]];
    out.dtm.vocabulary.corpus_freq[term] = total;
  }
  return out;
}

void write_text_collection(const std::filesystem::path& root, int problems,
                           int authors, int docs, std::uint64_t seed) {
  namespace fs = std::filesystem;
  fs::create_directories(root);
  static const char* kPunct[] = {".", ",", "!", ";"};
  json groups = json::object();

  for (int p = 0; p < problems; ++p) {
    Rng rng(authclust::derive_seed(seed, "problem", p));
    const std::string pid = "problem" + std::to_string(p);
    const fs::path dir = root / pid;
    fs::create_directories(dir);
    groups[pid] = p % 2 == 0 ? "groupA" : "groupB";

    // Author-specific vocabularies plus a shared pool.
    const int pool = 25;
    auto word = [&](int author, int i) {
      return author < 0 ? "common" + std::to_string(i)
                        : "a" + std::to_string(author) + "w" + std::to_string(i);
    };

    json clusters = json::array();
    std::vector<json> per_author(authors, json::array());
    for (int d = 0; d < docs; ++d) {
      const int author = d % authors;
      const std::string name =
          (d < 10 ? "doc0" : "doc") + std::to_string(d) + ".txt";
      per_author[author].push_back(name);

      std::string body;
      const int length = 45 + static_cast<int>(rng.uniform_int(20));
      for (int i = 0; i < length; ++i) {
        const bool shared = rng.uniform() < 0.3;
        body += word(shared ? -1 : author,
                     static_cast<int>(rng.uniform_int(pool)));
        if (rng.uniform() < 0.2) body += kPunct[rng.uniform_int(4)];
        body += ' ';
      }
      std::ofstream out(dir / name);
      out << body << "\n";
    }
    for (auto& members : per_author) clusters.push_back(std::move(members));
    std::ofstream truth(dir / "truth.json");
    truth << json{{"clusters", clusters}}.dump(2) << "\n";
  }
  std::ofstream manifest(root / "groups.json");
  manifest << groups.dump(2) << "\n";
}

}  // namespace synthetic
