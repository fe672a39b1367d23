#ifndef AUTHCLUST_CORPUS_HPP
#define AUTHCLUST_CORPUS_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace authclust {

struct Document {
  std::string doc_id;
  std::string raw_text;
  std::vector<std::string> tokens;
};

// Ground-truth author assignment: doc_id -> cluster label.
struct Truth {
  std::map<std::string, int> assignment;

  int cluster_count() const;
  // Labels in document order; throws if a document is missing.
  std::vector<int> labels_for(const std::vector<std::string>& doc_ids) const;
};

// One clustering problem: an ordered document collection plus optional truth.
// Document order is fixed at load time and defines row indices everywhere
// downstream.
struct ProblemSet {
  std::string problem_id;
  std::vector<Document> documents;
  std::optional<Truth> truth;

  std::size_t size() const { return documents.size(); }
  std::vector<std::string> doc_ids() const;
};

struct Vocabulary {
  std::vector<std::string> terms;          // column id -> term
  std::map<std::string, int> index;        // term -> column id
  std::map<std::string, long> corpus_freq; // retained terms only

  std::size_t size() const { return terms.size(); }
};

struct DocTermMatrix {
  std::vector<std::vector<int>> counts;  // n x V
  Vocabulary vocabulary;

  std::size_t rows() const { return counts.size(); }
  std::size_t cols() const { return vocabulary.size(); }
};

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TruthFormat { Native, Pan };

// Splits text into maximal runs of word characters (lowercased unless
// disabled) and single punctuation/symbol tokens. Whitespace separates and
// is never emitted.
std::vector<std::string> tokenize(std::string_view raw_text, bool lowercase = true);

// Loads a problem set from a directory of UTF-8 *.txt files, sorted by
// filename. truth.json is parsed when present and validated against the
// file list.
ProblemSet load_problem_set(const std::filesystem::path& dir,
                            TruthFormat truth_format = TruthFormat::Native);

// Parses a truth file on its own (used by the evaluate subcommand).
Truth load_truth(const std::filesystem::path& file, TruthFormat format);

// Tokenizes every document in place, then counts term frequencies over a
// vocabulary from which corpus hapaxes (total count 1) are removed.
DocTermMatrix vectorize(ProblemSet& problem, bool lowercase = true);

}  // namespace authclust

#endif
