#include "authclust/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "authclust/text.hpp"
#include "json.hpp"

namespace authclust {

namespace fs = std::filesystem;
using nlohmann::json;

int Truth::cluster_count() const {
  std::set<int> labels;
  for (const auto& [_, label] : assignment) labels.insert(label);
  return static_cast<int>(labels.size());
}

std::vector<int> Truth::labels_for(const std::vector<std::string>& doc_ids) const {
  std::vector<int> out;
  out.reserve(doc_ids.size());
  for (const auto& id : doc_ids) {
    auto it = assignment.find(id);
    if (it == assignment.end())
      throw CorpusError("truth omits document: " + id);
    out.push_back(it->second);
  }
  return out;
}

std::vector<std::string> ProblemSet::doc_ids() const {
  std::vector<std::string> ids;
  ids.reserve(documents.size());
  for (const auto& d : documents) ids.push_back(d.doc_id);
  return ids;
}

std::vector<std::string> tokenize(std::string_view raw_text, bool lowercase) {
  std::vector<std::string> tokens;
  std::string word;
  for (char32_t cp : text::decode_utf8(raw_text)) {
    if (text::is_word_char(cp)) {
      text::append_utf8(word, lowercase ? text::to_lower(cp) : cp);
    } else {
      if (!word.empty()) {
        tokens.push_back(std::move(word));
        word.clear();
      }
      if (!text::is_whitespace(cp)) {
        std::string sym;
        text::append_utf8(sym, cp);
        tokens.push_back(std::move(sym));
      }
    }
  }
  if (!word.empty()) tokens.push_back(std::move(word));
  return tokens;
}

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw CorpusError("cannot read file: " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Truth parse_truth_json(const json& j, TruthFormat format, const std::string& origin) {
  Truth truth;
  const json* clusters = nullptr;
  if (format == TruthFormat::Native) {
    if (!j.is_object() || !j.contains("clusters") || !j["clusters"].is_array())
      throw CorpusError(origin + ": expected {\"clusters\": [[...], ...]}");
    clusters = &j["clusters"];
  } else {
    // PAN layout: a bare list of lists of {"document": name}.
    if (!j.is_array()) throw CorpusError(origin + ": expected a JSON array");
    clusters = &j;
  }
  int label = 0;
  for (const auto& cluster : *clusters) {
    if (!cluster.is_array())
      throw CorpusError(origin + ": cluster entries must be arrays");
    for (const auto& member : cluster) {
      std::string name;
      if (format == TruthFormat::Native) {
        if (!member.is_string())
          throw CorpusError(origin + ": cluster members must be filenames");
        name = member.get<std::string>();
      } else {
        if (!member.is_object() || !member.contains("document"))
          throw CorpusError(origin + ": expected {\"document\": name} entries");
        name = member["document"].get<std::string>();
      }
      if (truth.assignment.count(name))
        throw CorpusError(origin + ": document listed twice: " + name);
      truth.assignment[name] = label;
    }
    ++label;
  }
  return truth;
}

}  // namespace

Truth load_truth(const fs::path& file, TruthFormat format) {
  json j;
  try {
    j = json::parse(read_file(file));
  } catch (const json::parse_error& e) {
    throw CorpusError(file.string() + ": " + e.what());
  }
  return parse_truth_json(j, format, file.string());
}

ProblemSet load_problem_set(const fs::path& dir, TruthFormat truth_format) {
  if (!fs::is_directory(dir))
    throw CorpusError("missing problem directory: " + dir.string());

  ProblemSet problem;
  problem.problem_id = dir.filename().string();
  if (problem.problem_id.empty())
    problem.problem_id = dir.parent_path().filename().string();

  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt")
      names.push_back(entry.path().filename().string());
  }
  std::sort(names.begin(), names.end());  // byte-lexicographic row order

  if (names.size() < 2)
    throw CorpusError(problem.problem_id + ": fewer than 2 documents");

  for (const auto& name : names) {
    Document doc;
    doc.doc_id = name;
    doc.raw_text = read_file(dir / name);
    if (doc.raw_text.empty())
      throw CorpusError(problem.problem_id + ": empty document: " + name);
    problem.documents.push_back(std::move(doc));
  }

  const fs::path truth_path =
      truth_format == TruthFormat::Native ? dir / "truth.json" : dir / "clustering.json";
  if (fs::exists(truth_path)) {
    Truth truth = load_truth(truth_path, truth_format);
    for (const auto& [name, _] : truth.assignment) {
      if (std::find(names.begin(), names.end(), name) == names.end())
        throw CorpusError(problem.problem_id + ": truth references unknown document: " + name);
    }
    for (const auto& name : names) {
      if (!truth.assignment.count(name))
        throw CorpusError(problem.problem_id + ": truth omits document: " + name);
    }
    problem.truth = std::move(truth);
  }
  return problem;
}

DocTermMatrix vectorize(ProblemSet& problem, bool lowercase) {
  for (auto& doc : problem.documents) {
    if (doc.tokens.empty()) doc.tokens = tokenize(doc.raw_text, lowercase);
    if (doc.tokens.empty())
      throw CorpusError(problem.problem_id + ": document has no tokens: " + doc.doc_id);
  }

  // Corpus-level frequencies in first-appearance order.
  std::vector<std::string> order;
  std::map<std::string, long> freq;
  for (const auto& doc : problem.documents) {
    for (const auto& tok : doc.tokens) {
      auto [it, inserted] = freq.try_emplace(tok, 0);
      if (inserted) order.push_back(tok);
      ++it->second;
    }
  }

  DocTermMatrix dtm;
  for (const auto& term : order) {
    if (freq[term] < 2) continue;  // corpus hapax
    dtm.vocabulary.index[term] = static_cast<int>(dtm.vocabulary.terms.size());
    dtm.vocabulary.terms.push_back(term);
    dtm.vocabulary.corpus_freq[term] = freq[term];
  }

  const std::size_t v = dtm.vocabulary.size();
  dtm.counts.assign(problem.size(), std::vector<int>(v, 0));
  for (std::size_t i = 0; i < problem.size(); ++i) {
    int retained = 0;
    for (const auto& tok : problem.documents[i].tokens) {
      auto it = dtm.vocabulary.index.find(tok);
      if (it == dtm.vocabulary.index.end()) continue;
      ++dtm.counts[i][it->second];
      ++retained;
    }
    if (retained == 0)
      throw CorpusError(problem.problem_id +
                        ": document consists only of corpus hapaxes: " +
                        problem.documents[i].doc_id);
  }
  return dtm;
}

}  // namespace authclust
