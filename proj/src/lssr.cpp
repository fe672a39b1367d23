#include "authclust/lssr.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace authclust {

Lssr build_lssr(const TopicPosterior& posterior, const std::vector<std::string>& doc_ids) {
  if (doc_ids.size() != posterior.doc_topic_counts.size())
    throw std::invalid_argument("build_lssr: doc_ids size mismatch");
  Lssr lssr;
  lssr.doc_ids = doc_ids;
  lssr.normalized = false;
  if (posterior.doc_topic_mean) {
    lssr.matrix = *posterior.doc_topic_mean;
  } else {
    lssr.matrix.reserve(posterior.doc_topic_counts.size());
    for (const auto& row : posterior.doc_topic_counts)
      lssr.matrix.emplace_back(row.begin(), row.end());
  }
  if (posterior.t > 13)
    std::cerr << "warning: LSSR uses " << posterior.t
              << " latent dimensions (more than typically observed)\n";
  return lssr;
}

Lssr l2_normalize(const Lssr& lssr) {
  Lssr out = lssr;
  for (std::size_t i = 0; i < out.matrix.size(); ++i) {
    double sq = 0.0;
    for (double x : out.matrix[i]) sq += x * x;
    if (sq <= 0.0) {
      const std::string who = i < out.doc_ids.size() ? out.doc_ids[i] : std::to_string(i);
      throw std::invalid_argument("l2_normalize: all-zero row for document " + who);
    }
    const double norm = std::sqrt(sq);
    for (double& x : out.matrix[i]) x /= norm;
  }
  out.normalized = true;
  return out;
}

Lssr read_lssr_tsv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  Lssr lssr;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(file.string() + ": empty file");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string id;
    std::getline(ss, id, '\t');
    std::vector<double> row;
    std::string cell;
    while (std::getline(ss, cell, '\t')) row.push_back(std::stod(cell));
    if (!lssr.matrix.empty() && row.size() != lssr.matrix[0].size())
      throw std::runtime_error(file.string() + ": ragged rows");
    lssr.doc_ids.push_back(id);
    lssr.matrix.push_back(std::move(row));
  }
  if (lssr.matrix.empty()) throw std::runtime_error(file.string() + ": no data rows");
  return lssr;
}

void write_lssr_l2(const std::filesystem::path& file, const Lssr& lssr) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << "doc_id";
  for (std::size_t k = 0; k < lssr.dims(); ++k) out << "\tt" << k;
  out << "\n";
  char buf[64];
  for (std::size_t i = 0; i < lssr.rows(); ++i) {
    out << lssr.doc_ids[i];
    for (double x : lssr.matrix[i]) {
      std::snprintf(buf, sizeof buf, "\t%.12g", x);
      out << buf;
    }
    out << "\n";
  }
}

}  // namespace authclust
