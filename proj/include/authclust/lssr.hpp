#ifndef AUTHCLUST_LSSR_HPP
#define AUTHCLUST_LSSR_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "authclust/hdp.hpp"

namespace authclust {

// Latent semantic space representation: one weighted-topic vector per
// document, optionally l2-normalized to the unit sphere.
struct Lssr {
  std::vector<std::vector<double>> matrix;  // n x t
  std::vector<std::string> doc_ids;
  bool normalized = false;

  std::size_t rows() const { return matrix.size(); }
  std::size_t dims() const { return matrix.empty() ? 0 : matrix[0].size(); }
};

Lssr build_lssr(const TopicPosterior& posterior, const std::vector<std::string>& doc_ids);

// Divides every row by its Euclidean norm. An all-zero row is an upstream
// bug and raises an error naming the document.
Lssr l2_normalize(const Lssr& lssr);

Lssr read_lssr_tsv(const std::filesystem::path& file);
void write_lssr_l2(const std::filesystem::path& file, const Lssr& lssr);

}  // namespace authclust

#endif
