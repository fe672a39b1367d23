#ifndef AUTHCLUST_CONSTRAINTS_HPP
#define AUTHCLUST_CONSTRAINTS_HPP

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "authclust/corpus.hpp"

namespace authclust {

using DocPair = std::pair<int, int>;  // unordered, stored with first < second

// Must-link / cannot-link pairs sampled from ground truth over document
// row indices.
struct ConstraintSet {
  std::set<DocPair> ml;
  std::set<DocPair> cl;
  double ratio = 0.0;
  long total_links = 0;  // l = n(n-1)/2

  std::size_t size() const { return ml.size() + cl.size(); }
  bool empty() const { return ml.empty() && cl.empty(); }
};

// Samples round-half-up(ratio * l) distinct pairs uniformly without
// replacement and labels each ML or CL according to the truth labels.
ConstraintSet derive_constraints(const std::vector<int>& truth_labels, double ratio,
                                 std::uint64_t seed);

// Necessary-condition screen: false if the ML closure merges a CL pair, or
// the CL graph after ML contraction has a greedily-found clique larger
// than k, or k > n.
bool check_feasible(const ConstraintSet& constraints, int k, int n);

void write_constraints_json(const std::filesystem::path& file,
                            const ConstraintSet& constraints,
                            const std::vector<std::string>& doc_ids);
ConstraintSet read_constraints_json(const std::filesystem::path& file,
                                    const std::vector<std::string>& doc_ids);

}  // namespace authclust

#endif
