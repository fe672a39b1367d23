#include "authclust/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include "authclust/rng.hpp"
#include "json.hpp"

namespace authclust {

using nlohmann::json;

namespace {

// Union-find over document indices.
struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

ConstraintSet derive_constraints(const std::vector<int>& truth_labels, double ratio,
                                 std::uint64_t seed) {
  const int n = static_cast<int>(truth_labels.size());
  if (n < 2) throw std::invalid_argument("derive_constraints: need at least 2 documents");
  if (ratio < 0.0 || ratio > 1.0)
    throw std::invalid_argument("derive_constraints: ratio must be in [0, 1]");

  ConstraintSet out;
  out.ratio = ratio;
  out.total_links = static_cast<long>(n) * (n - 1) / 2;

  std::vector<DocPair> pairs;
  pairs.reserve(out.total_links);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

  const long budget =
      static_cast<long>(std::floor(ratio * static_cast<double>(out.total_links) + 0.5));

  Rng rng(seed);
  // Partial Fisher-Yates: the first `budget` slots end up a uniform sample
  // without replacement.
  for (long i = 0; i < budget; ++i) {
    const long j = i + static_cast<long>(rng.uniform_int(pairs.size() - i));
    std::swap(pairs[i], pairs[j]);
    const auto [a, b] = pairs[i];
    if (truth_labels[a] == truth_labels[b])
      out.ml.insert({a, b});
    else
      out.cl.insert({a, b});
  }
  return out;
}

bool check_feasible(const ConstraintSet& constraints, int k, int n) {
  if (k < 1 || k > n) return false;

  Dsu dsu(n);
  for (const auto& [a, b] : constraints.ml) dsu.unite(a, b);
  for (const auto& [a, b] : constraints.cl)
    if (dsu.find(a) == dsu.find(b)) return false;

  // CL graph over ML-contracted components.
  std::map<int, int> comp_ids;
  auto comp_of = [&](int x) {
    const int root = dsu.find(x);
    auto [it, inserted] = comp_ids.try_emplace(root, static_cast<int>(comp_ids.size()));
    return it->second;
  };
  std::vector<std::set<int>> adj;
  for (const auto& [a, b] : constraints.cl) {
    const int ca = comp_of(a), cb = comp_of(b);
    const int hi = std::max(ca, cb);
    if (hi >= static_cast<int>(adj.size())) adj.resize(hi + 1);
    adj[ca].insert(cb);
    adj[cb].insert(ca);
  }

  // Greedy clique lower bound from each seed vertex; a clique needs one
  // cluster per member.
  std::vector<int> order(adj.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return adj[a].size() > adj[b].size(); });
  std::size_t best = adj.empty() ? 0 : 1;
  for (int seed_v : order) {
    std::vector<int> clique{seed_v};
    for (int v : order) {
      if (v == seed_v) continue;
      bool connected = true;
      for (int c : clique)
        if (!adj[v].count(c)) {
          connected = false;
          break;
        }
      if (connected) clique.push_back(v);
    }
    best = std::max(best, clique.size());
  }
  return static_cast<int>(best) <= k;
}

void write_constraints_json(const std::filesystem::path& file,
                            const ConstraintSet& constraints,
                            const std::vector<std::string>& doc_ids) {
  json j;
  j["ratio"] = constraints.ratio;
  auto dump = [&](const std::set<DocPair>& pairs) {
    json arr = json::array();
    for (const auto& [a, b] : pairs)
      arr.push_back(json::array({doc_ids.at(a), doc_ids.at(b)}));
    return arr;
  };
  j["ml"] = dump(constraints.ml);
  j["cl"] = dump(constraints.cl);
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << j.dump(2) << "\n";
}

ConstraintSet read_constraints_json(const std::filesystem::path& file,
                                    const std::vector<std::string>& doc_ids) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  json j = json::parse(in);

  std::map<std::string, int> index;
  for (std::size_t i = 0; i < doc_ids.size(); ++i)
    index[doc_ids[i]] = static_cast<int>(i);

  ConstraintSet out;
  out.ratio = j.value("ratio", 0.0);
  const long n = static_cast<long>(doc_ids.size());
  out.total_links = n * (n - 1) / 2;
  auto slurp = [&](const char* key, std::set<DocPair>& dst) {
    for (const auto& pair : j.at(key)) {
      const int a = index.at(pair.at(0).get<std::string>());
      const int b = index.at(pair.at(1).get<std::string>());
      dst.insert({std::min(a, b), std::max(a, b)});
    }
  };
  slurp("ml", out.ml);
  slurp("cl", out.cl);
  return out;
}

}  // namespace authclust
