#ifndef CAUSALTS_DAG_HPP
#define CAUSALTS_DAG_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

namespace causalts {

// Directed acyclic graph over variables 0..n-1. Edges are validated for
// acyclicity at construction; at most one edge per unordered pair.
class Dag {
public:
    Dag(int n_vars, std::vector<std::pair<int, int>> edges);

    int n_vars() const { return n_; }
    bool edge(int i, int j) const { return adj_(i, j) != 0; }  // i -> j
    bool adjacent(int i, int j) const { return adj_(i, j) != 0 || adj_(j, i) != 0; }

    // Edge list sorted lexicographically; stable across platforms.
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    std::vector<int> parents(int j) const;
    std::vector<int> children(int i) const;

private:
    int n_;
    Eigen::MatrixXi adj_;
    std::vector<std::pair<int, int>> edges_;
};

// Uniform random DAG: draw a random topological order, then include each
// order-respecting edge independently with probability edge_prob.
Dag random_dag(int n_vars, double edge_prob, std::uint64_t seed);

// All ancestors of the nodes in `base`, including the base nodes themselves.
std::vector<bool> ancestral_set(const Dag& dag, const std::vector<int>& base);

// Exact d-separation of a and b given Z, by reachability over active trails
// (Bayes-ball). Preconditions: a != b, a not in Z, b not in Z.
bool d_separated(const Dag& dag, int a, int b, const std::vector<int>& z);

}  // namespace causalts

#endif
