#ifndef CAUSALTS_CPDAG_HPP
#define CAUSALTS_CPDAG_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "causalts/dag.hpp"

namespace causalts {

// Partially directed graph with the adjacency coding used by all graph CSVs:
//   adj(i,j) = -1 and adj(j,i) =  1   <=>  directed edge i -> j
//   adj(i,j) = adj(j,i) = -1          <=>  undirected edge i - j
//   adj(i,j) = adj(j,i) =  0          <=>  no edge
// The directed part must stay acyclic; validate() enforces both invariants.
class Cpdag {
public:
    explicit Cpdag(int n_vars);

    // Complete undirected graph, the PC starting point.
    static Cpdag complete(int n_vars);
    static Cpdag from_adjacency(const Eigen::MatrixXi& coded);

    int n_vars() const { return n_; }
    const Eigen::MatrixXi& adjacency() const { return adj_; }

    bool adjacent(int i, int j) const { return adj_(i, j) != 0; }
    bool directed(int i, int j) const { return adj_(i, j) == -1 && adj_(j, i) == 1; }
    bool undirected(int i, int j) const { return adj_(i, j) == -1 && adj_(j, i) == -1; }

    void set_directed(int i, int j);
    void set_undirected(int i, int j);
    void remove_edge(int i, int j);

    // All nodes adjacent to i (either orientation or none).
    std::vector<int> neighbors(int i) const;

    // Unordered skeleton pairs (i < j), sorted.
    std::vector<std::pair<int, int>> skeleton_edges() const;
    std::vector<std::pair<int, int>> directed_edge_list() const;

    void validate() const;

    bool operator==(const Cpdag& other) const { return adj_ == other.adj_; }
    bool operator!=(const Cpdag& other) const { return !(*this == other); }

private:
    int n_;
    Eigen::MatrixXi adj_;
};

// The CPDAG of the Markov equivalence class of `dag`: skeleton plus compelled
// orientations (v-structures, then Meek closure).
Cpdag cpdag_of(const Dag& dag);

// Jaccard similarity of the two undirected skeletons; 1 when both are empty.
double jaccard(const Cpdag& a, const Cpdag& b);

// Skeleton precision/recall F1 of an estimate against the true DAG's skeleton.
double skeleton_f1(const Cpdag& estimate, const Dag& truth);

enum class PerturbMode { fn, fp };

struct PerturbResult {
    Cpdag graph;
    int requested = 0;
    int applied = 0;
    bool fell_short = false;  // FP mode could not place all edges acyclically
};

// Structured graph corruption. FN removes ceil(ratio * |skeleton edges|) edges
// chosen uniformly; FP adds the same count of uniformly chosen absent directed
// edges, skipping any that would close a directed cycle (after 100 * n_vars
// failed draws the result carries fewer edges and fell_short is set).
// Deterministic per seed; ratio 0 returns the input graph unchanged.
PerturbResult perturb(const Cpdag& g, PerturbMode mode, double ratio, std::uint64_t seed);

void write_graph_csv(const Cpdag& g, const std::vector<std::string>& names,
                     const std::string& path);

Cpdag read_graph_csv(const std::string& path, std::vector<std::string>* names_out = nullptr);

}  // namespace causalts

#endif
