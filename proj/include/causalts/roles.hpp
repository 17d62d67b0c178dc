#ifndef CAUSALTS_ROLES_HPP
#define CAUSALTS_ROLES_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "causalts/cpdag.hpp"
#include "causalts/dag.hpp"

namespace causalts {

// Per-target causal roles. The six buckets partition the non-target variables:
//   parents / children       directed edges touching the target
//   undirected                target-incident edges of unknown direction;
//                             treated as directly causal
//   colliders                 children that form a v-structure with a spouse
//                             (collider status wins over plain child status)
//   spouses                   the other parents of colliders, not adjacent to
//                             the target
//   spurious                  everything else
struct RoleSet {
    int target = 0;
    std::vector<int> parents;
    std::vector<int> children;
    std::vector<int> undirected;
    std::vector<int> colliders;
    std::vector<int> spouses;
    std::vector<int> spurious;

    // Direct causal set: parents, non-collider children, undirected neighbors.
    std::vector<int> direct() const;

    // Buckets must be sorted, disjoint, and together with the target cover
    // exactly 0..n_vars-1.
    void validate(int n_vars) const;
};

// Role read-off from a (possibly partially directed) graph. Collider detection
// uses directed edges only: c is a collider for the target when target -> c and
// s -> c are both directed and s is not adjacent to the target.
RoleSet decompose(const Cpdag& g, int target);

// Ground-truth roles from the true DAG, same taxonomy (undirected bucket empty).
RoleSet oracle_roles(const Dag& dag, int target);

// Column i of each mask marks the role of variable j for target i:
// dcs = direct causal, ccs = collider causal, sp = spouses. Diagonals are zero
// and the three masks are disjoint per column.
struct PriorMasks {
    Eigen::MatrixXi dcs;
    Eigen::MatrixXi ccs;
    Eigen::MatrixXi sp;
};

PriorMasks prior_matrices(const std::vector<RoleSet>& roles, int n_vars);
PriorMasks prior_from_graph(const Cpdag& g);

// Adapter logit initialization: alpha where the mask is set, -beta elsewhere
// (including the diagonal).
struct AdapterInit {
    Eigen::MatrixXd dcs;
    Eigen::MatrixXd ccs;
    Eigen::MatrixXd sp;
};

AdapterInit init_logits(const PriorMasks& masks, double alpha, double beta);

// Human-readable role name for CSV output.
std::string role_name(const RoleSet& roles, int variable);

}  // namespace causalts

#endif
