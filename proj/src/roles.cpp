#include "causalts/roles.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "causalts/errors.hpp"

namespace causalts {

std::vector<int> RoleSet::direct() const {
    std::vector<int> out;
    out.insert(out.end(), parents.begin(), parents.end());
    out.insert(out.end(), children.begin(), children.end());
    out.insert(out.end(), undirected.begin(), undirected.end());
    std::sort(out.begin(), out.end());
    return out;
}

void RoleSet::validate(int n_vars) const {
    std::vector<int> all{target};
    for (const auto* bucket : {&parents, &children, &undirected, &colliders, &spouses, &spurious}) {
        if (!std::is_sorted(bucket->begin(), bucket->end())) {
            throw DataError("role bucket not sorted");
        }
        all.insert(all.end(), bucket->begin(), bucket->end());
    }
    std::sort(all.begin(), all.end());
    for (int v = 0; v < n_vars; ++v) {
        if (static_cast<std::size_t>(v) >= all.size() || all[static_cast<std::size_t>(v)] != v) {
            throw DataError("role buckets do not partition the variable set");
        }
    }
    if (static_cast<int>(all.size()) != n_vars) {
        throw DataError("role buckets overlap or leave variables out");
    }
}

namespace {

RoleSet roles_common(int n, int target, const std::vector<int>& parents,
                     const std::vector<int>& directed_children,
                     const std::vector<int>& undirected_nbrs,
                     const std::function<std::vector<int>(int)>& parents_of,
                     const std::function<bool(int, int)>& adjacent) {
    RoleSet r;
    r.target = target;
    r.parents = parents;
    r.undirected = undirected_nbrs;

    std::set<int> collider_set;
    std::set<int> spouse_set;
    for (int c : directed_children) {
        for (int s : parents_of(c)) {
            if (s == target || adjacent(s, target)) continue;
            // target -> c <- s with s non-adjacent to the target: v-structure.
            collider_set.insert(c);
            spouse_set.insert(s);
        }
    }
    for (int c : directed_children) {
        if (!collider_set.count(c)) r.children.push_back(c);  // collider status wins
    }
    r.colliders.assign(collider_set.begin(), collider_set.end());
    r.spouses.assign(spouse_set.begin(), spouse_set.end());

    std::set<int> assigned{target};
    for (const auto* bucket : {&r.parents, &r.children, &r.undirected, &r.colliders, &r.spouses}) {
        assigned.insert(bucket->begin(), bucket->end());
    }
    for (int v = 0; v < n; ++v) {
        if (!assigned.count(v)) r.spurious.push_back(v);
    }
    for (auto* bucket : {&r.parents, &r.children, &r.undirected, &r.colliders, &r.spouses,
                         &r.spurious}) {
        std::sort(bucket->begin(), bucket->end());
    }
    r.validate(n);
    return r;
}

}  // namespace

RoleSet decompose(const Cpdag& g, int target) {
    const int n = g.n_vars();
    if (target < 0 || target >= n) throw DataError("decompose target out of range");
    std::vector<int> parents;
    std::vector<int> children;
    std::vector<int> undirected;
    for (int j = 0; j < n; ++j) {
        if (j == target) continue;
        if (g.directed(j, target)) parents.push_back(j);
        else if (g.directed(target, j)) children.push_back(j);
        else if (g.undirected(target, j)) undirected.push_back(j);
    }
    return roles_common(
        n, target, parents, children, undirected,
        [&](int c) {
            std::vector<int> pa;
            for (int s = 0; s < n; ++s) {
                if (g.directed(s, c)) pa.push_back(s);
            }
            return pa;
        },
        [&](int x, int y) { return g.adjacent(x, y); });
}

RoleSet oracle_roles(const Dag& dag, int target) {
    const int n = dag.n_vars();
    if (target < 0 || target >= n) throw DataError("oracle_roles target out of range");
    return roles_common(
        n, target, dag.parents(target), dag.children(target), {},
        [&](int c) { return dag.parents(c); },
        [&](int x, int y) { return dag.adjacent(x, y); });
}

PriorMasks prior_matrices(const std::vector<RoleSet>& roles, int n_vars) {
    if (static_cast<int>(roles.size()) != n_vars) {
        throw DataError("prior_matrices needs one role set per variable");
    }
    PriorMasks m;
    m.dcs = Eigen::MatrixXi::Zero(n_vars, n_vars);
    m.ccs = Eigen::MatrixXi::Zero(n_vars, n_vars);
    m.sp = Eigen::MatrixXi::Zero(n_vars, n_vars);
    for (int i = 0; i < n_vars; ++i) {
        const RoleSet& r = roles[static_cast<std::size_t>(i)];
        if (r.target != i) throw DataError("role set order does not match targets");
        for (int j : r.direct()) m.dcs(j, i) = 1;
        for (int j : r.colliders) m.ccs(j, i) = 1;
        for (int j : r.spouses) m.sp(j, i) = 1;
    }
    return m;
}

PriorMasks prior_from_graph(const Cpdag& g) {
    std::vector<RoleSet> roles;
    roles.reserve(static_cast<std::size_t>(g.n_vars()));
    for (int i = 0; i < g.n_vars(); ++i) roles.push_back(decompose(g, i));
    return prior_matrices(roles, g.n_vars());
}

AdapterInit init_logits(const PriorMasks& masks, double alpha, double beta) {
    auto fill = [&](const Eigen::MatrixXi& mask) {
        Eigen::MatrixXd w(mask.rows(), mask.cols());
        for (Eigen::Index r = 0; r < mask.rows(); ++r) {
            for (Eigen::Index c = 0; c < mask.cols(); ++c) {
                w(r, c) = mask(r, c) != 0 ? alpha : -beta;
            }
        }
        return w;
    };
    return {fill(masks.dcs), fill(masks.ccs), fill(masks.sp)};
}

std::string role_name(const RoleSet& roles, int variable) {
    auto has = [&](const std::vector<int>& v) {
        return std::binary_search(v.begin(), v.end(), variable);
    };
    if (variable == roles.target) return "target";
    if (has(roles.parents)) return "parent";
    if (has(roles.children)) return "child";
    if (has(roles.undirected)) return "undirected";
    if (has(roles.colliders)) return "collider";
    if (has(roles.spouses)) return "spouse";
    return "spurious";
}

}  // namespace causalts
