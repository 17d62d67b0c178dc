#include "causalts/dag.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <string>

#include "causalts/errors.hpp"
#include "causalts/rng.hpp"

namespace causalts {

Dag::Dag(int n_vars, std::vector<std::pair<int, int>> edges) : n_(n_vars) {
    if (n_ < 1) throw DataError("DAG needs at least one variable");
    adj_ = Eigen::MatrixXi::Zero(n_, n_);
    for (auto [i, j] : edges) {
        if (i < 0 || j < 0 || i >= n_ || j >= n_ || i == j) {
            throw DataError("invalid edge (" + std::to_string(i) + "," + std::to_string(j) + ")");
        }
        if (adj_(i, j) != 0 || adj_(j, i) != 0) {
            throw DataError("duplicate or bidirected pair (" + std::to_string(i) + "," +
                            std::to_string(j) + ")");
        }
        adj_(i, j) = 1;
    }
    std::sort(edges.begin(), edges.end());
    edges_ = std::move(edges);

    // Kahn's algorithm; any leftover node means a cycle.
    std::vector<int> indeg(static_cast<std::size_t>(n_), 0);
    for (auto [i, j] : edges_) indeg[static_cast<std::size_t>(j)]++;
    std::deque<int> q;
    for (int v = 0; v < n_; ++v) {
        if (indeg[static_cast<std::size_t>(v)] == 0) q.push_back(v);
    }
    int seen = 0;
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        ++seen;
        for (int w = 0; w < n_; ++w) {
            if (adj_(v, w) != 0 && --indeg[static_cast<std::size_t>(w)] == 0) q.push_back(w);
        }
    }
    if (seen != n_) throw DataError("edge set contains a cycle");
}

std::vector<int> Dag::parents(int j) const {
    std::vector<int> out;
    for (int i = 0; i < n_; ++i) {
        if (adj_(i, j) != 0) out.push_back(i);
    }
    return out;
}

std::vector<int> Dag::children(int i) const {
    std::vector<int> out;
    for (int j = 0; j < n_; ++j) {
        if (adj_(i, j) != 0) out.push_back(j);
    }
    return out;
}

Dag random_dag(int n_vars, double edge_prob, std::uint64_t seed) {
    if (n_vars < 1) throw DataError("random_dag needs n_vars >= 1");
    if (edge_prob < 0.0 || edge_prob > 1.0) throw ConfigError("edge_prob must be in [0,1]");
    Rng rng(seed);
    std::vector<int> order(static_cast<std::size_t>(n_vars));
    for (int v = 0; v < n_vars; ++v) order[static_cast<std::size_t>(v)] = v;
    rng.shuffle(order);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n_vars; ++i) {
        for (int j = i + 1; j < n_vars; ++j) {
            double u = rng.uniform();  // always drawn so the stream is position-stable
            if (u < edge_prob) {
                edges.emplace_back(order[static_cast<std::size_t>(i)],
                                   order[static_cast<std::size_t>(j)]);
            }
        }
    }
    return Dag(n_vars, std::move(edges));
}

std::vector<bool> ancestral_set(const Dag& dag, const std::vector<int>& base) {
    std::vector<bool> in(static_cast<std::size_t>(dag.n_vars()), false);
    std::deque<int> q;
    for (int v : base) {
        if (!in[static_cast<std::size_t>(v)]) {
            in[static_cast<std::size_t>(v)] = true;
            q.push_back(v);
        }
    }
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (int p : dag.parents(v)) {
            if (!in[static_cast<std::size_t>(p)]) {
                in[static_cast<std::size_t>(p)] = true;
                q.push_back(p);
            }
        }
    }
    return in;
}

bool d_separated(const Dag& dag, int a, int b, const std::vector<int>& z) {
    const int n = dag.n_vars();
    if (a == b) throw DataError("d_separated endpoints must differ");
    std::vector<bool> in_z(static_cast<std::size_t>(n), false);
    for (int v : z) in_z[static_cast<std::size_t>(v)] = true;
    if (in_z[static_cast<std::size_t>(a)] || in_z[static_cast<std::size_t>(b)]) {
        throw DataError("d_separated endpoints must not be conditioned on");
    }
    std::vector<bool> anc_z = ancestral_set(dag, z);

    // Reachability over active trails: state is (node, direction of arrival),
    // direction 0 = arrived from a child (moving up), 1 = arrived from a parent.
    std::vector<std::array<bool, 2>> visited(static_cast<std::size_t>(n), {false, false});
    std::deque<std::pair<int, int>> q;
    q.emplace_back(a, 0);
    while (!q.empty()) {
        auto [v, dir] = q.front();
        q.pop_front();
        if (visited[static_cast<std::size_t>(v)][static_cast<std::size_t>(dir)]) continue;
        visited[static_cast<std::size_t>(v)][static_cast<std::size_t>(dir)] = true;
        if (v == b) return false;
        if (dir == 0 && !in_z[static_cast<std::size_t>(v)]) {
            for (int p : dag.parents(v)) q.emplace_back(p, 0);
            for (int c : dag.children(v)) q.emplace_back(c, 1);
        } else if (dir == 1) {
            if (!in_z[static_cast<std::size_t>(v)]) {
                for (int c : dag.children(v)) q.emplace_back(c, 1);
            }
            if (anc_z[static_cast<std::size_t>(v)]) {
                for (int p : dag.parents(v)) q.emplace_back(p, 0);
            }
        }
    }
    return true;
}

}  // namespace causalts
