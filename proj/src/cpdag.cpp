#include "causalts/cpdag.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include "causalts/csv.hpp"
#include "causalts/errors.hpp"
#include "causalts/pc.hpp"
#include "causalts/rng.hpp"

namespace causalts {

Cpdag::Cpdag(int n_vars) : n_(n_vars) {
    if (n_ < 1) throw DataError("graph needs at least one variable");
    adj_ = Eigen::MatrixXi::Zero(n_, n_);
}

Cpdag Cpdag::complete(int n_vars) {
    Cpdag g(n_vars);
    for (int i = 0; i < n_vars; ++i) {
        for (int j = i + 1; j < n_vars; ++j) g.set_undirected(i, j);
    }
    return g;
}

Cpdag Cpdag::from_adjacency(const Eigen::MatrixXi& coded) {
    if (coded.rows() != coded.cols()) throw DataError("adjacency matrix must be square");
    Cpdag g(static_cast<int>(coded.rows()));
    g.adj_ = coded;
    g.validate();
    return g;
}

void Cpdag::set_directed(int i, int j) {
    adj_(i, j) = -1;
    adj_(j, i) = 1;
}

void Cpdag::set_undirected(int i, int j) {
    adj_(i, j) = -1;
    adj_(j, i) = -1;
}

void Cpdag::remove_edge(int i, int j) {
    adj_(i, j) = 0;
    adj_(j, i) = 0;
}

std::vector<int> Cpdag::neighbors(int i) const {
    std::vector<int> out;
    for (int j = 0; j < n_; ++j) {
        if (j != i && adjacent(i, j)) out.push_back(j);
    }
    return out;
}

std::vector<std::pair<int, int>> Cpdag::skeleton_edges() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n_; ++i) {
        for (int j = i + 1; j < n_; ++j) {
            if (adjacent(i, j)) out.emplace_back(i, j);
        }
    }
    return out;
}

std::vector<std::pair<int, int>> Cpdag::directed_edge_list() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            if (directed(i, j)) out.emplace_back(i, j);
        }
    }
    return out;
}

void Cpdag::validate() const {
    for (int i = 0; i < n_; ++i) {
        if (adj_(i, i) != 0) throw DataError("graph has a self-loop");
        for (int j = i + 1; j < n_; ++j) {
            int a = adj_(i, j);
            int b = adj_(j, i);
            bool ok = (a == 0 && b == 0) || (a == -1 && b == 1) || (a == 1 && b == -1) ||
                      (a == -1 && b == -1);
            if (!ok) {
                throw DataError("inconsistent edge coding between " + std::to_string(i) + " and " +
                                std::to_string(j));
            }
        }
    }
    // Directed part must be acyclic (Kahn on directed edges only).
    std::vector<int> indeg(static_cast<std::size_t>(n_), 0);
    for (auto [i, j] : directed_edge_list()) indeg[static_cast<std::size_t>(j)]++;
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
            if (directed(v, w) && --indeg[static_cast<std::size_t>(w)] == 0) q.push_back(w);
        }
    }
    if (seen != n_) throw DataError("directed part of the graph contains a cycle");
}

Cpdag cpdag_of(const Dag& dag) {
    const int n = dag.n_vars();
    Cpdag g(n);
    for (auto [i, j] : dag.edges()) g.set_undirected(i, j);
    // Compelled v-structures: a -> c <- b with a, b non-adjacent in the DAG.
    for (int c = 0; c < n; ++c) {
        std::vector<int> pa = dag.parents(c);
        for (std::size_t x = 0; x < pa.size(); ++x) {
            for (std::size_t y = x + 1; y < pa.size(); ++y) {
                if (!dag.adjacent(pa[x], pa[y])) {
                    g.set_directed(pa[x], c);
                    g.set_directed(pa[y], c);
                }
            }
        }
    }
    meek_closure(g);
    g.validate();
    return g;
}

double jaccard(const Cpdag& a, const Cpdag& b) {
    if (a.n_vars() != b.n_vars()) throw DataError("jaccard requires equal variable counts");
    auto ea = a.skeleton_edges();
    auto eb = b.skeleton_edges();
    std::set<std::pair<int, int>> sa(ea.begin(), ea.end());
    std::set<std::pair<int, int>> sb(eb.begin(), eb.end());
    std::size_t inter = 0;
    for (const auto& e : sa) {
        if (sb.count(e)) ++inter;
    }
    std::size_t uni = sa.size() + sb.size() - inter;
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double skeleton_f1(const Cpdag& estimate, const Dag& truth) {
    if (estimate.n_vars() != truth.n_vars()) throw DataError("skeleton_f1 size mismatch");
    std::set<std::pair<int, int>> est;
    for (auto e : estimate.skeleton_edges()) est.insert(e);
    std::set<std::pair<int, int>> tru;
    for (auto [i, j] : truth.edges()) tru.insert({std::min(i, j), std::max(i, j)});
    if (est.empty() && tru.empty()) return 1.0;
    std::size_t tp = 0;
    for (const auto& e : est) {
        if (tru.count(e)) ++tp;
    }
    if (tp == 0) return 0.0;
    double prec = static_cast<double>(tp) / static_cast<double>(est.size());
    double rec = static_cast<double>(tp) / static_cast<double>(tru.size());
    return 2.0 * prec * rec / (prec + rec);
}

namespace {

// Would adding directed u -> v close a cycle in the directed part of g?
bool creates_directed_cycle(const Cpdag& g, int u, int v) {
    // Cycle iff u is reachable from v along directed edges.
    const int n = g.n_vars();
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::deque<int> q{v};
    seen[static_cast<std::size_t>(v)] = true;
    while (!q.empty()) {
        int x = q.front();
        q.pop_front();
        if (x == u) return true;
        for (int y = 0; y < n; ++y) {
            if (g.directed(x, y) && !seen[static_cast<std::size_t>(y)]) {
                seen[static_cast<std::size_t>(y)] = true;
                q.push_back(y);
            }
        }
    }
    return false;
}

}  // namespace

PerturbResult perturb(const Cpdag& g, PerturbMode mode, double ratio, std::uint64_t seed) {
    if (ratio < 0.0 || ratio > 1.0) throw ConfigError("perturbation ratio must be in [0,1]");
    auto edges = g.skeleton_edges();
    const int m = static_cast<int>(edges.size());
    const int n = g.n_vars();
    PerturbResult out{g, static_cast<int>(std::ceil(ratio * m)), 0, false};
    if (out.requested == 0) return out;
    Rng rng(seed);
    if (mode == PerturbMode::fn) {
        rng.shuffle(edges);
        for (int k = 0; k < out.requested; ++k) {
            auto [i, j] = edges[static_cast<std::size_t>(k)];
            out.graph.remove_edge(i, j);
            ++out.applied;
        }
        return out;
    }
    // FP: add absent directed edges without closing a directed cycle.
    const int max_attempts = 100 * n;
    int attempts = 0;
    while (out.applied < out.requested && attempts < max_attempts) {
        ++attempts;
        int u = rng.uniform_int(n);
        int v = rng.uniform_int(n);
        if (u == v || out.graph.adjacent(u, v)) continue;
        if (creates_directed_cycle(out.graph, u, v)) continue;
        out.graph.set_directed(u, v);
        ++out.applied;
    }
    out.fell_short = out.applied < out.requested;
    out.graph.validate();
    return out;
}

void write_graph_csv(const Cpdag& g, const std::vector<std::string>& names,
                     const std::string& path) {
    if (static_cast<int>(names.size()) != g.n_vars()) {
        throw DataError("graph CSV name count mismatch");
    }
    Eigen::MatrixXd m = g.adjacency().cast<double>();
    write_matrix_csv(path, m, names, names, "var");
}

Cpdag read_graph_csv(const std::string& path, std::vector<std::string>* names_out) {
    LabeledMatrix lm = read_matrix_csv(path, /*expect_row_labels=*/true);
    if (lm.values.rows() != lm.values.cols()) {
        throw DataError("graph CSV is not square: " + path);
    }
    Eigen::MatrixXi coded(lm.values.rows(), lm.values.cols());
    for (Eigen::Index r = 0; r < lm.values.rows(); ++r) {
        for (Eigen::Index c = 0; c < lm.values.cols(); ++c) {
            double v = lm.values(r, c);
            if (v != -1.0 && v != 0.0 && v != 1.0) {
                throw DataError("graph CSV cell outside {-1,0,1} in " + path);
            }
            coded(r, c) = static_cast<int>(v);
        }
    }
    if (names_out) *names_out = lm.col_names;
    return Cpdag::from_adjacency(coded);
}

}  // namespace causalts
