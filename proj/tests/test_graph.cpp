#include <cstdio>
#include <vector>

#include "causalts/cpdag.hpp"
#include "causalts/dag.hpp"
#include "causalts/errors.hpp"
#include "causalts/rng.hpp"
#include "doctest.h"

using namespace causalts;

namespace {

// Reference d-separation by exhaustive path enumeration: a path is active
// given Z when every interior node is (collider: itself or a descendant in Z;
// otherwise: not in Z). Exponential, fine for n <= 6.
struct PathOracle {
    explicit PathOracle(const Dag& dag) : d(dag), n(dag.n_vars()) {
        desc.assign(static_cast<std::size_t>(n), std::vector<bool>());
        for (int i = 0; i < n; ++i) {
            std::vector<bool> reach(static_cast<std::size_t>(n), false);
            mark(i, reach);
            desc[static_cast<std::size_t>(i)] = reach;  // includes i itself
        }
    }

    void mark(int i, std::vector<bool>& reach) const {
        if (reach[static_cast<std::size_t>(i)]) return;
        reach[static_cast<std::size_t>(i)] = true;
        for (int c : d.children(i)) mark(c, reach);
    }

    bool separated(int a, int b, const std::vector<int>& z) const {
        std::vector<bool> in_z(static_cast<std::size_t>(n), false);
        for (int v : z) in_z[static_cast<std::size_t>(v)] = true;
        std::vector<int> path{a};
        std::vector<bool> used(static_cast<std::size_t>(n), false);
        used[static_cast<std::size_t>(a)] = true;
        return !active_path(a, b, in_z, path, used);
    }

    bool active_path(int cur, int goal, const std::vector<bool>& in_z,
                     std::vector<int>& path, std::vector<bool>& used) const {
        if (cur == goal) return path.size() >= 2 && path_active(path, in_z);
        for (int next = 0; next < n; ++next) {
            if (used[static_cast<std::size_t>(next)] || !d.adjacent(cur, next)) continue;
            used[static_cast<std::size_t>(next)] = true;
            path.push_back(next);
            const bool found = active_path(next, goal, in_z, path, used);
            path.pop_back();
            used[static_cast<std::size_t>(next)] = false;
            if (found) return true;
        }
        return false;
    }

    bool path_active(const std::vector<int>& path, const std::vector<bool>& in_z) const {
        for (std::size_t k = 1; k + 1 < path.size(); ++k) {
            const int prev = path[k - 1], mid = path[k], next = path[k + 1];
            const bool collider = d.edge(prev, mid) && d.edge(next, mid);
            if (collider) {
                bool opened = false;
                for (int v = 0; v < n; ++v)
                    if (in_z[static_cast<std::size_t>(v)] &&
                        desc[static_cast<std::size_t>(mid)][static_cast<std::size_t>(v)])
                        opened = true;
                if (!opened) return false;
            } else if (in_z[static_cast<std::size_t>(mid)]) {
                return false;
            }
        }
        return true;
    }

    const Dag& d;
    int n;
    std::vector<std::vector<bool>> desc;
};

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("dag construction rejects cycles and self loops") {
    CHECK_THROWS_AS(Dag(3, {{0, 1}, {1, 2}, {2, 0}}), DataError);
    CHECK_THROWS_AS(Dag(2, {{0, 0}}), DataError);
    CHECK_THROWS_AS(Dag(2, {{0, 3}}), DataError);
    Dag ok(3, {{0, 1}, {1, 2}});
    CHECK(ok.edge(0, 1));
    CHECK(!ok.edge(1, 0));
    CHECK(ok.parents(2) == std::vector<int>{1});
    CHECK(ok.children(0) == std::vector<int>{1});
}

TEST_CASE("random_dag is deterministic per seed and respects edge_prob limits") {
    Dag a = random_dag(6, 0.4, 17);
    Dag b = random_dag(6, 0.4, 17);
    CHECK(a.edges() == b.edges());
    Dag empty = random_dag(5, 0.0, 3);
    CHECK(empty.edges().empty());
    Dag full = random_dag(5, 1.0, 3);
    CHECK(full.edges().size() == 10);  // all order-respecting pairs
}

TEST_CASE("d-separation on textbook fixtures") {
    // chain 0 -> 1 -> 2
    Dag chain(3, {{0, 1}, {1, 2}});
    CHECK(!d_separated(chain, 0, 2, {}));
    CHECK(d_separated(chain, 0, 2, {1}));
    // fork 0 <- 1 -> 2
    Dag fork(3, {{1, 0}, {1, 2}});
    CHECK(!d_separated(fork, 0, 2, {}));
    CHECK(d_separated(fork, 0, 2, {1}));
    // collider 0 -> 1 <- 2, plus descendant 1 -> 3
    Dag coll(4, {{0, 1}, {2, 1}, {1, 3}});
    CHECK(d_separated(coll, 0, 2, {}));
    CHECK(!d_separated(coll, 0, 2, {1}));
    CHECK(!d_separated(coll, 0, 2, {3}));  // conditioning on a descendant opens it
}

TEST_CASE("d-separation agrees with path enumeration on random dags") {
    Rng rng(99);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 3 + static_cast<int>(rng.uniform_int(4));  // 3..6
        Dag dag = random_dag(n, trial % 2 == 0 ? 0.3 : 0.6, 1000 + trial);
        PathOracle oracle(dag);
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                const int m = n - 2;
                for (int mask = 0; mask < (1 << m); ++mask) {
                    std::vector<int> z;
                    int bit = 0;
                    for (int v = 0; v < n; ++v) {
                        if (v == a || v == b) continue;
                        if (mask & (1 << bit)) z.push_back(v);
                        ++bit;
                    }
                    CHECK(d_separated(dag, a, b, z) == oracle.separated(a, b, z));
                }
            }
        }
    }
}

TEST_CASE("cpdag adjacency coding and validation") {
    Cpdag g(3);
    g.set_directed(0, 1);
    g.set_undirected(1, 2);
    CHECK(g.adjacency()(0, 1) == -1);
    CHECK(g.adjacency()(1, 0) == 1);
    CHECK(g.directed(0, 1));
    CHECK(!g.directed(1, 0));
    CHECK(g.undirected(1, 2));
    CHECK(g.skeleton_edges() == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});
    g.validate();

    Eigen::MatrixXi bad = Eigen::MatrixXi::Zero(2, 2);
    bad(0, 1) = 1;  // half an edge
    CHECK_THROWS_AS(Cpdag::from_adjacency(bad), DataError);
}

TEST_CASE("cpdag_of keeps v-structures directed and frees other edges") {
    // chain: whole equivalence class is undirected
    Cpdag chain = cpdag_of(Dag(3, {{0, 1}, {1, 2}}));
    CHECK(chain.undirected(0, 1));
    CHECK(chain.undirected(1, 2));
    // collider stays directed
    Cpdag coll = cpdag_of(Dag(3, {{0, 2}, {1, 2}}));
    CHECK(coll.directed(0, 2));
    CHECK(coll.directed(1, 2));
    // Meek propagation: 0 -> 2 <- 1 with 2 - 3 forces 2 -> 3
    Cpdag meek = cpdag_of(Dag(4, {{0, 2}, {1, 2}, {2, 3}}));
    CHECK(meek.directed(2, 3));
}

TEST_CASE("jaccard and skeleton_f1") {
    Dag truth(4, {{0, 1}, {1, 2}, {2, 3}});
    Cpdag exact = cpdag_of(truth);
    CHECK(jaccard(exact, exact) == 1.0);
    CHECK(skeleton_f1(exact, truth) == 1.0);

    Cpdag off(4);
    off.set_undirected(0, 1);
    off.set_undirected(0, 3);  // one hit, one false positive, two misses
    CHECK(jaccard(off, exact) == doctest::Approx(0.25));
    const double precision = 0.5, recall = 1.0 / 3.0;
    CHECK(skeleton_f1(off, truth) ==
          doctest::Approx(2 * precision * recall / (precision + recall)));
    CHECK(jaccard(Cpdag(4), Cpdag(4)) == 1.0);  // both empty
}

TEST_CASE("perturb removes or adds the requested edge count deterministically") {
    Cpdag g = cpdag_of(Dag(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 5}}));
    const auto base_edges = g.skeleton_edges().size();

    PerturbResult fn = perturb(g, PerturbMode::fn, 0.3, 5);
    CHECK(fn.requested == 2);  // ceil(0.3 * 6)
    CHECK(fn.applied == 2);
    CHECK(fn.graph.skeleton_edges().size() == base_edges - 2);
    PerturbResult fn2 = perturb(g, PerturbMode::fn, 0.3, 5);
    CHECK(fn.graph == fn2.graph);

    PerturbResult fp = perturb(g, PerturbMode::fp, 0.3, 5);
    CHECK(fp.applied == fp.requested);
    CHECK(fp.graph.skeleton_edges().size() == base_edges + 2);
    fp.graph.validate();  // added edges kept the directed part acyclic

    PerturbResult none = perturb(g, PerturbMode::fn, 0.0, 5);
    CHECK(none.graph == g);
}

TEST_CASE("graph csv round trip") {
    Cpdag g(3);
    g.set_directed(2, 0);
    g.set_undirected(0, 1);
    const std::vector<std::string> names{"x", "y", "z"};
    const std::string path = "test_tmp_graph.csv";
    write_graph_csv(g, names, path);
    std::vector<std::string> back_names;
    Cpdag back = read_graph_csv(path, &back_names);
    CHECK(back == g);
    CHECK(back_names == names);
    std::remove(path.c_str());
}

}  // TEST_SUITE
