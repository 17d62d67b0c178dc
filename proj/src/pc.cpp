#include "causalts/pc.hpp"

#include <algorithm>
#include <functional>

#include "causalts/errors.hpp"

namespace causalts {

bool Sepsets::contains(int a, int b) const {
    return table.count({std::min(a, b), std::max(a, b)}) > 0;
}

const std::vector<int>& Sepsets::at(int a, int b) const {
    auto it = table.find({std::min(a, b), std::max(a, b)});
    if (it == table.end()) throw DataError("no sepset recorded for pair");
    return it->second;
}

void Sepsets::put(int a, int b, std::vector<int> z) {
    std::sort(z.begin(), z.end());
    table[{std::min(a, b), std::max(a, b)}] = std::move(z);
}

namespace {

// Visit all size-k subsets of `cand` (sorted ascending) in lexicographic order;
// `fn` returns true to stop early. Returns true if stopped.
bool for_each_subset(const std::vector<int>& cand, int k,
                     const std::function<bool(const std::vector<int>&)>& fn) {
    const int n = static_cast<int>(cand.size());
    if (k > n) return false;
    std::vector<int> pick(static_cast<std::size_t>(k));
    std::vector<int> subset(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) pick[static_cast<std::size_t>(i)] = i;
    while (true) {
        for (int i = 0; i < k; ++i) {
            subset[static_cast<std::size_t>(i)] = cand[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])];
        }
        if (fn(subset)) return true;
        // Advance to the next combination.
        int i = k - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == i + n - k) --i;
        if (i < 0) return false;
        ++pick[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) {
            pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
}

// Candidate conditioning variables: snapshot neighbors of `from` minus `other`.
std::vector<int> candidates(const std::vector<std::vector<int>>& snapshot, int from, int other) {
    std::vector<int> out;
    for (int v : snapshot[static_cast<std::size_t>(from)]) {
        if (v != other) out.push_back(v);
    }
    return out;
}

}  // namespace

Cpdag pc_skeleton(CiTest& ci, Sepsets& sepsets) {
    const int n = ci.n_vars();
    Cpdag g = Cpdag::complete(n);
    sepsets.table.clear();

    for (int depth = 0;; ++depth) {
        // Freeze adjacency for this depth (stable variant).
        std::vector<std::vector<int>> snapshot(static_cast<std::size_t>(n));
        for (int v = 0; v < n; ++v) snapshot[static_cast<std::size_t>(v)] = g.neighbors(v);

        // Continue while some adjacent pair still has |Adj(a)\{b}| >= depth.
        bool any_candidate = false;
        for (int a = 0; a < n; ++a) {
            int deg = static_cast<int>(snapshot[static_cast<std::size_t>(a)].size());
            if (deg >= 1 && deg - 1 >= depth) {
                any_candidate = true;
                break;
            }
        }
        if (!any_candidate) break;

        std::vector<std::pair<int, int>> removals;
        for (int a = 0; a < n; ++a) {
            for (int b : snapshot[static_cast<std::size_t>(a)]) {
                if (b <= a) continue;
                bool separated = false;
                // Test from a's side, then from b's side.
                for (int side = 0; side < 2 && !separated; ++side) {
                    int from = side == 0 ? a : b;
                    int other = side == 0 ? b : a;
                    std::vector<int> cand = candidates(snapshot, from, other);
                    separated = for_each_subset(cand, depth, [&](const std::vector<int>& z) {
                        CiResult res = ci.test(a, b, z);
                        if (res.independent) {
                            sepsets.put(a, b, z);
                            return true;
                        }
                        return false;
                    });
                }
                if (separated) removals.emplace_back(a, b);
            }
        }
        for (auto [a, b] : removals) g.remove_edge(a, b);
    }
    return g;
}

OrientationReport orient_v_structures(Cpdag& g, const Sepsets& sepsets) {
    const int n = g.n_vars();
    OrientationReport report;
    // demand(i,j) = 1 means some triple wants i -> j.
    Eigen::MatrixXi demand = Eigen::MatrixXi::Zero(n, n);
    for (int c = 0; c < n; ++c) {
        std::vector<int> nb = g.neighbors(c);
        for (std::size_t x = 0; x < nb.size(); ++x) {
            for (std::size_t y = x + 1; y < nb.size(); ++y) {
                int a = nb[x];
                int b = nb[y];
                if (g.adjacent(a, b)) continue;           // shielded
                if (!sepsets.contains(a, b)) continue;    // no separation evidence
                const std::vector<int>& z = sepsets.at(a, b);
                if (std::find(z.begin(), z.end(), c) == z.end()) {
                    demand(a, c) = 1;
                    demand(b, c) = 1;
                    report.v_structures.emplace_back(a, c, b);
                }
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (demand(i, j) != 0 && demand(j, i) != 0) {
                // Contradictory arrowheads: keep the edge undirected.
                report.conflicts.emplace_back(i, j);
            } else if (demand(i, j) != 0) {
                g.set_directed(i, j);
            } else if (demand(j, i) != 0) {
                g.set_directed(j, i);
            }
        }
    }
    return report;
}

namespace {

// R1: a -> b, b - c, a and c non-adjacent  =>  b -> c.
bool rule1(Cpdag& g) {
    const int n = g.n_vars();
    for (int b = 0; b < n; ++b) {
        for (int c = 0; c < n; ++c) {
            if (c == b || !g.undirected(b, c)) continue;
            for (int a = 0; a < n; ++a) {
                if (a == b || a == c) continue;
                if (g.directed(a, b) && !g.adjacent(a, c)) {
                    g.set_directed(b, c);
                    return true;
                }
            }
        }
    }
    return false;
}

// R2: a -> k -> b with a - b  =>  a -> b.
bool rule2(Cpdag& g) {
    const int n = g.n_vars();
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            if (b == a || !g.undirected(a, b)) continue;
            for (int k = 0; k < n; ++k) {
                if (k == a || k == b) continue;
                if (g.directed(a, k) && g.directed(k, b)) {
                    g.set_directed(a, b);
                    return true;
                }
            }
        }
    }
    return false;
}

// R3: a - b, a - c, a - d, c -> b, d -> b, c and d non-adjacent  =>  a -> b.
bool rule3(Cpdag& g) {
    const int n = g.n_vars();
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            if (b == a || !g.undirected(a, b)) continue;
            for (int c = 0; c < n; ++c) {
                if (c == a || c == b || !g.undirected(a, c) || !g.directed(c, b)) continue;
                for (int d = c + 1; d < n; ++d) {
                    if (d == a || d == b || !g.undirected(a, d) || !g.directed(d, b)) continue;
                    if (!g.adjacent(c, d)) {
                        g.set_directed(a, b);
                        return true;
                    }
                }
            }
        }
    }
    return false;
}

// R4: a - b, a - c, c -> d, d -> b, b and c non-adjacent, a and d adjacent
// => a -> b. (If b -> a held, either orientation of a - c closes a directed
// cycle through c -> d -> b or creates a new collider b -> a <- c.)
bool rule4(Cpdag& g) {
    const int n = g.n_vars();
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            if (b == a || !g.undirected(a, b)) continue;
            for (int c = 0; c < n; ++c) {
                if (c == a || c == b || !g.undirected(a, c) || g.adjacent(b, c)) continue;
                for (int d = 0; d < n; ++d) {
                    if (d == a || d == b || d == c) continue;
                    if (g.directed(c, d) && g.directed(d, b) && g.adjacent(a, d)) {
                        g.set_directed(a, b);
                        return true;
                    }
                }
            }
        }
    }
    return false;
}

}  // namespace

int meek_closure(Cpdag& g) {
    int oriented = 0;
    bool changed = true;
    while (changed) {
        changed = rule1(g) || rule2(g) || rule3(g) || rule4(g);
        if (changed) ++oriented;
    }
    return oriented;
}

Cpdag pc(CiTest& ci, Sepsets* sepsets_out, OrientationReport* report_out) {
    Sepsets local;
    Sepsets& sep = sepsets_out ? *sepsets_out : local;
    Cpdag g = pc_skeleton(ci, sep);
    OrientationReport report = orient_v_structures(g, sep);
    meek_closure(g);
    g.validate();
    if (report_out) *report_out = std::move(report);
    return g;
}

}  // namespace causalts
