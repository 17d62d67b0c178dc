#ifndef CAUSALTS_PC_HPP
#define CAUSALTS_PC_HPP

#include <map>
#include <tuple>
#include <utility>
#include <vector>

#include "causalts/ci.hpp"
#include "causalts/cpdag.hpp"

namespace causalts {

// Separating sets recorded during skeleton search, keyed by (min, max) pair.
// An entry exists exactly for the pairs whose edge was removed.
struct Sepsets {
    std::map<std::pair<int, int>, std::vector<int>> table;

    bool contains(int a, int b) const;
    const std::vector<int>& at(int a, int b) const;
    void put(int a, int b, std::vector<int> z);
};

// Stable-PC skeleton: at each depth all removal decisions are evaluated against
// the adjacency sets as they stood at the start of the depth and applied
// together afterwards, so the outcome does not depend on scan order. For an
// adjacent pair {a,b} the conditioning sets of the current size are enumerated
// in lexicographic order, first over Adj(a)\{b} then over Adj(b)\{a}; the first
// separating set found is recorded.
Cpdag pc_skeleton(CiTest& ci, Sepsets& sepsets);

struct OrientationReport {
    // (a, c, b) triples oriented as a -> c <- b.
    std::vector<std::tuple<int, int, int>> v_structures;
    // Edges whose two demanded directions contradicted; left undirected.
    std::vector<std::pair<int, int>> conflicts;
};

// Orient unshielded triples a - c - b (a, b non-adjacent) as colliders when c
// is absent from the recorded sepset of (a, b). Contradictory demands on an
// edge cancel out: the edge stays undirected and the conflict is recorded.
OrientationReport orient_v_structures(Cpdag& g, const Sepsets& sepsets);

// Meek rules R1-R4 applied to a fixpoint; returns the number of edges oriented.
// Sound on any PDAG; R4 only fires when orientations beyond v-structures are
// present (background knowledge), never on a fresh PC pattern.
int meek_closure(Cpdag& g);

// Full constraint-based search: skeleton, v-structures, Meek closure.
Cpdag pc(CiTest& ci, Sepsets* sepsets_out = nullptr, OrientationReport* report_out = nullptr);

}  // namespace causalts

#endif
