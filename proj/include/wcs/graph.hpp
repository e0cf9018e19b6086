#ifndef WCS_GRAPH_HPP
#define WCS_GRAPH_HPP

#include <span>
#include <utility>
#include <vector>

#include "wcs/model.hpp"

namespace wcs {

/// Simple undirected graph over nodes 0..n-1 with sorted adjacency lists.
class UndirectedGraph {
public:
    UndirectedGraph() = default;
    explicit UndirectedGraph(std::size_t n) : adj_(n) {}

    std::size_t size() const { return adj_.size(); }
    /// Ignores self-loops and duplicates.
    void add_edge(int u, int v);
    bool has_edge(int u, int v) const;
    const std::vector<int>& neighbors(int v) const { return adj_[static_cast<std::size_t>(v)]; }
    std::size_t degree(int v) const { return neighbors(v).size(); }
    std::size_t edge_count() const;
    /// Edges as (u, v) with u < v, lexicographically sorted.
    std::vector<std::pair<int, int>> edges() const;
    /// Same node ids; nodes in `removed` keep their id but lose every edge.
    UndirectedGraph without(std::span<const int> removed) const;

private:
    std::vector<std::vector<int>> adj_;
};

/// Elimination ordering: `order[0]` is eliminated first. Reading the
/// sequence back to front gives the ordering whose earlier-neighbour counts
/// define the induced width.
struct Ordering {
    std::vector<int> order;
    int width = 0;
};

/// Parents married, directions dropped.
UndirectedGraph moralize(const Network& net);

/// Greedy min-fill over the given nodes (all nodes when `nodes` is empty):
/// each step eliminates the node adding the fewest fill edges, ties to the
/// smallest index.
Ordering min_fill_ordering(const UndirectedGraph& g);
Ordering min_fill_ordering(const UndirectedGraph& g, std::span<const int> nodes);

/// Induced width along an elimination order covering a subset of nodes;
/// nodes outside `order` are ignored. Zero for an empty order.
int induced_width(const UndirectedGraph& g, std::span<const int> order);

/// Min-fill induced width of g after deleting `removed` and its edges.
int adjusted_induced_width(const UndirectedGraph& g, std::span<const int> removed);

/// Tree decomposition of the moral graph with a designated variable set
/// treated as instantiated.
///
/// `clusters` hold residual (non-conditioned) variables only; they bound the
/// width. Conditioned variables appear in `slots` of every cluster holding a
/// CPT that mentions them, closed over tree paths so that each one occupies a
/// connected subtree. Cluster 0 is the root.
struct JoinTree {
    std::vector<std::vector<int>> clusters;
    std::vector<std::vector<int>> slots;
    std::vector<std::pair<int, int>> edges;
    std::vector<std::vector<int>> separators;  // parallel to edges
    std::vector<std::vector<int>> attached;    // CPT indices per cluster
    std::vector<int> cpt_cluster;              // cluster of each CPT
    std::vector<int> conditioned;              // sorted
    int delta = 0;

    std::size_t size() const { return clusters.size(); }
    /// Max residual cluster size minus one (-1 for a tree of empty clusters).
    int width() const;
    std::vector<std::vector<int>> adjacency() const;
    /// Clusters whose slots contain `var`.
    std::vector<int> subtree_of(int var) const;
};

JoinTree build_join_tree(const Network& net, std::span<const int> conditioned);

enum class CutsetKind { loop, w_bounded };

struct Cutset {
    std::vector<int> members;  // sorted
    CutsetKind kind = CutsetKind::loop;
    int certified_width = 0;
    Ordering ordering;  // min-fill ordering of the residual moral graph

    bool contains(int v) const;
};

/// True when the network conditioned on `removed` has an acyclic
/// variable/factor incidence graph, i.e. it behaves as a poly-tree.
bool conditioned_is_singly_connected(const Network& net, std::span<const int> removed);

/// True when the directed graph minus `removed` has no undirected cycle.
bool directed_minus_is_forest(const Network& net, std::span<const int> removed);

/// Deterministic greedy loop-cutset: while the conditioned network has a
/// loop, add the variable with the most factor incidences in the cyclic core
/// (ties to the smallest index).
Cutset find_loop_cutset(const Network& net, const Evidence& e);

/// Greedy set-cover w-cutset; the tree decomposition is rebuilt after every
/// addition. When `enclosing` is given (a cutset certified for a smaller w),
/// the result is obtained by pruning it instead, so it is a subset of it.
Cutset find_w_cutset(const Network& net, const Evidence& e, int w, const Cutset* enclosing = nullptr);

/// Cutsets for w = w_lo..w_hi where each one is pruned from its predecessor.
std::vector<Cutset> nested_w_cutsets(const Network& net, const Evidence& e, int w_lo, int w_hi);

/// Certifies an arbitrary member set: width = adjusted width with members
/// and evidence removed.
Cutset certify_cutset(const Network& net, const Evidence& e, std::vector<int> members, CutsetKind kind);

}  // namespace wcs

#endif
