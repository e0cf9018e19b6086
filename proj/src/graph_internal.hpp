#ifndef WCS_SRC_GRAPH_INTERNAL_HPP
#define WCS_SRC_GRAPH_INTERNAL_HPP

#include <span>
#include <utility>
#include <vector>

#include "bitset.hpp"
#include "wcs/graph.hpp"

namespace wcs::detail {

std::vector<Bits> adjacency_bits(const UndirectedGraph& g);

struct EliminationResult {
    std::vector<std::vector<int>> cliques;  // eliminated node first
    int width = 0;
};

EliminationResult eliminate(const UndirectedGraph& g, std::span<const int> order);

/// Tree decomposition from an elimination order: one clique per eliminated
/// node, non-maximal cliques contracted into a neighbour, components chained
/// so that the result is a single tree.
struct Decomposition {
    std::vector<std::vector<int>> vars;  // sorted
    std::vector<std::pair<int, int>> edges;
    std::vector<int> var_cluster;  // -1 for nodes outside the order
    std::vector<int> order_pos;    // -1 for nodes outside the order
};

Decomposition decompose(const UndirectedGraph& g, std::span<const int> order);

}  // namespace wcs::detail

#endif
