#ifndef WCS_TEST_FIXTURES_HPP
#define WCS_TEST_FIXTURES_HPP

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <memory>

#include "wcs/exact.hpp"
#include "wcs/graph.hpp"
#include "wcs/model.hpp"

namespace fx {

struct NodeSpec {
    std::string name;
    std::vector<std::string> parents;
    std::vector<std::vector<double>> rows;
    int domain = 2;
};

/// Builds a network from named nodes listed in index order.
wcs::Network build(const std::vector<NodeSpec>& nodes);

/// Binary network over named nodes with random rows in [lo, 1-lo].
wcs::Network random_tables(const std::vector<std::pair<std::string, std::vector<std::string>>>& structure,
                           std::uint64_t seed, double lo = 0.05);

/// Random DAG: node i picks up to max_parents parents among 0..i-1.
/// Domains are drawn from [2, max_domain]. Rows are strictly positive
/// unless zero_prob > 0, in which case each entry is zeroed with that
/// probability (keeping at least one positive entry per row).
wcs::Network random_dag(int n, int max_parents, std::uint64_t seed, int max_domain = 2, double zero_prob = 0.0);

/// Random polytree: each node after the first joins the forest through one
/// edge in a random direction.
wcs::Network random_polytree(int n, std::uint64_t seed, int max_domain = 2);

/// Random evidence over `count` variables with values from a forward sample.
wcs::Evidence random_evidence(const wcs::Network& net, int count, std::uint64_t seed);

wcs::Network chain_ab();  // P(A=1)=0.6, P(B=1|A=1)=0.7, P(B=1|A=0)=0.2
wcs::Network collider();  // A->C<-B with the blanket example tables
wcs::Network diamond(std::uint64_t seed = 1);
/// Best-effort reconstruction of the seven-node example network with
/// nodes A..G (indices 0..6): A->B, A->C, B->D, C->D, C->F, D->F, D->E,
/// F->E, F->G. E is the observed node in the examples.
wcs::Network seven_node(std::uint64_t seed = 3);
/// X1,X2 uniform roots, Y = X1 xor X2 deterministic.
wcs::Network parity();

double max_abs_diff(const wcs::Marginals& a, const wcs::Marginals& b);

/// Longest shortest path in the underlying undirected graph.
int diameter(const wcs::Network& net);

/// Compiled join tree over the cutset plus the evidence.
std::shared_ptr<const wcs::CompiledJoinTree> layout_for(const wcs::Network& net, const wcs::Cutset& c,
                                                        const wcs::Evidence& e);

}  // namespace fx

#endif
