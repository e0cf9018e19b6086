#ifndef WCS_GENERATORS_HPP
#define WCS_GENERATORS_HPP

#include <cstdint>
#include <string>

#include "wcs/model.hpp"

namespace wcs {

enum class Family { multipartite, two_layer, grid, coding };

struct GenSpec {
    Family family = Family::multipartite;
    std::uint64_t seed = 0;
    // multipartite
    int n_root = 100;
    int n_total = 200;
    int parents = 3;
    // two-layer
    int roots = 50;
    int leaves = 150;
    int min_parents = 1;
    int max_parents = 3;
    // grid
    int rows = 15;
    int cols = 30;
    // coding
    int code_bits = 50;
    double sigma = 0.4;
    double flip = -1.0;  // channel flip probability; < 0 derives it from sigma

    /// Throws std::invalid_argument when the family's parameters are invalid.
    void validate() const;
};

Family parse_family(const std::string& name);
std::string family_name(Family f);

/// Roots X0..X(n_root-1) with uniform priors; every later variable draws
/// `parents` distinct parents among its predecessors. Binary, with each
/// row (u, 1-u) for u uniform on [0, 1).
Network gen_multipartite(const GenSpec& spec);

/// Roots R*, leaves L*, each leaf with min..max parents among the roots.
Network gen_two_layer(const GenSpec& spec);

/// Node (r, c) has index r * cols + c and parents (r-1, c), (r, c-1).
Network gen_grid(const GenSpec& spec);

struct CodingInstance {
    Network net;
    Evidence evidence;
    double flip = 0.0;
};

/// Flip probability of a binary symmetric channel equivalent to
/// thresholding a unit-separated Gaussian channel with noise sigma:
/// Phi(-0.5 / sigma).
double channel_flip_probability(double sigma);

/// K code bits U*, K parity bits P* (each the XOR of three distinct code
/// bits), and one channel output per code and parity bit (YU*, YP*). All
/// outputs are observed, with values from a random codeword sent through
/// the channel.
CodingInstance gen_coding(const GenSpec& spec);

/// Dispatches on spec.family; evidence is empty except for coding.
CodingInstance generate(const GenSpec& spec);

enum class EvidencePolicy { leaves, any };

/// `count` distinct variables chosen uniformly (childless ones for the
/// leaves policy), observed at the values of one forward sample.
Evidence pick_evidence(const Network& net, EvidencePolicy policy, int count, std::uint64_t seed);

}  // namespace wcs

#endif
