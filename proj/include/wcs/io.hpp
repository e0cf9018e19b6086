#ifndef WCS_IO_HPP
#define WCS_IO_HPP

#include <iosfwd>
#include <string>
#include <string_view>

#include "wcs/model.hpp"

namespace wcs {

/// Malformed input text. Derives from ValidationError so callers that only
/// care about "bad input" can catch one type.
class ParseError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Network file:
///   { "variables": [ {"name": str, "states": [str,...]}, ... ],
///     "cpts": [ {"child": str, "parents": [str,...], "table": [[num,...],...]}, ... ] }
Network parse_network(std::string_view text);
std::string serialize_network(const Network& net);

/// Evidence file: { "evidence": { name: state-label, ... } }
Evidence parse_evidence(std::string_view text, const Network& net);
std::string serialize_evidence(const Evidence& e, const Network& net);

/// CSV with header variable,state,probability.
std::string marginals_csv(const Marginals& m, const Network& net);
Marginals parse_marginals_csv(std::string_view text, const Network& net);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace wcs

#endif
