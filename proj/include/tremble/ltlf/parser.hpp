#pragma once

#include <string_view>

#include "tremble/ltlf/formula.hpp"

namespace tremble::ltlf {

/// Parses the concrete LTLf grammar. Precedence from loosest to tightest:
/// `<->`, `->`, `|`, `&`, `U`/`R` (right-associative), unary `! X N F G`.
/// `F φ` becomes `true U φ`, `G φ` becomes `false R φ`, `a -> b` becomes
/// `!a | b` and `a <-> b` becomes `(!a | b) & (!b | a)`.
///
/// Throws SyntaxError, or UnknownAtom for atoms missing from `props`.
Formula parse(std::string_view text, const PropSet& props);

/// Like parse(), but declares every atom it meets in `props`.
Formula parse_declaring(std::string_view text, PropSet& props);

}  // namespace tremble::ltlf
