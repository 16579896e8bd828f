// kabcheck: verification toolkit for knowledge and action bases.
// SPDX-License-Identifier: Apache-2.0
#ifndef KAB_PARSER_HPP
#define KAB_PARSER_HPP

#include <string_view>

#include "kab/mu.hpp"
#include "kab/spec.hpp"

namespace kab {

// Parses and validates a complete specification. Throws ParseError at the
// first syntax error; ValidationError collects every semantic violation.
KabSpec parse_kab(std::string_view text);

// Parses a formula against an existing specification's symbols; constants
// must already be known to the universe. May intern fresh variables.
Mu parse_formula(std::string_view text, Universe& u);

// A formula file: one formula per nonempty line group, separated by lines
// containing only a semicolon, or by top-level `;` after each formula.
std::vector<Mu> parse_formula_file(std::string_view text, Universe& u);

}  // namespace kab

#endif  // KAB_PARSER_HPP
