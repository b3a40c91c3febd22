#pragma once

#include <map>
#include <string>
#include <string_view>

namespace rydgate {

/// Evaluates an arithmetic expression over named values.
///
/// Grammar: numbers, identifiers, + - * / ^ (right associative), unary minus,
/// parentheses and sqrt(...). `pi` is predefined. Throws ConfigError naming
/// the offending token.
double evaluate_expression(std::string_view text, const std::map<std::string, double>& names);

}  // namespace rydgate
