#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace causalrag::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

// Collapses whitespace runs to single spaces and trims the ends.
std::string collapse_whitespace(std::string_view s);

// trim + case-fold + inner whitespace collapse. Used for node identity and
// reference matching.
std::string canonical(std::string_view s);

// True when the canonical forms contain one another (either direction).
bool normalized_match(std::string_view a, std::string_view b);

// True when the canonical form of `needle` occurs inside the canonical form
// of `haystack` (one direction only).
bool normalized_contains(std::string_view haystack, std::string_view needle);

// Lowercased alphanumeric token runs.
std::vector<std::string> tokenize(std::string_view s);

// Whitespace-separated token count (the Document token_count approximation).
int approx_token_count(std::string_view s);

std::vector<std::string> split(std::string_view s, char delim);
std::vector<std::string> split_on(std::string_view s, std::string_view delim);

// Splits on '\n', dropping trailing '\r' on each line.
std::vector<std::string> lines_of(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool starts_with_ci(std::string_view s, std::string_view prefix);

}  // namespace causalrag::text
