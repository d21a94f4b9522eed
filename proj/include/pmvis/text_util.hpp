#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pmvis {

/// ASCII lowercase copy. Identifier normalization is ASCII-only; non-ASCII
/// bytes pass through untouched.
std::string ascii_lower(std::string_view s);

/// Split on runs of whitespace; no empty tokens.
std::vector<std::string> whitespace_tokens(std::string_view s);

/// Levenshtein edit distance (unit costs).
std::size_t edit_distance(std::string_view a, std::string_view b);

/// SQL LIKE with % and _ wildcards, case-sensitive.
bool like_match(std::string_view text, std::string_view pattern);

/// True iff some contiguous run of `min_run` tokens from `needle_tokens`
/// occurs, in order, inside `haystack_tokens` (case-insensitive).
bool contains_token_run(const std::vector<std::string>& haystack_tokens,
                        const std::vector<std::string>& needle_tokens,
                        std::size_t min_run);

}  // namespace pmvis
