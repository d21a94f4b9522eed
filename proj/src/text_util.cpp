#include "pmvis/text_util.hpp"

#include <algorithm>
#include <cctype>

namespace pmvis {

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::vector<std::string> whitespace_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.emplace_back(s.substr(start, i - start));
  }
  return out;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

bool like_match(std::string_view text, std::string_view pattern) {
  // Iterative wildcard match; '%' = any run, '_' = any single char.
  std::size_t t = 0, p = 0;
  std::size_t star_p = std::string_view::npos, star_t = 0;
  while (t < text.size()) {
    if (p < pattern.size() && (pattern[p] == '_' || pattern[p] == text[t])) {
      ++t;
      ++p;
    } else if (p < pattern.size() && pattern[p] == '%') {
      star_p = p++;
      star_t = t;
    } else if (star_p != std::string_view::npos) {
      p = star_p + 1;
      t = ++star_t;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '%') ++p;
  return p == pattern.size();
}

bool contains_token_run(const std::vector<std::string>& haystack_tokens,
                        const std::vector<std::string>& needle_tokens,
                        std::size_t min_run) {
  if (needle_tokens.size() < min_run || haystack_tokens.size() < min_run)
    return false;
  auto eq = [](const std::string& a, const std::string& b) {
    return ascii_lower(a) == ascii_lower(b);
  };
  for (std::size_t start = 0; start + min_run <= needle_tokens.size(); ++start) {
    for (std::size_t h = 0; h + min_run <= haystack_tokens.size(); ++h) {
      bool all = true;
      for (std::size_t k = 0; k < min_run; ++k) {
        if (!eq(haystack_tokens[h + k], needle_tokens[start + k])) {
          all = false;
          break;
        }
      }
      if (all) return true;
    }
  }
  return false;
}

}  // namespace pmvis
