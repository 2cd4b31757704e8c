#pragma once

#include <algorithm>
#include <cctype>
#include <string_view>

namespace seeker::lexical {

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v';
}

inline bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

inline bool is_qualified_char(char c) {
  return is_name_char(c) || c == '.';
}

inline bool is_member_char(char c) {
  return is_name_char(c) || c == '<' || c == '>';
}

inline bool is_qualified_name(std::string_view text) {
  if (text.empty() || text.front() == '.' || text.back() == '.' ||
      text.find("..") != std::string_view::npos) {
    return false;
  }
  return std::all_of(text.begin(), text.end(), is_qualified_char);
}

inline bool is_member_name(std::string_view text) {
  return !text.empty() && std::all_of(text.begin(), text.end(), is_member_char);
}

inline bool is_type_name(std::string_view text) {
  while (text.size() >= 2 && text.substr(text.size() - 2) == "[]") {
    text.remove_suffix(2);
  }
  return is_qualified_name(text);
}

inline std::string_view trim(std::string_view text) {
  while (!text.empty() && is_space(text.front())) {
    text.remove_prefix(1);
  }
  while (!text.empty() && is_space(text.back())) {
    text.remove_suffix(1);
  }
  return text;
}

} // namespace seeker::lexical
