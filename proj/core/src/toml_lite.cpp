#include "ars/toml_lite.hpp"

#include <cctype>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "ars/error.hpp"

namespace ars {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& message) {
  throw Error(ErrorCode::ParseFailure,
              "toml line " + std::to_string(line) + ": " + message);
}

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Removes a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_string = !in_string;
    if (s[i] == '#' && !in_string) return s.substr(0, i);
  }
  return s;
}

bool valid_bare_key(const std::string& key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) {
      return false;
    }
  }
  return true;
}

nlohmann::json parse_scalar(const std::string& raw, std::size_t line);

nlohmann::json parse_value(const std::string& raw, std::size_t line) {
  const std::string text = strip(raw);
  if (text.empty()) fail(line, "missing value");
  if (text.front() == '[') {
    if (text.back() != ']') fail(line, "unterminated array");
    nlohmann::json arr = nlohmann::json::array();
    std::string inner = text.substr(1, text.size() - 2);
    std::string item;
    bool in_string = false;
    int depth = 0;
    for (char c : inner) {
      if (c == '"') in_string = !in_string;
      if (!in_string) {
        if (c == '[') ++depth;
        if (c == ']') --depth;
        if (c == ',' && depth == 0) {
          const std::string piece = strip(item);
          if (!piece.empty()) arr.push_back(parse_value(piece, line));
          item.clear();
          continue;
        }
      }
      item += c;
    }
    const std::string piece = strip(item);
    if (!piece.empty()) arr.push_back(parse_value(piece, line));
    return arr;
  }
  return parse_scalar(text, line);
}

nlohmann::json parse_scalar(const std::string& text, std::size_t line) {
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"') fail(line, "unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < text.size(); ++i) {
      char c = text[i];
      if (c == '\\' && i + 2 < text.size()) {
        const char next = text[++i];
        switch (next) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(line, std::string("unsupported escape '\\") + next + "'");
        }
      } else {
        out += c;
      }
    }
    return out;
  }
  if (text == "true") return true;
  if (text == "false") return false;
  // numbers: integers stay integral so 64-bit seeds survive round trips
  try {
    std::size_t used = 0;
    if (text.find_first_of(".eE") == std::string::npos) {
      if (!text.empty() && text[0] == '-') {
        const long long v = std::stoll(text, &used);
        if (used == text.size()) return v;
      } else {
        const unsigned long long v = std::stoull(text, &used);
        if (used == text.size()) return v;
      }
    }
    used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  fail(line, "cannot parse value '" + text + "'");
}

}  // namespace

std::string toml_to_json_text(const std::string& toml_text) {
  nlohmann::json root = nlohmann::json::object();
  nlohmann::json* current = &root;

  std::istringstream in(toml_text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip(strip_comment(raw));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated table header");
      if (line.size() > 2 && line[1] == '[') fail(line_no, "arrays of tables are not supported");
      const std::string path = strip(line.substr(1, line.size() - 2));
      if (path.empty()) fail(line_no, "empty table name");
      current = &root;
      std::istringstream parts(path);
      std::string part;
      while (std::getline(parts, part, '.')) {
        part = strip(part);
        if (!valid_bare_key(part)) fail(line_no, "invalid table name '" + part + "'");
        current = &(*current)[part];
        if (!current->is_object() && !current->is_null()) {
          fail(line_no, "table '" + part + "' conflicts with an existing key");
        }
        if (current->is_null()) *current = nlohmann::json::object();
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected key = value");
    const std::string key = strip(line.substr(0, eq));
    if (!valid_bare_key(key)) fail(line_no, "invalid key '" + key + "'");
    if (current->contains(key)) fail(line_no, "duplicate key '" + key + "'");
    (*current)[key] = parse_value(line.substr(eq + 1), line_no);
  }
  return root.dump(2);
}

}  // namespace ars
