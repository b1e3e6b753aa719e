#include "tfi/toml_lite.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace tfi {

namespace {

using nlohmann::json;

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw std::runtime_error("config parse error, line " + std::to_string(line) + ": " + msg);
}

void skip_ws(const std::string& s, std::size_t& i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

std::string parse_bare_key(const std::string& s, std::size_t& i, std::size_t line) {
  std::size_t start = i;
  while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_' || s[i] == '-'))
    ++i;
  if (i == start) fail(line, "expected a key");
  return s.substr(start, i - start);
}

json parse_value(const std::string& s, std::size_t& i, std::size_t line);

json parse_array(const std::string& s, std::size_t& i, std::size_t line) {
  json arr = json::array();
  ++i;  // '['
  skip_ws(s, i);
  if (i < s.size() && s[i] == ']') {
    ++i;
    return arr;
  }
  while (true) {
    skip_ws(s, i);
    arr.push_back(parse_value(s, i, line));
    skip_ws(s, i);
    if (i >= s.size()) fail(line, "unterminated array");
    if (s[i] == ',') {
      ++i;
      skip_ws(s, i);
      if (i < s.size() && s[i] == ']') {  // trailing comma
        ++i;
        return arr;
      }
      continue;
    }
    if (s[i] == ']') {
      ++i;
      return arr;
    }
    fail(line, "expected ',' or ']' in array");
  }
}

json parse_value(const std::string& s, std::size_t& i, std::size_t line) {
  skip_ws(s, i);
  if (i >= s.size()) fail(line, "missing value");
  const char c = s[i];
  if (c == '"') {
    std::string out;
    ++i;
    while (i < s.size() && s[i] != '"') {
      if (s[i] == '\\' && i + 1 < s.size()) {
        ++i;
        switch (s[i]) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(line, "unsupported escape");
        }
      } else {
        out += s[i];
      }
      ++i;
    }
    if (i >= s.size()) fail(line, "unterminated string");
    ++i;
    return json(out);
  }
  if (c == '[') return parse_array(s, i, line);
  if (s.compare(i, 4, "true") == 0) {
    i += 4;
    return json(true);
  }
  if (s.compare(i, 5, "false") == 0) {
    i += 5;
    return json(false);
  }
  // number
  std::size_t start = i;
  while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '+' ||
                          s[i] == '-' || s[i] == '.' || s[i] == 'e' || s[i] == 'E' || s[i] == '_'))
    ++i;
  if (i == start) fail(line, "unrecognized value");
  std::string num = s.substr(start, i - start);
  std::erase(num, '_');
  try {
    if (num.find_first_of(".eE") == std::string::npos) {
      return json(std::stoll(num));
    }
    std::size_t pos = 0;
    const double v = std::stod(num, &pos);
    if (pos != num.size()) fail(line, "malformed number '" + num + "'");
    return json(v);
  } catch (const std::invalid_argument&) {
    fail(line, "malformed number '" + num + "'");
  } catch (const std::out_of_range&) {
    fail(line, "number out of range '" + num + "'");
  }
}

std::vector<std::string> parse_dotted_name(const std::string& s, std::size_t& i, std::size_t line) {
  std::vector<std::string> parts;
  while (true) {
    skip_ws(s, i);
    parts.push_back(parse_bare_key(s, i, line));
    skip_ws(s, i);
    if (i < s.size() && s[i] == '.') {
      ++i;
      continue;
    }
    return parts;
  }
}

}  // namespace

json parse_toml_lite(const std::string& text) {
  json root = json::object();
  json* current = &root;

  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::size_t i = 0;
    skip_ws(raw, i);
    if (i >= raw.size() || raw[i] == '#') continue;

    if (raw[i] == '[') {
      const bool array_table = i + 1 < raw.size() && raw[i + 1] == '[';
      i += array_table ? 2 : 1;
      const auto path = parse_dotted_name(raw, i, line_no);
      const std::string closer = array_table ? "]]" : "]";
      skip_ws(raw, i);
      if (raw.compare(i, closer.size(), closer) != 0) fail(line_no, "unterminated table header");
      i += closer.size();
      skip_ws(raw, i);
      if (i < raw.size() && raw[i] != '#') fail(line_no, "trailing characters after header");

      json* parent = &root;
      for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        if (parent->is_array()) parent = &parent->back();
        parent = &(*parent)[path[k]];
        if (parent->is_null()) *parent = json::object();
      }
      if (parent->is_array()) parent = &parent->back();
      json& slot = (*parent)[path.back()];
      if (array_table) {
        if (slot.is_null()) slot = json::array();
        if (!slot.is_array()) fail(line_no, "redefinition of '" + path.back() + "'");
        slot.push_back(json::object());
        current = &slot.back();
      } else {
        if (slot.is_null()) slot = json::object();
        if (!slot.is_object()) fail(line_no, "redefinition of '" + path.back() + "'");
        current = &slot;
      }
      continue;
    }

    const auto keypath = parse_dotted_name(raw, i, line_no);
    skip_ws(raw, i);
    if (i >= raw.size() || raw[i] != '=') fail(line_no, "expected '='");
    ++i;
    json value = parse_value(raw, i, line_no);
    skip_ws(raw, i);
    if (i < raw.size() && raw[i] != '#') fail(line_no, "trailing characters after value");

    json* target = current;
    for (std::size_t k = 0; k + 1 < keypath.size(); ++k) {
      target = &(*target)[keypath[k]];
      if (target->is_null()) *target = json::object();
      if (!target->is_object()) fail(line_no, "'" + keypath[k] + "' is not a table");
    }
    if (target->contains(keypath.back())) fail(line_no, "duplicate key '" + keypath.back() + "'");
    (*target)[keypath.back()] = std::move(value);
  }
  return root;
}

}  // namespace tfi
