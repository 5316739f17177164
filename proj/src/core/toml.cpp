#include "toml.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace uwvo::toml {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& origin, size_t line,
                       const std::string& msg) {
  throw ParseError("toml: " + msg + " at " + origin + ":" +
                   std::to_string(line));
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' &&
        c != '.')
      return false;
  return true;
}

Value parse_scalar(const std::string& raw, const std::string& origin,
                   size_t line);

Value parse_array(const std::string& raw, const std::string& origin,
                  size_t line) {
  std::vector<Value> items;
  std::string body = trim(raw.substr(1, raw.size() - 2));
  size_t pos = 0;
  while (pos < body.size()) {
    size_t end = pos;
    bool in_string = false;
    while (end < body.size() && (in_string || body[end] != ',')) {
      if (body[end] == '"') in_string = !in_string;
      ++end;
    }
    std::string item = trim(body.substr(pos, end - pos));
    if (!item.empty()) items.push_back(parse_scalar(item, origin, line));
    pos = end + 1;
  }
  return Value{std::move(items)};
}

Value parse_scalar(const std::string& raw, const std::string& origin,
                   size_t line) {
  if (raw.empty()) fail(origin, line, "empty value");
  if (raw.front() == '[') {
    if (raw.back() != ']') fail(origin, line, "unterminated array");
    return parse_array(raw, origin, line);
  }
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"')
      fail(origin, line, "unterminated string");
    return Value{raw.substr(1, raw.size() - 2)};
  }
  if (raw == "true") return Value{true};
  if (raw == "false") return Value{false};

  // Integer first (no '.', 'e', 'E', "inf", "nan"), then float.
  bool looks_integer =
      raw.find_first_of(".eE") == std::string::npos &&
      raw.find("inf") == std::string::npos &&
      raw.find("nan") == std::string::npos;
  if (looks_integer) {
    int64_t iv = 0;
    auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), iv);
    if (ec == std::errc() && p == raw.data() + raw.size()) return Value{iv};
  }
  double dv = 0.0;
  auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), dv);
  if (ec == std::errc() && p == raw.data() + raw.size()) return Value{dv};
  fail(origin, line, "cannot parse value '" + raw + "'");
}

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

void format_number(std::string& out, double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    // Keep a ".0" so the value reparses as a float.
    out += std::to_string(static_cast<int64_t>(v));
    out += ".0";
    return;
  }
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

void serialize_value(std::string& out, const Value& value) {
  if (std::holds_alternative<bool>(value.v)) {
    out += std::get<bool>(value.v) ? "true" : "false";
  } else if (std::holds_alternative<int64_t>(value.v)) {
    out += std::to_string(std::get<int64_t>(value.v));
  } else if (std::holds_alternative<double>(value.v)) {
    format_number(out, std::get<double>(value.v));
  } else if (std::holds_alternative<std::string>(value.v)) {
    out += '"';
    out += std::get<std::string>(value.v);
    out += '"';
  } else {
    out += '[';
    const auto& arr = std::get<std::vector<Value>>(value.v);
    for (size_t i = 0; i < arr.size(); ++i) {
      if (i) out += ", ";
      serialize_value(out, arr[i]);
    }
    out += ']';
  }
}

}  // namespace

double Value::as_double() const {
  if (std::holds_alternative<double>(v)) return std::get<double>(v);
  if (std::holds_alternative<int64_t>(v))
    return static_cast<double>(std::get<int64_t>(v));
  throw InvalidArgumentError("toml: value is not a number");
}

int64_t Value::as_int() const {
  if (std::holds_alternative<int64_t>(v)) return std::get<int64_t>(v);
  throw InvalidArgumentError("toml: value is not an integer");
}

bool Value::as_bool() const {
  if (std::holds_alternative<bool>(v)) return std::get<bool>(v);
  throw InvalidArgumentError("toml: value is not a boolean");
}

const std::string& Value::as_string() const {
  if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
  throw InvalidArgumentError("toml: value is not a string");
}

const std::vector<Value>& Value::as_array() const {
  if (std::holds_alternative<std::vector<Value>>(v))
    return std::get<std::vector<Value>>(v);
  throw InvalidArgumentError("toml: value is not an array");
}

const Value& Table::at(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end())
    throw InvalidArgumentError("toml: missing key '" + key + "'");
  return it->second;
}

double Table::get_double(const std::string& key, double fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second.as_double();
}

int64_t Table::get_int(const std::string& key, int64_t fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second.as_int();
}

bool Table::get_bool(const std::string& key, bool fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second.as_bool();
}

std::string Table::get_string(const std::string& key,
                              const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second.as_string();
}

std::vector<double> Table::get_double_array(const std::string& key) const {
  std::vector<double> out;
  for (const Value& v : at(key).as_array()) out.push_back(v.as_double());
  return out;
}

Table parse(const std::string& text, const std::string& origin) {
  Table table;
  std::istringstream in(text);
  std::string line, section;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') fail(origin, line_no, "unterminated section");
      section = trim(body.substr(1, body.size() - 2));
      if (!valid_key(section)) fail(origin, line_no, "bad section name");
      continue;
    }
    size_t eq = body.find('=');
    if (eq == std::string::npos) fail(origin, line_no, "expected key = value");
    std::string key = trim(body.substr(0, eq));
    if (!valid_key(key)) fail(origin, line_no, "bad key '" + key + "'");
    if (!section.empty()) key = section + "." + key;
    table.set(key, parse_scalar(trim(body.substr(eq + 1)), origin, line_no));
  }
  return table;
}

Table parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("toml: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

std::string serialize(const Table& table) {
  std::string out;
  // Top-level keys first, then sections; std::map keeps keys sorted, which
  // groups dotted keys by section.
  for (const auto& [key, value] : table.entries()) {
    if (key.find('.') != std::string::npos) continue;
    out += key;
    out += " = ";
    serialize_value(out, value);
    out += '\n';
  }
  std::string current_section;
  for (const auto& [key, value] : table.entries()) {
    size_t dot = key.find('.');
    if (dot == std::string::npos) continue;
    std::string section = key.substr(0, dot);
    if (section != current_section) {
      if (!out.empty()) out += '\n';
      out += '[' + section + "]\n";
      current_section = section;
    }
    out += key.substr(dot + 1);
    out += " = ";
    serialize_value(out, value);
    out += '\n';
  }
  return out;
}

void write_file(const Table& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("toml: cannot open " + path + " for writing");
  std::string text = serialize(table);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("toml: write failed for " + path);
}

}  // namespace uwvo::toml
