#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "error.hpp"

namespace uwvo::toml {

// Minimal TOML subset used for run configs and dataset manifests:
// [section] headers, key = value with strings, booleans, integers, floats
// and flat arrays of those. Keys are stored flattened ("section.key").
struct Value {
  std::variant<bool, int64_t, double, std::string, std::vector<Value>> v;

  bool is_number() const {
    return std::holds_alternative<int64_t>(v) ||
           std::holds_alternative<double>(v);
  }
  double as_double() const;
  int64_t as_int() const;
  bool as_bool() const;
  const std::string& as_string() const;
  const std::vector<Value>& as_array() const;
};

class Table {
 public:
  bool contains(const std::string& key) const { return kv_.count(key) > 0; }
  const Value& at(const std::string& key) const;

  double get_double(const std::string& key, double fallback) const;
  int64_t get_int(const std::string& key, int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  std::vector<double> get_double_array(const std::string& key) const;

  void set(const std::string& key, Value value) { kv_[key] = std::move(value); }
  const std::map<std::string, Value>& entries() const { return kv_; }

 private:
  std::map<std::string, Value> kv_;
};

Table parse(const std::string& text, const std::string& origin = "<string>");
Table parse_file(const std::string& path);

// Serializes grouping keys by section prefix; numbers use shortest exact
// decimals so emit/parse roundtrips are stable.
std::string serialize(const Table& table);
void write_file(const Table& table, const std::string& path);

}  // namespace uwvo::toml
