#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace wavelab {

/// Builds one JSON object with fields in insertion order. Doubles are written
/// with 17 significant digits; non-finite values become null.
class JsonLine {
 public:
  JsonLine& add(std::string_view key, double value);
  JsonLine& add(std::string_view key, long value);
  JsonLine& add(std::string_view key, std::uint64_t value);
  JsonLine& add(std::string_view key, bool value);
  JsonLine& add(std::string_view key, std::string_view value);
  JsonLine& add(std::string_view key, const char* value) { return add(key, std::string_view(value)); }
  JsonLine& add(std::string_view key, const JsonLine& object);

  std::string str() const { return "{" + body_ + "}"; }

 private:
  void key(std::string_view k);
  std::string body_;
};

std::string json_escape(std::string_view s);
std::string format_double(double v);

}  // namespace wavelab
