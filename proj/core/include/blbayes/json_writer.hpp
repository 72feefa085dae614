#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "blbayes/linalg.hpp"

namespace blbayes {

/// Shortest-free, fixed-width float text: 17 significant digits ("%.17g").
/// Non-finite values become the JSON literal null.
std::string format_double(double x);

/// Minimal streaming JSON emitter with deterministic layout: keys appear in
/// insertion order, objects are one member per line, arrays are inline, and
/// every double goes through format_double.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(std::string_view k);

  JsonWriter& value(double x);
  JsonWriter& value(std::int64_t x);
  JsonWriter& value(int x) { return value(static_cast<std::int64_t>(x)); }
  JsonWriter& value(bool b);
  JsonWriter& value(std::string_view s);
  JsonWriter& value(const char* s) { return value(std::string_view(s)); }
  JsonWriter& null();
  JsonWriter& value(const Vector& v);
  /// Row-major array of arrays.
  JsonWriter& value(const Matrix& m);

  /// Finished document with a trailing newline.
  std::string str() const { return out_ + "\n"; }

 private:
  struct Frame {
    bool is_object;
    int count;
  };
  void before_value();
  void newline();

  std::string out_;
  std::vector<Frame> stack_;
  bool after_key_ = false;
};

std::string json_escape(std::string_view s);

}  // namespace blbayes
