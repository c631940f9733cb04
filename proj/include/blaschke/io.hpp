#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "blaschke/product.hpp"
#include "blaschke/types.hpp"

namespace blaschke {

/// All floats in emitted JSON carry 17 significant digits, enough to
/// round-trip doubles exactly, and the writer is fully deterministic.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Minimal streaming JSON writer with stable formatting (insertion order,
/// fixed float format, optional two-space pretty printing).
class JsonWriter {
 public:
  explicit JsonWriter(bool pretty = false) : pretty_(pretty) {}

  JsonWriter& begin_object() { return open('{'); }
  JsonWriter& end_object() { return close('}'); }
  JsonWriter& begin_array() { return open('['); }
  JsonWriter& end_array() { return close(']'); }

  JsonWriter& key(const std::string& name) {
    separate();
    out_ += '"';
    escape(name);
    out_ += pretty_ ? "\": " : "\":";
    just_keyed_ = true;
    return *this;
  }

  JsonWriter& value(double v) { return raw(format_double(v)); }
  JsonWriter& value(int v) { return raw(std::to_string(v)); }
  JsonWriter& value(unsigned long long v) { return raw(std::to_string(v)); }
  JsonWriter& value(bool v) { return raw(v ? "true" : "false"); }
  JsonWriter& value(const std::string& s) {
    separate();
    out_ += '"';
    escape(s);
    out_ += '"';
    return *this;
  }
  JsonWriter& value(const char* s) { return value(std::string(s)); }
  JsonWriter& value(Complex z) {
    begin_array();
    value(z.real());
    value(z.imag());
    return end_array();
  }

  const std::string& str() const { return out_; }

 private:
  JsonWriter& raw(const std::string& token) {
    separate();
    out_ += token;
    return *this;
  }

  JsonWriter& open(char c) {
    separate();
    out_ += c;
    depth_ += 1;
    fresh_ = true;
    return *this;
  }

  JsonWriter& close(char c) {
    depth_ -= 1;
    if (pretty_ && !fresh_) newline();
    out_ += c;
    fresh_ = false;
    return *this;
  }

  void separate() {
    if (just_keyed_) {
      just_keyed_ = false;
      return;
    }
    if (!fresh_ && depth_ > 0) out_ += ',';
    if (pretty_ && depth_ > 0) newline();
    fresh_ = false;
  }

  void newline() {
    out_ += '\n';
    out_.append(static_cast<std::size_t>(2 * depth_), ' ');
  }

  void escape(const std::string& s) {
    for (char c : s) {
      switch (c) {
        case '"': out_ += "\\\""; break;
        case '\\': out_ += "\\\\"; break;
        case '\n': out_ += "\\n"; break;
        case '\t': out_ += "\\t"; break;
        default: out_ += c;
      }
    }
  }

  bool pretty_;
  std::string out_;
  int depth_ = 0;
  bool fresh_ = true;
  bool just_keyed_ = false;
};

inline void write_product(JsonWriter& w, const BlaschkeProduct& b) {
  w.begin_object();
  w.key("lambda").value(b.lambda);
  w.key("zeros").begin_array();
  for (const Complex& z : b.zeros) w.value(z);
  w.end_array();
  w.end_object();
}

inline std::string product_to_json(const BlaschkeProduct& b, bool pretty = false) {
  JsonWriter w(pretty);
  write_product(w, b);
  return w.str();
}

namespace detail {

inline Complex parse_complex(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw InvalidInputError("field '" + field + "' must be a [re, im] pair");
  const Complex z(j[0].get<double>(), j[1].get<double>());
  require_finite(z, field.c_str());
  return z;
}

}  // namespace detail

inline BlaschkeProduct product_from_json(const std::string& text,
                                         const Tolerances& tol = default_tolerances()) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInputError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidInputError("top level must be an object");
  if (!j.contains("lambda")) throw InvalidInputError("missing field 'lambda'");
  if (!j.contains("zeros")) throw InvalidInputError("missing field 'zeros'");
  BlaschkeProduct b;
  b.lambda = detail::parse_complex(j["lambda"], "lambda");
  if (!j["zeros"].is_array()) throw InvalidInputError("field 'zeros' must be an array");
  int idx = 0;
  for (const auto& z : j["zeros"]) {
    b.zeros.push_back(detail::parse_complex(z, "zeros[" + std::to_string(idx) + "]"));
    ++idx;
  }
  b.validate(tol);
  b.lambda /= std::abs(b.lambda);  // re-pin exactly onto the circle
  return b;
}

}  // namespace blaschke
