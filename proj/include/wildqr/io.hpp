#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "wildqr/types.hpp"

namespace wildqr {

struct CsvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Strict CSV: comma separated, mandatory header, '.' decimal point,
// scientific notation accepted, no quoting, no missing values. The first
// column is the response, the remaining columns are covariates; the intercept
// column is prepended here. Errors carry 1-based line and column numbers.
Dataset read_csv_dataset(const std::string& path);

// %.17g, the round-trip representation the output formats use everywhere
std::string format_double(double v);

// Minimal JSON value that preserves insertion order and writes numbers with
// 17 significant digits. Output only; there is no parser.
class Json {
 public:
  static Json object();
  static Json array();
  static Json str(std::string v);
  static Json num(double v);
  static Json integer(long long v);
  static Json boolean(bool v);

  Json& set(const std::string& key, Json v);  // object members, in call order
  Json& push(Json v);                         // array elements

  std::string dump(int indent = 2) const;

 private:
  enum class Kind { Object, Array, String, Number, Integer, Bool };
  Kind kind_ = Kind::Object;
  std::string string_;
  double number_ = 0.0;
  long long integer_ = 0;
  bool bool_ = false;
  std::vector<std::pair<std::string, Json>> members_;
  std::vector<Json> elements_;

  void write(std::string& out, int indent, int depth) const;
};

}  // namespace wildqr
