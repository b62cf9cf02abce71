#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace spatia {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
  /// Stable machine-readable identifier, e.g. "out_of_range".
  virtual const char* code() const noexcept { return "error"; }
};

#define SPATIA_DEFINE_ERROR(Name, Code)                               \
  class Name : public Error {                                         \
  public:                                                             \
    using Error::Error;                                               \
    const char* code() const noexcept override { return Code; }       \
  }

SPATIA_DEFINE_ERROR(ParameterError, "parameter");
SPATIA_DEFINE_ERROR(OutOfRangeError, "out_of_range");
SPATIA_DEFINE_ERROR(LayoutError, "layout");
SPATIA_DEFINE_ERROR(DegenerateGeometryError, "degenerate_geometry");
SPATIA_DEFINE_ERROR(CoverageError, "coverage");
SPATIA_DEFINE_ERROR(DimensionError, "dimension_mismatch");
SPATIA_DEFINE_ERROR(UnsupportedOrderError, "unsupported_order");
SPATIA_DEFINE_ERROR(ConditioningError, "conditioning");
SPATIA_DEFINE_ERROR(NormalizationError, "normalization");
SPATIA_DEFINE_ERROR(FormatError, "format");
SPATIA_DEFINE_ERROR(IoError, "io");
SPATIA_DEFINE_ERROR(RenderError, "render");

#undef SPATIA_DEFINE_ERROR

/// One finding of a validation pass.
struct Issue {
  std::string code;     ///< machine-readable, e.g. "unequal_radius"
  std::string where;    ///< dotted path into the validated document, may be empty
  std::string message;
};

struct ValidationReport {
  std::vector<Issue> issues;

  bool ok() const noexcept { return issues.empty(); }
  void add(std::string code, std::string where, std::string message) {
    issues.push_back({std::move(code), std::move(where), std::move(message)});
  }
  void merge(const ValidationReport& other, const std::string& prefix = {});
  bool has(const std::string& code) const;
  std::string summary() const;
};

/// Raised when a validation report contains issues and the caller asked for a hard failure.
class ValidationError : public Error {
public:
  explicit ValidationError(ValidationReport report);
  const char* code() const noexcept override { return "validation"; }
  const ValidationReport& report() const noexcept { return report_; }

private:
  ValidationReport report_;
};

} // namespace spatia
