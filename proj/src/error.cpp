#include "spatia/error.hpp"

#include <algorithm>

namespace spatia {

void ValidationReport::merge(const ValidationReport& other, const std::string& prefix) {
  for (const auto& issue : other.issues) {
    std::string where = issue.where;
    if (!prefix.empty()) where = where.empty() ? prefix : prefix + "." + where;
    issues.push_back({issue.code, std::move(where), issue.message});
  }
}

bool ValidationReport::has(const std::string& code) const {
  return std::any_of(issues.begin(), issues.end(), [&](const Issue& i) { return i.code == code; });
}

std::string ValidationReport::summary() const {
  std::string out;
  for (const auto& issue : issues) {
    if (!out.empty()) out += "; ";
    out += issue.code;
    if (!issue.where.empty()) out += " at " + issue.where;
    out += ": " + issue.message;
  }
  return out;
}

ValidationError::ValidationError(ValidationReport report)
    : Error("validation failed: " + report.summary()), report_(std::move(report)) {}

} // namespace spatia
