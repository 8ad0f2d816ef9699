#pragma once

#include <string>
#include <vector>

#include "flash/ir.hpp"

namespace flash {

struct Diagnostic {
  std::string rule;      // stable rule id, e.g. "multiple-producers"
  std::string location;  // "module M2 / loop 0", "fifo f1", ...
  SourceSpan span;
  std::string message;

  std::string to_string() const;
};

struct ValidationReport {
  std::vector<Diagnostic> diagnostics;

  bool ok() const noexcept { return diagnostics.empty(); }
  bool has_rule(const std::string& rule) const;
  std::string to_string() const;
};

/// Checks every structural invariant of a design. Never throws; problems are
/// reported as diagnostics.
ValidationReport validate_design(const Design& d);

/// Throws InvalidDesign carrying the rendered diagnostics when `d` is invalid.
void require_valid(const Design& d);

}  // namespace flash
