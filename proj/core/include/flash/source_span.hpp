#pragma once

#include <cstddef>
#include <string>

namespace flash {

/// Position in a design file. Line and column are 1-based; a default span
/// (line 0) marks IR that was built programmatically.
struct SourceSpan {
  int line = 0;
  int column = 0;
  std::size_t offset = 0;

  bool known() const noexcept { return line > 0; }

  std::string to_string() const {
    if (!known()) return "<generated>";
    return std::to_string(line) + ":" + std::to_string(column);
  }

  /// Spans are provenance only and never take part in structural equality.
  friend bool operator==(const SourceSpan&, const SourceSpan&) noexcept {
    return true;
  }
};

}  // namespace flash
