#pragma once

// Text form of a Design (`.flash` files).
//
//   design <id>
//   arg <id> = <int>
//   fifo <id> depth=<int>
//   module <id> ( <id>, ... ) {
//     <label>: <stageop>
//     loop (<id>=0..<int>) [x (<id>=0..<int>)]* II=<int> IL=<int> {
//       st<k>: <stageop> [; <stageop>]*
//     }
//   }
//
//   stageop := [when <expr>:] ( <id> = read <fifo>
//            | (<id>,<id>) = nb_read <fifo>
//            | (<id>,<id>,<id>) = read_any [<fifo>,...]
//            | write <fifo> (<expr>)
//            | <id> = <expr> )
//
// Newlines and `;` separate top-level items and steps; `#` starts a comment.
// A stage line must begin with its label. `st?:` marks computations that
// have not been scheduled yet.

#include <string>
#include <string_view>

#include "flash/ir.hpp"

namespace flash {

/// Throws ParseError with the offending span.
Design parse_design(std::string_view text);

/// Parses a standalone expression (used by tests and tooling).
Expr parse_expr(std::string_view text);

/// Canonical text for `d`; parse_design(format_design(d)) == d.
std::string format_design(const Design& d);
std::string format_expr(const Expr& e);
std::string format_stage_op(const StageOp& op);

/// Identifiers that cannot name variables, channels or modules.
bool is_reserved_word(std::string_view id);

}  // namespace flash
