#pragma once

#include <string>

#include "relichoice/model.hpp"

namespace relichoice::dsl {

/// Parses the text grammar:
///
///   spec      := compdecl+ "system" ":" expr
///   compdecl  := "comp" IDENT "(" "lambda" "=" NUM "," "t0" "=" NUM ("," "p" "=" NUM)? ")"
///   expr      := term (";" term)*              ";" composes in series
///   term      := IDENT | choice | "(" expr ")"
///   choice    := "[" branch ("," branch)* "]"  weighted choice
///              | "<" expr ("|" expr)* ">"      uniform choice
///   branch    := NUM ":" expr | "_" ":" expr   "_" = residual 1 - sum(others)
///
/// "#" starts a comment running to end of line. Explicit weights must sum to 1
/// within 1e-9; nothing is renormalized silently. The returned spec is
/// canonical and validated. Throws ParseError with a source span.
model::SystemSpec parse(const std::string& text);

/// Pretty-prints a spec in the grammar above, one component declaration per
/// line. Numbers carry enough digits that parse(format(s)) is structurally
/// equal to s.
std::string format(const model::SystemSpec& spec);

/// Parses the JSON document format:
///
///   {"name": str?, "components": [{"id", "lambda", "t0", "p"?}...],
///    "system": <node>}
///   <node> := {"leaf": id} | {"series": [node...]}
///           | {"choice": [{"weight": num | "residual", "node": node}...]}
///           | {"uniform": [node...]}
///
/// Unknown keys are rejected. Throws SchemaError naming the offending field
/// path, e.g. "components[0].lambda".
model::SystemSpec from_json(const std::string& text);

/// Serializes to the JSON document format. from_json(to_json(s)) round-trips
/// structure and name.
std::string to_json(const model::SystemSpec& spec);

/// Reads a file and dispatches on extension: ".json" uses the structured
/// loader, anything else the text grammar. Throws IoError when unreadable.
model::SystemSpec load_file(const std::string& path);

/// Structured-format file loader (always JSON, regardless of extension).
model::SystemSpec load_structured(const std::string& path);

}  // namespace relichoice::dsl
