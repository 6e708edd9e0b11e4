#pragma once
// Text format for networks: parser, canonical serializer, DOT export.
//
// Format sketch (two automaton blocks per file, optional leading pragma):
//
//   pragma synthesized;          # only on transformation output
//   automaton A1 {
//     clocks x;
//     init l0;
//     loc l0 inv x <= 3;
//     edge l0 -> l1 when x >= 1 do a reset x;
//     edge l1 -> ls when x >= 2 sync s copy xp := x;
//   }
//   automaton A2 { ... }
//
// Atoms are `clock REL nat` with REL one of < <= == >= >, or difference
// atoms `c1 - c2 REL int` (synthesized tier only). `#` starts a line comment.

#include <stdexcept>
#include <string>

#include "ntasc/model.hpp"

namespace ntasc {

struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(int l, int c, const std::string& msg)
      : std::runtime_error("line " + std::to_string(l) + ", col " + std::to_string(c) + ": " +
                           msg),
        line(l),
        col(c) {}
};

struct SyntaxError : ParseError {
  using ParseError::ParseError;
};

// Name resolution failures, duplicates, tier violations.
struct SemanticError : ParseError {
  using ParseError::ParseError;
};

Network parse(const std::string& text);
Network parse_file(const std::string& path);

// Canonical text form; parse(serialize(n)) is structurally n, and fixture
// files are stored in this exact form.
std::string serialize(const Network& net);

std::string guard_str(const Guard& g, const std::vector<Clock>& clocks);
std::string inv_str(const Invariant& inv, const std::vector<Clock>& clocks);

// Graphviz digraph of the network: one cluster per automaton, local edges
// solid, sync edges dashed, silent edges and copy-free detail inline.
std::string export_dot(const Network& net);

}  // namespace ntasc
