#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace editseq::synth {

struct RuleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One position of a pattern. Wildcards always live inside a capture group;
// `group` is 0 for elements outside any group.
struct PatternElem {
  enum class Kind { Literal, Wildcard, Meta };
  Kind kind = Kind::Literal;
  char symbol = 0;  // literal character or meta name (x, y, z)
  int group = 0;    // 1-based capture group, 0 if none
};

struct ReplacementElem {
  enum class Kind { Literal, GroupRef, Meta };
  Kind kind = Kind::Literal;
  char symbol = 0;  // literal character or meta name
  int group = 0;    // referenced group for GroupRef
};

// A replacement rule in the restricted syntax: uppercase literals, "." for
// wildcards, "(...)" for groups, "\N" for back-references, and lowercase
// x/y/z meta symbols that bind to a concrete character per instance.
struct RuleSpec {
  std::string pattern_text;
  std::string replacement_text;
  std::vector<PatternElem> pattern;
  std::vector<ReplacementElem> replacement;
  int group_count = 0;

  int pattern_length() const { return static_cast<int>(pattern.size()); }
  std::vector<char> meta_symbols() const;
};

RuleSpec parse_rule(const std::string& pattern_text, const std::string& replacement_text);

}  // namespace editseq::synth
