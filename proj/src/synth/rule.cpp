#include "editseq/synth/rule.hpp"

#include <algorithm>

namespace editseq::synth {

namespace {

bool is_meta_char(char c) { return c == 'x' || c == 'y' || c == 'z'; }
bool is_literal_char(char c) { return c >= 'A' && c <= 'Z'; }

}  // namespace

std::vector<char> RuleSpec::meta_symbols() const {
  std::vector<char> metas;
  auto note = [&](char c) {
    if (std::find(metas.begin(), metas.end(), c) == metas.end()) metas.push_back(c);
  };
  for (const auto& e : pattern) {
    if (e.kind == PatternElem::Kind::Meta) note(e.symbol);
  }
  for (const auto& e : replacement) {
    if (e.kind == ReplacementElem::Kind::Meta) note(e.symbol);
  }
  return metas;
}

RuleSpec parse_rule(const std::string& pattern_text, const std::string& replacement_text) {
  RuleSpec rule;
  rule.pattern_text = pattern_text;
  rule.replacement_text = replacement_text;

  int group = 0;       // current open group, 0 if none
  bool in_group = false;
  for (std::size_t i = 0; i < pattern_text.size(); ++i) {
    char c = pattern_text[i];
    if (c == '(') {
      if (in_group) throw RuleError("nested groups are not supported: " + pattern_text);
      in_group = true;
      group = ++rule.group_count;
    } else if (c == ')') {
      if (!in_group) throw RuleError("unbalanced ')': " + pattern_text);
      in_group = false;
    } else if (c == '.') {
      rule.pattern.push_back({PatternElem::Kind::Wildcard, 0, in_group ? group : 0});
    } else if (is_meta_char(c)) {
      rule.pattern.push_back({PatternElem::Kind::Meta, c, in_group ? group : 0});
    } else if (is_literal_char(c)) {
      rule.pattern.push_back({PatternElem::Kind::Literal, c, in_group ? group : 0});
    } else {
      throw RuleError(std::string("unknown pattern character '") + c + "': " + pattern_text);
    }
  }
  if (in_group) throw RuleError("unbalanced '(': " + pattern_text);
  if (rule.pattern.empty()) throw RuleError("empty pattern");

  for (std::size_t i = 0; i < replacement_text.size(); ++i) {
    char c = replacement_text[i];
    if (c == '\\') {
      if (i + 1 >= replacement_text.size() || !isdigit(static_cast<unsigned char>(replacement_text[i + 1]))) {
        throw RuleError("dangling back-reference: " + replacement_text);
      }
      int ref = replacement_text[++i] - '0';
      if (ref < 1 || ref > rule.group_count) {
        throw RuleError("back-reference to nonexistent group \\" + std::to_string(ref) + ": " +
                        replacement_text);
      }
      rule.replacement.push_back({ReplacementElem::Kind::GroupRef, 0, ref});
    } else if (is_meta_char(c)) {
      rule.replacement.push_back({ReplacementElem::Kind::Meta, c, 0});
    } else if (is_literal_char(c)) {
      rule.replacement.push_back({ReplacementElem::Kind::Literal, c, 0});
    } else {
      throw RuleError(std::string("unknown replacement character '") + c + "': " + replacement_text);
    }
  }
  return rule;
}

}  // namespace editseq::synth
