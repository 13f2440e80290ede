#include "editseq/synth/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "editseq/core/diff.hpp"

namespace editseq::synth {

std::pair<double, double> rule_stats(const RuleSpec& rule, int /*vocab_size*/) {
  // Generic instantiation: literals keep their character, every wildcard and
  // meta gets its own fresh character. Placeholders come from a scratch
  // alphabet that avoids the rule's literals.
  std::string used;
  for (const auto& e : rule.pattern) {
    if (e.kind == PatternElem::Kind::Literal) used += e.symbol;
  }
  for (const auto& e : rule.replacement) {
    if (e.kind == ReplacementElem::Kind::Literal) used += e.symbol;
  }
  char next_free = 'A';
  auto fresh = [&]() {
    while (used.find(next_free) != std::string::npos) ++next_free;
    used += next_free;
    return next_free;
  };

  std::map<char, char> meta_binding;
  std::string pattern_inst;
  std::vector<std::vector<int>> group_offsets(static_cast<std::size_t>(rule.group_count) + 1);
  for (std::size_t j = 0; j < rule.pattern.size(); ++j) {
    const PatternElem& e = rule.pattern[j];
    char c = 0;
    switch (e.kind) {
      case PatternElem::Kind::Literal:
        c = e.symbol;
        break;
      case PatternElem::Kind::Wildcard:
        c = fresh();
        break;
      case PatternElem::Kind::Meta:
        if (!meta_binding.count(e.symbol)) meta_binding[e.symbol] = fresh();
        c = meta_binding[e.symbol];
        break;
    }
    pattern_inst += c;
    if (e.group > 0) group_offsets[static_cast<std::size_t>(e.group)].push_back(static_cast<int>(j));
  }

  std::string replacement_inst;
  std::vector<int> displacements;
  int offset = 0;
  for (const auto& e : rule.replacement) {
    switch (e.kind) {
      case ReplacementElem::Kind::Literal:
        replacement_inst += e.symbol;
        ++offset;
        break;
      case ReplacementElem::Kind::Meta:
        if (!meta_binding.count(e.symbol)) meta_binding[e.symbol] = fresh();
        replacement_inst += meta_binding[e.symbol];
        ++offset;
        break;
      case ReplacementElem::Kind::GroupRef: {
        const auto& offs = group_offsets[static_cast<std::size_t>(e.group)];
        for (std::size_t k = 0; k < offs.size(); ++k) {
          replacement_inst += pattern_inst[static_cast<std::size_t>(offs[k])];
          displacements.push_back(std::abs(offset + static_cast<int>(k) - offs[k]));
        }
        offset += static_cast<int>(offs.size());
        break;
      }
    }
  }

  // Diff over the placeholder alphabet.
  const core::Vocab scratch = core::Vocab::letters(26);
  const auto a = core::State::of_letters(scratch, pattern_inst);
  const auto b = core::State::of_letters(scratch, replacement_inst);
  const double epr = static_cast<double>(core::diff_snapshots(a, b).size());

  double sum = 0.0;
  int count = 0;
  for (int d : displacements) {
    if (d != 0) {
      sum += d;
      ++count;
    }
  }
  const double acd = count == 0 ? 0.0 : sum / count;
  return {epr, acd};
}

}  // namespace editseq::synth
