#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "editseq/synth/task.hpp"

namespace editseq::pomp {

// Multiset of concrete matched-pattern windows seen across a training split.
class PatternBank {
 public:
  void add(const std::string& window) { ++counts_[window]; }
  bool contains(const std::string& window) const { return counts_.count(window) > 0; }
  std::size_t distinct() const { return counts_.size(); }

  static PatternBank from_split(const std::vector<core::EditSequenceInstance>& split);

 private:
  std::unordered_map<std::string, int> counts_;
};

// Expected per-edit accuracy of the position-oracle match-pattern baseline:
// a replacement whose window was seen in training scores all of its edits;
// otherwise each edit scores 1/(V+1), a uniform guess over the content
// symbols plus DELETE with the position given by the oracle. Conditioning
// edits (the first replacement of each instance) are excluded.
double pomp_expected_accuracy(const std::vector<core::EditSequenceInstance>& train,
                              const std::vector<core::EditSequenceInstance>& test, int vocab_size);

double pomp_expected_accuracy(const PatternBank& bank,
                              const std::vector<core::EditSequenceInstance>& test, int vocab_size);

}  // namespace editseq::pomp
