#include "editseq/pomp/pomp.hpp"

#include <stdexcept>

namespace editseq::pomp {

PatternBank PatternBank::from_split(const std::vector<core::EditSequenceInstance>& split) {
  PatternBank bank;
  for (const auto& inst : split) {
    for (const auto& event : synth::replacement_events(inst)) bank.add(event.window);
  }
  return bank;
}

double pomp_expected_accuracy(const std::vector<core::EditSequenceInstance>& train,
                              const std::vector<core::EditSequenceInstance>& test, int vocab_size) {
  return pomp_expected_accuracy(PatternBank::from_split(train), test, vocab_size);
}

double pomp_expected_accuracy(const PatternBank& bank,
                              const std::vector<core::EditSequenceInstance>& test, int vocab_size) {
  const double chance = 1.0 / (vocab_size + 1);
  double expected = 0.0;
  long total = 0;
  for (const auto& inst : test) {
    const auto events = synth::replacement_events(inst);
    if (events.empty()) throw std::invalid_argument("instance lacks replacement windows in meta");
    // Event 0 is the conditioning prefix.
    for (std::size_t r = 1; r < events.size(); ++r) {
      const auto& event = events[r];
      expected += bank.contains(event.window) ? event.edit_count : chance * event.edit_count;
      total += event.edit_count;
    }
  }
  if (total == 0) return 0.0;
  return expected / static_cast<double>(total);
}

}  // namespace editseq::pomp
