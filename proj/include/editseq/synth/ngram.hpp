#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "editseq/core/io.hpp"
#include "editseq/rng.hpp"

namespace editseq::synth {

// Scalability task: a single-character pattern whose replacement appends a
// fixed number of tokens drawn from a per-dataset random trigram model. The
// state size and the edit count grow together with `insertions`.
struct NgramTaskSpec {
  std::string name;       // e.g. "Ngram100"
  int order = 3;
  int insertions = 100;
  char pattern_char = 'A';
  int initial_length = 30;
  int vocab_size = 10;
  int train_size = 10000;
  int dev_size = 1000;
  int test_size = 1000;
  std::uint64_t seed = 1;
};

NgramTaskSpec make_ngram_task(int insertions, std::uint64_t seed = 1);

// Conditional next-token table P(c | prev2, prev1), sampled uniformly on the
// simplex per context; reconstructible from the task seed.
class TrigramModel {
 public:
  TrigramModel(int vocab_size, std::uint64_t seed);
  double prob(int prev2, int prev1, int next) const;
  int sample(int prev2, int prev1, Rng& rng) const;
  int vocab_size() const { return vocab_size_; }

 private:
  int vocab_size_;
  std::vector<double> table_;  // [prev2][prev1][next]
};

core::EditSequenceInstance generate_ngram_instance(const NgramTaskSpec& task, const TrigramModel& model,
                                                   Rng& rng, const core::Vocab& vocab);

std::vector<core::EditSequenceInstance> generate_ngram_split(const NgramTaskSpec& task,
                                                             const std::string& split, int count);

}  // namespace editseq::synth
