#include "editseq/synth/ngram.hpp"

#include <cmath>
#include <stdexcept>

#include "editseq/core/diff.hpp"

namespace editseq::synth {

NgramTaskSpec make_ngram_task(int insertions, std::uint64_t seed) {
  if (insertions <= 0) throw std::invalid_argument("insertions must be positive");
  NgramTaskSpec task;
  task.name = "Ngram" + std::to_string(insertions);
  task.insertions = insertions;
  task.seed = seed;
  return task;
}

TrigramModel::TrigramModel(int vocab_size, std::uint64_t seed) : vocab_size_(vocab_size) {
  Rng rng(derive_seed(seed, "trigram-table", 0));
  const int v = vocab_size_;
  table_.resize(static_cast<std::size_t>(v) * v * v);
  for (int a = 0; a < v; ++a) {
    for (int b = 0; b < v; ++b) {
      double total = 0.0;
      std::size_t base = (static_cast<std::size_t>(a) * v + b) * v;
      for (int c = 0; c < v; ++c) {
        // Exponential draws normalize to a uniform Dirichlet sample.
        double e = -std::log(1.0 - rng.next_double());
        table_[base + c] = e;
        total += e;
      }
      for (int c = 0; c < v; ++c) table_[base + c] /= total;
    }
  }
}

double TrigramModel::prob(int prev2, int prev1, int next) const {
  return table_[(static_cast<std::size_t>(prev2) * vocab_size_ + prev1) * vocab_size_ + next];
}

int TrigramModel::sample(int prev2, int prev1, Rng& rng) const {
  double u = rng.next_double();
  double acc = 0.0;
  for (int c = 0; c < vocab_size_; ++c) {
    acc += prob(prev2, prev1, c);
    if (u < acc) return c;
  }
  return vocab_size_ - 1;
}

core::EditSequenceInstance generate_ngram_instance(const NgramTaskSpec& task, const TrigramModel& model,
                                                   Rng& rng, const core::Vocab& vocab) {
  std::string content;
  std::size_t anchor = std::string::npos;
  // Resample until the pattern character occurs.
  do {
    content.assign(static_cast<std::size_t>(task.initial_length), 'A');
    for (auto& c : content) c = static_cast<char>('A' + rng.next_int(0, task.vocab_size));
    anchor = content.find(task.pattern_char);
  } while (anchor == std::string::npos);

  const auto initial = core::State::of_letters(vocab, content);
  std::vector<core::ExplicitEdit> edits;
  edits.reserve(static_cast<std::size_t>(task.insertions));
  int prev2 = anchor >= 1 ? content[anchor - 1] - 'A' : content[anchor] - 'A';
  int prev1 = content[anchor] - 'A';
  // Insert after the matched character; each edit anchors on the previous
  // insertion, so positions advance one at a time.
  int position = static_cast<int>(anchor) + 1;  // +1 for the START delimiter
  for (int k = 0; k < task.insertions; ++k) {
    int c = model.sample(prev2, prev1, rng);
    edits.push_back(core::ExplicitEdit{position + k, vocab.symbol_id(std::string(1, static_cast<char>('A' + c)))});
    prev2 = prev1;
    prev1 = c;
  }

  auto instance = core::explicit_to_implicit(core::make_trace(initial, edits), 0);
  instance.meta["task"] = task.name;
  instance.meta["anchor"] = static_cast<int>(anchor);
  return instance;
}

std::vector<core::EditSequenceInstance> generate_ngram_split(const NgramTaskSpec& task,
                                                             const std::string& split, int count) {
  const core::Vocab vocab = core::Vocab::letters(task.vocab_size);
  const TrigramModel model(task.vocab_size, task.seed);
  std::vector<core::EditSequenceInstance> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Rng rng(derive_seed(task.seed, "ngram-" + split, static_cast<std::uint64_t>(i)));
    auto inst = generate_ngram_instance(task, model, rng, vocab);
    inst.meta["split"] = split;
    inst.meta["index"] = i;
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace editseq::synth
