#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "editseq/core/diff.hpp"
#include "editseq/core/io.hpp"
#include "editseq/rng.hpp"
#include "editseq/synth/rule.hpp"

namespace editseq::synth {

// A synthetic dataset definition: one replacement rule plus sampling sizes.
struct TaskSpec {
  std::string name;
  RuleSpec rule;
  int initial_length = 30;
  int vocab_size = 10;
  int train_size = 10000;
  int dev_size = 1000;
  int test_size = 1000;
  std::uint64_t seed = 1;
  int min_snapshots = 4;
  // Resamples allowed per instance before generation fails. Sparse patterns
  // like AA need a few hundred draws on average to reach four snapshots.
  int max_attempts = 20000;
};

struct SyntheticDataset {
  TaskSpec task;
  std::vector<core::EditSequenceInstance> train;
  std::vector<core::EditSequenceInstance> dev;
  std::vector<core::EditSequenceInstance> test;
  double epr = 0.0;
  double acd = 0.0;
};

// All registered task names (the full published suite plus MultiTask).
const std::vector<std::string>& task_names();
bool is_known_task(const std::string& name);

// Builds the TaskSpec for a registered name at default sizes.
TaskSpec make_task(const std::string& name, std::uint64_t seed = 1);

// One concrete replacement event inside an instance.
struct ReplacementEvent {
  std::string window;  // the matched span, pre-replacement
  int edit_count = 0;  // diff length of this replacement
};

// Left-to-right non-overlapping match positions of the rule (with meta
// symbols bound) in a content string; one scan, Python re.sub semantics.
struct RuleMatch {
  int position = 0;
  std::string window;
  std::string replacement;
};
std::vector<RuleMatch> scan_matches(const RuleSpec& rule, const std::string& content,
                                    const std::string& meta_bindings);

// Snapshot sequence for one scan: the initial content string plus the state
// after each individual match is replaced.
std::vector<std::string> build_snapshots(const RuleSpec& rule, const std::string& content,
                                         const std::string& meta_bindings);

// Samples one accepted instance (rejection sampling until the snapshot
// minimum is met). Throws if the attempt budget is exhausted.
core::EditSequenceInstance generate_instance(const TaskSpec& task, Rng& rng, const core::Vocab& vocab);

// Deterministic dataset: instance i of split s is seeded by (seed, s, i).
SyntheticDataset generate_dataset(const TaskSpec& task);

core::Vocab task_vocab(const TaskSpec& task);

// Parses replacement events back out of an instance's meta record.
std::vector<ReplacementEvent> replacement_events(const core::EditSequenceInstance& instance);

}  // namespace editseq::synth
