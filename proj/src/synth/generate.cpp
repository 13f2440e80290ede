#include "editseq/synth/task.hpp"

#include <algorithm>
#include <optional>

#include "editseq/synth/stats.hpp"

namespace editseq::synth {

namespace {

char symbol_char(int index) { return static_cast<char>('A' + index); }

std::optional<std::vector<std::string>> match_at(const RuleSpec& rule, const std::string& s, int pos,
                                                 const std::string& bindings) {
  if (pos + rule.pattern_length() > static_cast<int>(s.size())) return std::nullopt;
  std::vector<std::string> captures(static_cast<std::size_t>(rule.group_count) + 1);
  const auto metas = rule.meta_symbols();
  for (int j = 0; j < rule.pattern_length(); ++j) {
    const PatternElem& e = rule.pattern[static_cast<std::size_t>(j)];
    char c = s[static_cast<std::size_t>(pos + j)];
    switch (e.kind) {
      case PatternElem::Kind::Literal:
        if (c != e.symbol) return std::nullopt;
        break;
      case PatternElem::Kind::Meta: {
        auto it = std::find(metas.begin(), metas.end(), e.symbol);
        if (c != bindings[static_cast<std::size_t>(it - metas.begin())]) return std::nullopt;
        break;
      }
      case PatternElem::Kind::Wildcard:
        break;
    }
    if (e.group > 0) captures[static_cast<std::size_t>(e.group)] += c;
  }
  return captures;
}

std::string expand_replacement(const RuleSpec& rule, const std::vector<std::string>& captures,
                               const std::string& bindings) {
  const auto metas = rule.meta_symbols();
  std::string out;
  for (const auto& e : rule.replacement) {
    switch (e.kind) {
      case ReplacementElem::Kind::Literal:
        out += e.symbol;
        break;
      case ReplacementElem::Kind::Meta: {
        auto it = std::find(metas.begin(), metas.end(), e.symbol);
        out += bindings[static_cast<std::size_t>(it - metas.begin())];
        break;
      }
      case ReplacementElem::Kind::GroupRef:
        out += captures[static_cast<std::size_t>(e.group)];
        break;
    }
  }
  return out;
}

core::EditSequenceInstance assemble_instance(const TaskSpec& task, const core::Vocab& vocab,
                                             const std::vector<std::string>& snapshots,
                                             const std::vector<RuleMatch>& matches,
                                             const std::string& bindings) {
  std::vector<core::State> states;
  states.reserve(snapshots.size());
  for (const auto& s : snapshots) states.push_back(core::State::of_letters(vocab, s));

  nlohmann::json windows = nlohmann::json::array();
  std::vector<int> edit_counts;
  for (std::size_t i = 0; i + 1 < states.size(); ++i) {
    edit_counts.push_back(static_cast<int>(core::diff_snapshots(states[i], states[i + 1]).size()));
  }
  for (std::size_t i = 0; i < matches.size(); ++i) {
    windows.push_back({{"window", matches[i].window}, {"edits", edit_counts[i]}});
  }

  const int conditioning = edit_counts.empty() ? 0 : edit_counts.front();
  auto instance = core::trace_from_snapshots(states, conditioning);
  instance.meta["task"] = task.name;
  instance.meta["windows"] = std::move(windows);
  const auto metas = task.rule.meta_symbols();
  if (!metas.empty()) {
    nlohmann::json b = nlohmann::json::object();
    for (std::size_t i = 0; i < metas.size(); ++i) b[std::string(1, metas[i])] = std::string(1, bindings[i]);
    instance.meta["bindings"] = std::move(b);
  }
  return instance;
}

}  // namespace

std::vector<RuleMatch> scan_matches(const RuleSpec& rule, const std::string& content,
                                    const std::string& meta_bindings) {
  std::vector<RuleMatch> matches;
  int i = 0;
  const int n = static_cast<int>(content.size());
  while (i + rule.pattern_length() <= n) {
    auto captures = match_at(rule, content, i, meta_bindings);
    if (captures) {
      RuleMatch m;
      m.position = i;
      m.window = content.substr(static_cast<std::size_t>(i), static_cast<std::size_t>(rule.pattern_length()));
      m.replacement = expand_replacement(rule, *captures, meta_bindings);
      matches.push_back(std::move(m));
      i += rule.pattern_length();
    } else {
      ++i;
    }
  }
  return matches;
}

std::vector<std::string> build_snapshots(const RuleSpec& rule, const std::string& content,
                                         const std::string& meta_bindings) {
  auto matches = scan_matches(rule, content, meta_bindings);
  std::vector<std::string> snapshots{content};
  std::string current = content;
  int offset = 0;
  for (const auto& m : matches) {
    current.replace(static_cast<std::size_t>(m.position + offset),
                    static_cast<std::size_t>(rule.pattern_length()), m.replacement);
    offset += static_cast<int>(m.replacement.size()) - rule.pattern_length();
    snapshots.push_back(current);
  }
  return snapshots;
}

core::Vocab task_vocab(const TaskSpec& task) { return core::Vocab::letters(task.vocab_size); }

core::EditSequenceInstance generate_instance(const TaskSpec& task, Rng& rng, const core::Vocab& vocab) {
  const auto metas = task.rule.meta_symbols();
  if (task.vocab_size < static_cast<int>(metas.size())) {
    throw RuleError("vocab too small for meta symbols in task " + task.name);
  }
  for (int attempt = 0; attempt < task.max_attempts; ++attempt) {
    std::string content(static_cast<std::size_t>(task.initial_length), 'A');
    for (auto& c : content) c = symbol_char(rng.next_int(0, task.vocab_size));

    // Distinct concrete character per meta symbol.
    std::string bindings;
    {
      std::vector<int> pool(static_cast<std::size_t>(task.vocab_size));
      for (int i = 0; i < task.vocab_size; ++i) pool[static_cast<std::size_t>(i)] = i;
      for (std::size_t m = 0; m < metas.size(); ++m) {
        int k = rng.next_int(static_cast<int>(m), task.vocab_size);
        std::swap(pool[m], pool[static_cast<std::size_t>(k)]);
        bindings += symbol_char(pool[m]);
      }
    }

    auto matches = scan_matches(task.rule, content, bindings);
    if (static_cast<int>(matches.size()) + 1 < task.min_snapshots) continue;
    auto snapshots = build_snapshots(task.rule, content, bindings);
    return assemble_instance(task, vocab, snapshots, matches, bindings);
  }
  throw RuleError("rejection budget exhausted generating task " + task.name);
}

SyntheticDataset generate_dataset(const TaskSpec& task) {
  SyntheticDataset ds;
  ds.task = task;
  const core::Vocab vocab = task_vocab(task);

  const bool multitask = task.name == "MultiTask";
  std::vector<TaskSpec> pool;
  if (multitask) {
    for (const auto& name : task_names()) {
      if (name != "MultiTask") pool.push_back(make_task(name, task.seed));
    }
  } else {
    auto stats = rule_stats(task.rule, task.vocab_size);
    ds.epr = stats.first;
    ds.acd = stats.second;
  }

  auto fill = [&](const char* split, int count, std::vector<core::EditSequenceInstance>& out) {
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      Rng rng(derive_seed(task.seed, split, static_cast<std::uint64_t>(i)));
      const TaskSpec& chosen =
          multitask ? pool[static_cast<std::size_t>(rng.next_int(0, static_cast<int>(pool.size())))] : task;
      auto inst = generate_instance(chosen, rng, vocab);
      inst.meta["split"] = split;
      inst.meta["index"] = i;
      out.push_back(std::move(inst));
    }
  };
  fill("train", task.train_size, ds.train);
  fill("dev", task.dev_size, ds.dev);
  fill("test", task.test_size, ds.test);
  return ds;
}

std::vector<ReplacementEvent> replacement_events(const core::EditSequenceInstance& instance) {
  std::vector<ReplacementEvent> events;
  if (!instance.meta.contains("windows")) return events;
  for (const auto& w : instance.meta["windows"]) {
    events.push_back(ReplacementEvent{w.at("window").get<std::string>(), w.at("edits").get<int>()});
  }
  return events;
}

}  // namespace editseq::synth
