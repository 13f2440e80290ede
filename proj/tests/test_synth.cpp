#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "editseq/core/diff.hpp"
#include "editseq/pomp/pomp.hpp"
#include "editseq/synth/ngram.hpp"
#include "editseq/synth/stats.hpp"
#include "editseq/synth/task.hpp"

using namespace editseq;
using namespace editseq::synth;

namespace {

// Published dataset statistics: name -> (EPR, ACD).
const std::map<std::string, std::pair<double, double>>& published_stats() {
  static const std::map<std::string, std::pair<double, double>> table = {
      {"Append1", {1, 0}},          {"Append3", {3, 0}},
      {"ContextAppend11", {1, 2}},  {"ContextAppend13", {3, 3}},
      {"ContextAppend31", {3, 4}},  {"ContextAppend33", {9, 7}},
      {"ContextAppend52", {10, 8.5}},
      {"ContextReverse31", {3, 4}}, {"ContextReverse51", {5, 6}},
      {"Delete2", {2, 0}},          {"Flip11", {2, 3}},
      {"Flip33", {18, 10}},         {"Replace2", {4, 0}},
      {"Surround11", {2, 1}},       {"Surround33", {18, 6}},
  };
  return table;
}

bool acd_family_checked(const std::string& base) {
  return base.rfind("ContextAppend", 0) == 0 || base.rfind("ContextReverse", 0) == 0 ||
         base == "Append1" || base == "Append3" || base == "Delete2" || base == "Replace2";
}

}  // namespace

TEST_CASE("parse_rule handles groups and back-references") {
  auto rule = parse_rule("(.)A", "\\1A\\1");
  CHECK(rule.group_count == 1);
  REQUIRE(rule.replacement.size() == 3);
  CHECK(rule.replacement[0].kind == ReplacementElem::Kind::GroupRef);
  CHECK(rule.replacement[1].kind == ReplacementElem::Kind::Literal);
  CHECK(rule.replacement[1].symbol == 'A');
  CHECK(rule.replacement[2].group == 1);
}

TEST_CASE("parse_rule records meta symbols") {
  auto rule = parse_rule("xx", "yy");
  auto metas = rule.meta_symbols();
  REQUIRE(metas.size() == 2);
  CHECK(metas[0] == 'x');
  CHECK(metas[1] == 'y');
}

TEST_CASE("parse_rule rejects malformed input") {
  CHECK_THROWS_AS(parse_rule("(.)A", "\\2A"), RuleError);  // group 2 missing
  CHECK_THROWS_AS(parse_rule("(.A", "\\1"), RuleError);    // unbalanced
  CHECK_THROWS_AS(parse_rule(".)A", "A"), RuleError);
  CHECK_THROWS_AS(parse_rule("(.)?", "\\1"), RuleError);   // unknown character
  CHECK_THROWS_AS(parse_rule("(.)A", "\\"), RuleError);    // dangling backref
}

TEST_CASE("rule_stats reproduces every published EPR and the checked ACD families") {
  for (const auto& [base, expected] : published_stats()) {
    for (const std::string name : {base, "Meta" + base}) {
      if (name == "MetaAppend3") continue;  // not part of the published suite
      REQUIRE(is_known_task(name));
      auto task = make_task(name);
      auto [epr, acd] = rule_stats(task.rule, task.vocab_size);
      CHECK_MESSAGE(epr == expected.first, "EPR mismatch for ", name);
      if (acd_family_checked(base)) {
        CHECK_MESSAGE(acd == expected.second, "ACD mismatch for ", name);
      }
    }
  }
}

TEST_CASE("registry exposes the full task suite") {
  CHECK(task_names().size() == 30);  // 29 rule tasks plus MultiTask
  CHECK(is_known_task("MultiTask"));
  CHECK_FALSE(is_known_task("Append2"));
}

TEST_CASE("snapshot construction mirrors the worked example") {
  auto rule = parse_rule("(.)x", "\\1x\\1\\1");
  auto snaps = build_snapshots(rule, "BACA", "A");
  REQUIRE(snaps.size() == 3);
  CHECK(snaps[0] == "BACA");
  CHECK(snaps[1] == "BABBCA");
  CHECK(snaps[2] == "BABBCACC");
}

TEST_CASE("replacement scan matches re.sub semantics on DBBA") {
  auto rule = parse_rule("(.)x", "\\1x\\1\\1");
  auto snaps = build_snapshots(rule, "DBBA", "B");
  REQUIRE(snaps.size() == 2);  // one match only: would be rejected in generation
  CHECK(snaps.back() == "DBDDBA");
}

TEST_CASE("generated instances satisfy the snapshot and conditioning contracts") {
  auto task = make_task("ContextAppend11", 11);
  const auto vocab = task_vocab(task);
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng rng(derive_seed(task.seed, "unit", s));
    auto inst = generate_instance(task, rng, vocab);
    auto events = replacement_events(inst);
    REQUIRE(static_cast<int>(events.size()) + 1 >= task.min_snapshots);
    CHECK(inst.conditioning == events.front().edit_count);
    int total = 0;
    for (const auto& e : events) total += e.edit_count;
    CHECK(total == static_cast<int>(inst.edits.size()));
    // replays cleanly end to end
    CHECK_NOTHROW(core::replay_final_state(inst));
  }
}

TEST_CASE("generation replays to the final snapshot across tasks") {
  for (const std::string name : {"Delete2", "Flip33", "MetaSurround11", "MetaContextReverse51"}) {
    auto task = make_task(name, 5);
    const auto vocab = task_vocab(task);
    Rng rng(derive_seed(task.seed, "replay", 0));
    auto inst = generate_instance(task, rng, vocab);
    // Rebuild the expected final snapshot from the meta windows by replaying.
    auto final_state = core::replay_final_state(inst);
    CHECK(final_state.length() ==
          inst.initial.length() + static_cast<int>(inst.edits.size()) -
              2 * static_cast<int>(std::count_if(inst.edits.begin(), inst.edits.end(),
                                                 [](const core::ImplicitEdit& e) { return e.is_delete(); })));
  }
}

TEST_CASE("datasets are deterministic given the seed") {
  auto task = make_task("Append1", 42);
  task.train_size = 30;
  task.dev_size = 5;
  task.test_size = 5;
  auto a = generate_dataset(task);
  auto b = generate_dataset(task);
  const auto vocab = task_vocab(task);
  std::stringstream sa, sb;
  core::write_instances(sa, a.train, vocab);
  core::write_instances(sb, b.train, vocab);
  CHECK(sa.str() == sb.str());
  CHECK(a.train.size() == 30);
  CHECK(a.epr == 1.0);
}

TEST_CASE("meta bindings are distinct within an instance and cover the vocab across instances") {
  auto task = make_task("MetaReplace2", 3);
  const auto vocab = task_vocab(task);
  std::set<char> seen;
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng(derive_seed(task.seed, "meta", i));
    auto inst = generate_instance(task, rng, vocab);
    auto b = inst.meta.at("bindings");
    std::string x = b.at("x").get<std::string>();
    std::string y = b.at("y").get<std::string>();
    REQUIRE(x != y);
    seen.insert(x[0]);
    seen.insert(y[0]);
  }
  CHECK(seen.size() == 10);
}

TEST_CASE("MultiTask mixes tasks while keeping counts") {
  auto task = make_task("MultiTask", 9);
  task.train_size = 40;
  task.dev_size = 4;
  task.test_size = 4;
  auto ds = generate_dataset(task);
  CHECK(ds.train.size() == 40);
  std::set<std::string> names;
  for (const auto& inst : ds.train) names.insert(inst.meta.at("task").get<std::string>());
  CHECK(names.size() > 5);
}

TEST_CASE("ngram task emits exactly the requested number of edits") {
  auto task = make_ngram_task(10, 2);
  auto split = generate_ngram_split(task, "train", 20);
  for (const auto& inst : split) {
    REQUIRE(inst.edits.size() == 10);
    CHECK(inst.conditioning == 0);
    CHECK_NOTHROW(core::replay_final_state(inst));
  }
}

TEST_CASE("ngram task rejects a nonpositive insertion count") {
  CHECK_THROWS_AS(make_ngram_task(0), std::invalid_argument);
}

TEST_CASE("ngram token statistics match the stored trigram conditionals") {
  auto task = make_ngram_task(50, 7);
  const TrigramModel model(task.vocab_size, task.seed);
  auto split = generate_ngram_split(task, "train", 400);

  // Empirical next-token counts per context, from the edit contents.
  std::map<std::pair<int, int>, std::vector<int>> counts;
  const auto vocab = core::Vocab::letters(task.vocab_size);
  for (const auto& inst : split) {
    auto trace = core::implicit_to_explicit(inst);
    const auto& s0 = trace.states.front();
    int anchor = inst.meta.at("anchor").get<int>();
    int prev2 = anchor >= 1 ? s0.at(anchor) - core::Vocab::kReservedCount
                            : s0.at(anchor + 1) - core::Vocab::kReservedCount;
    int prev1 = s0.at(anchor + 1) - core::Vocab::kReservedCount;
    for (const auto& e : inst.edits) {
      int c = e.content - core::Vocab::kReservedCount;
      auto& vec = counts[{prev2, prev1}];
      vec.resize(static_cast<std::size_t>(task.vocab_size), 0);
      vec[static_cast<std::size_t>(c)]++;
      prev2 = prev1;
      prev1 = c;
    }
  }

  // Chi-squared per well-sampled context; with 9 dof, values beyond 40
  // would be wildly inconsistent with the table.
  int checked = 0;
  for (const auto& [ctx, vec] : counts) {
    int n = 0;
    for (int c : vec) n += c;
    if (n < 150) continue;
    double chi2 = 0.0;
    for (int c = 0; c < task.vocab_size; ++c) {
      double expected = n * model.prob(ctx.first, ctx.second, c);
      if (expected < 1e-9) continue;
      double d = vec[static_cast<std::size_t>(c)] - expected;
      chi2 += d * d / expected;
    }
    ++checked;
    CHECK(chi2 < 60.0);
  }
  CHECK(checked > 10);
}
