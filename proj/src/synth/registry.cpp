#include "editseq/synth/task.hpp"

#include <algorithm>
#include <map>

namespace editseq::synth {

namespace {

struct RuleText {
  const char* pattern;
  const char* replacement;
};

// The published task suite. Meta variants swap the anchor literal for meta
// symbols so that the concrete characters differ per instance.
const std::map<std::string, RuleText>& rule_table() {
  static const std::map<std::string, RuleText> table = {
      {"Append1", {"A", "AB"}},
      {"Append3", {"A", "ABBB"}},
      {"ContextAppend11", {"(.)A", "\\1A\\1"}},
      {"ContextAppend13", {"(.)A", "\\1A\\1\\1\\1"}},
      {"ContextAppend31", {"(...)A", "\\1A\\1"}},
      {"ContextAppend33", {"(...)A", "\\1A\\1\\1\\1"}},
      {"ContextAppend52", {"(.....)A", "\\1A\\1\\1"}},
      {"ContextReverse31", {"(.)(.)(.)A", "\\1\\2\\3A\\3\\2\\1"}},
      {"ContextReverse51", {"(.)(.)(.)(.)(.)A", "\\1\\2\\3\\4\\5A\\5\\4\\3\\2\\1"}},
      {"Delete2", {"AA", ""}},
      {"Flip11", {"(.)A(.)", "\\2\\1A\\2\\1"}},
      {"Flip33", {"(...)A(...)", "\\2\\2\\2\\1A\\2\\1\\1\\1"}},
      {"Replace2", {"AA", "BB"}},
      {"Surround11", {"(.)A(.)", "\\1\\1A\\2\\2"}},
      {"Surround33", {"(...)A(...)", "\\1\\1\\1\\1A\\2\\2\\2\\2"}},
      {"MetaAppend1", {"x", "xy"}},
      {"MetaContextAppend11", {"(.)x", "\\1x\\1"}},
      {"MetaContextAppend13", {"(.)x", "\\1x\\1\\1\\1"}},
      {"MetaContextAppend31", {"(...)x", "\\1x\\1"}},
      {"MetaContextAppend33", {"(...)x", "\\1x\\1\\1\\1"}},
      {"MetaContextAppend52", {"(.....)x", "\\1x\\1\\1"}},
      {"MetaContextReverse31", {"(.)(.)(.)x", "\\1\\2\\3x\\3\\2\\1"}},
      {"MetaContextReverse51", {"(.)(.)(.)(.)(.)x", "\\1\\2\\3\\4\\5x\\5\\4\\3\\2\\1"}},
      {"MetaDelete2", {"xx", ""}},
      {"MetaFlip11", {"(.)x(.)", "\\2\\1x\\2\\1"}},
      {"MetaFlip33", {"(...)x(...)", "\\2\\2\\2\\1x\\2\\1\\1\\1"}},
      {"MetaReplace2", {"xx", "yy"}},
      {"MetaSurround11", {"(.)x(.)", "\\1\\1x\\2\\2"}},
      {"MetaSurround33", {"(...)x(...)", "\\1\\1\\1\\1x\\2\\2\\2\\2"}},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, rule] : rule_table()) v.push_back(name);
    v.push_back("MultiTask");
    return v;
  }();
  return names;
}

bool is_known_task(const std::string& name) {
  return name == "MultiTask" || rule_table().count(name) > 0;
}

TaskSpec make_task(const std::string& name, std::uint64_t seed) {
  TaskSpec task;
  task.name = name;
  task.seed = seed;
  if (name == "MultiTask") return task;  // rule drawn per instance
  auto it = rule_table().find(name);
  if (it == rule_table().end()) throw RuleError("unknown task: " + name);
  task.rule = parse_rule(it->second.pattern, it->second.replacement);
  return task;
}

}  // namespace editseq::synth
