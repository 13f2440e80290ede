#include "editseq/core/io.hpp"

#include <fstream>
#include <sstream>

namespace editseq::core {

nlohmann::json instance_to_json(const EditSequenceInstance& instance, const Vocab& vocab) {
  nlohmann::json j;
  auto& initial = j["initial"] = nlohmann::json::array();
  for (TokenId id : instance.initial.tokens()) initial.push_back(vocab.text(id));
  auto& edits = j["edits"] = nlohmann::json::array();
  for (const auto& e : instance.edits) {
    edits.push_back(nlohmann::json::array({e.position, vocab.text(e.content)}));
  }
  j["conditioning"] = instance.conditioning;
  j["meta"] = instance.meta.is_null() ? nlohmann::json::object() : instance.meta;
  return j;
}

EditSequenceInstance instance_from_json(const nlohmann::json& j, const Vocab& vocab) {
  EditSequenceInstance out;
  std::vector<TokenId> tokens;
  for (const auto& t : j.at("initial")) tokens.push_back(vocab.id_of(t.get<std::string>()));
  out.initial = State(std::move(tokens));
  for (const auto& e : j.at("edits")) {
    out.edits.push_back(ImplicitEdit{e.at(0).get<int>(), vocab.id_of(e.at(1).get<std::string>())});
  }
  out.conditioning = j.value("conditioning", 0);
  if (out.conditioning < 0 || out.conditioning > static_cast<int>(out.edits.size())) {
    throw EditError("conditioning out of range");
  }
  out.meta = j.value("meta", nlohmann::json::object());
  return out;
}

void write_instances(std::ostream& os, const std::vector<EditSequenceInstance>& instances,
                     const Vocab& vocab) {
  for (const auto& inst : instances) {
    os << instance_to_json(inst, vocab).dump() << '\n';
  }
}

std::vector<EditSequenceInstance> read_instances(std::istream& is, const Vocab& vocab) {
  std::vector<EditSequenceInstance> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    out.push_back(instance_from_json(nlohmann::json::parse(line), vocab));
  }
  return out;
}

void write_instances_file(const std::string& path, const std::vector<EditSequenceInstance>& instances,
                          const Vocab& vocab) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  write_instances(f, instances, vocab);
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<EditSequenceInstance> read_instances_file(const std::string& path, const Vocab& vocab) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  return read_instances(f, vocab);
}

void write_vocab_file(const std::string& path, const Vocab& vocab) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  for (TokenId id = 0; id < vocab.total_ids(); ++id) f << vocab.text(id) << '\n';
  if (!f) throw std::runtime_error("write failed: " + path);
}

Vocab read_vocab_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(f, line)) lines.push_back(line);
  // Reserved tokens occupy the first four lines by construction.
  if (lines.size() < Vocab::kReservedCount || lines[0] != Vocab::kStartText ||
      lines[1] != Vocab::kEndText || lines[2] != Vocab::kDeleteText || lines[3] != Vocab::kPadText) {
    throw std::runtime_error("vocab file missing reserved token header: " + path);
  }
  return Vocab(std::vector<std::string>(lines.begin() + Vocab::kReservedCount, lines.end()));
}

}  // namespace editseq::core
