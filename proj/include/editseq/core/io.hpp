#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "editseq/core/edits.hpp"

namespace editseq::core {

// One instance per line:
// {"initial": [token strings], "edits": [[position, content string], ...],
//  "conditioning": int, "meta": object}
// DELETE content is serialized as the literal string "<DEL>".
nlohmann::json instance_to_json(const EditSequenceInstance& instance, const Vocab& vocab);
EditSequenceInstance instance_from_json(const nlohmann::json& j, const Vocab& vocab);

void write_instances(std::ostream& os, const std::vector<EditSequenceInstance>& instances,
                     const Vocab& vocab);
std::vector<EditSequenceInstance> read_instances(std::istream& is, const Vocab& vocab);

void write_instances_file(const std::string& path, const std::vector<EditSequenceInstance>& instances,
                          const Vocab& vocab);
std::vector<EditSequenceInstance> read_instances_file(const std::string& path, const Vocab& vocab);

// One token per line, line number = id. Includes the reserved tokens, so a
// round trip reproduces id assignment exactly.
void write_vocab_file(const std::string& path, const Vocab& vocab);
Vocab read_vocab_file(const std::string& path);

}  // namespace editseq::core
