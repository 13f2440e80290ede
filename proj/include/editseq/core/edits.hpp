#pragma once

#include <string>
#include <vector>

#include "editseq/core/vocab.hpp"
#include "editseq/vendor_json_fwd.hpp"

namespace editseq::core {

struct EditError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A token sequence delimited by START/END. Immutable by convention: all
// operations return new states.
class State {
 public:
  State() : tokens_{Vocab::kStart, Vocab::kEnd} {}
  explicit State(std::vector<TokenId> tokens);

  // Wraps content token ids in START/END.
  static State of_content(const std::vector<TokenId>& content);
  // Builds from single-character symbol text, e.g. "BACA".
  static State of_letters(const Vocab& vocab, const std::string& text);

  int length() const { return static_cast<int>(tokens_.size()); }
  TokenId at(int i) const { return tokens_[static_cast<std::size_t>(i)]; }
  const std::vector<TokenId>& tokens() const { return tokens_; }
  std::vector<TokenId> content() const {
    return std::vector<TokenId>(tokens_.begin() + 1, tokens_.end() - 1);
  }
  bool operator==(const State& o) const { return tokens_ == o.tokens_; }

  std::string to_string(const Vocab& vocab) const;

 private:
  std::vector<TokenId> tokens_;
};

// Edit against the current state: insert `content` after the token at
// `position`, or delete the token at `position` when content is DELETE.
struct ExplicitEdit {
  int position = 0;
  TokenId content = Vocab::kPad;
  bool is_delete() const { return content == Vocab::kDelete; }
  bool operator==(const ExplicitEdit&) const = default;
};

// Edit in stable-id indexing: ids 0..M name the initial tokens, id M+t names
// the token inserted by edit t. `position` is the id of the token the edit
// happens after (for deletes, the id of the token removed).
struct ImplicitEdit {
  int position = 0;
  TokenId content = Vocab::kPad;
  bool is_delete() const { return content == Vocab::kDelete; }
  bool operator==(const ImplicitEdit&) const = default;
};

// The universal data record: initial state plus implicit edits. The first
// `conditioning` edits are context only and never contribute to loss or
// metrics. `meta` is free-form provenance.
struct EditSequenceInstance {
  State initial;
  std::vector<ImplicitEdit> edits;
  int conditioning = 0;
  nlohmann::json meta;
};

// Fully materialized edit sequence: states[t] results from applying
// edits[t-1] to states[t-1].
struct ExplicitTrace {
  std::vector<State> states;
  std::vector<ExplicitEdit> edits;
};

State apply_edit(const State& state, const ExplicitEdit& edit);

ExplicitTrace make_trace(const State& initial, const std::vector<ExplicitEdit>& edits);

// Converts between the two position indexings. The pair is bijective on
// valid inputs; implicit_to_explicit rejects references to deleted or
// not-yet-created ids.
EditSequenceInstance explicit_to_implicit(const ExplicitTrace& trace, int conditioning = 0);
ExplicitTrace implicit_to_explicit(const EditSequenceInstance& instance);

// Final state reached by replaying an instance's edits.
State replay_final_state(const EditSequenceInstance& instance);

}  // namespace editseq::core
