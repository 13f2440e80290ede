#include "editseq/core/edits.hpp"

#include <algorithm>
#include <unordered_map>

namespace editseq::core {

State::State(std::vector<TokenId> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.size() < 2 || tokens_.front() != Vocab::kStart || tokens_.back() != Vocab::kEnd) {
    throw EditError("state must be delimited by START and END");
  }
  for (std::size_t i = 1; i + 1 < tokens_.size(); ++i) {
    if (tokens_[i] == Vocab::kStart || tokens_[i] == Vocab::kEnd) {
      throw EditError("interior START/END in state");
    }
  }
}

State State::of_content(const std::vector<TokenId>& content) {
  std::vector<TokenId> t;
  t.reserve(content.size() + 2);
  t.push_back(Vocab::kStart);
  t.insert(t.end(), content.begin(), content.end());
  t.push_back(Vocab::kEnd);
  return State(std::move(t));
}

State State::of_letters(const Vocab& vocab, const std::string& text) {
  std::vector<TokenId> content;
  content.reserve(text.size());
  for (char c : text) content.push_back(vocab.symbol_id(std::string(1, c)));
  return State::of_content(content);
}

std::string State::to_string(const Vocab& vocab) const {
  std::string out;
  for (std::size_t i = 1; i + 1 < tokens_.size(); ++i) out += vocab.text(tokens_[i]);
  return out;
}

State apply_edit(const State& state, const ExplicitEdit& edit) {
  const int last = state.length() - 1;
  std::vector<TokenId> tokens = state.tokens();
  if (edit.is_delete()) {
    if (edit.position < 1 || edit.position > last - 1) {
      throw EditError("delete position out of range (cannot delete START/END)");
    }
    tokens.erase(tokens.begin() + edit.position);
  } else {
    if (edit.content == Vocab::kStart || edit.content == Vocab::kEnd || edit.content == Vocab::kPad) {
      throw EditError("edit content must be a symbol or DELETE");
    }
    if (edit.position < 0 || edit.position > last - 1) {
      throw EditError("insert position out of range (cannot insert after END)");
    }
    tokens.insert(tokens.begin() + edit.position + 1, edit.content);
  }
  return State(std::move(tokens));
}

ExplicitTrace make_trace(const State& initial, const std::vector<ExplicitEdit>& edits) {
  ExplicitTrace trace;
  trace.states.reserve(edits.size() + 1);
  trace.states.push_back(initial);
  trace.edits = edits;
  for (const auto& e : edits) trace.states.push_back(apply_edit(trace.states.back(), e));
  return trace;
}

EditSequenceInstance explicit_to_implicit(const ExplicitTrace& trace, int conditioning) {
  if (trace.states.empty() || trace.states.size() != trace.edits.size() + 1) {
    throw EditError("malformed trace: need |states| == |edits| + 1");
  }
  const State& initial = trace.states.front();
  const int top_initial_id = initial.length() - 1;

  // Stable id of every token in the evolving state.
  std::vector<int> ids(initial.length());
  for (int i = 0; i < initial.length(); ++i) ids[static_cast<std::size_t>(i)] = i;

  EditSequenceInstance out;
  out.initial = initial;
  out.conditioning = conditioning;
  out.edits.reserve(trace.edits.size());
  for (std::size_t t = 0; t < trace.edits.size(); ++t) {
    const ExplicitEdit& e = trace.edits[t];
    const int len = static_cast<int>(ids.size());
    if (e.position < 0 || e.position >= len) throw EditError("trace edit position out of range");
    const int anchor_id = ids[static_cast<std::size_t>(e.position)];
    out.edits.push_back(ImplicitEdit{anchor_id, e.content});
    if (e.is_delete()) {
      ids.erase(ids.begin() + e.position);
    } else {
      ids.insert(ids.begin() + e.position + 1, top_initial_id + static_cast<int>(t) + 1);
    }
  }
  return out;
}

ExplicitTrace implicit_to_explicit(const EditSequenceInstance& instance) {
  const int top_initial_id = instance.initial.length() - 1;
  std::vector<int> ids(instance.initial.length());
  for (int i = 0; i < instance.initial.length(); ++i) ids[static_cast<std::size_t>(i)] = i;

  ExplicitTrace trace;
  trace.states.push_back(instance.initial);
  trace.edits.reserve(instance.edits.size());
  for (std::size_t t = 0; t < instance.edits.size(); ++t) {
    const ImplicitEdit& e = instance.edits[t];
    const int max_live_id = top_initial_id + static_cast<int>(t);
    if (e.position < 0 || e.position > max_live_id) {
      throw EditError("implicit edit references a not-yet-created id");
    }
    auto it = std::find(ids.begin(), ids.end(), e.position);
    if (it == ids.end()) throw EditError("implicit edit references a deleted id");
    const int pos = static_cast<int>(it - ids.begin());
    trace.edits.push_back(ExplicitEdit{pos, e.content});
    trace.states.push_back(apply_edit(trace.states.back(), trace.edits.back()));
    if (e.is_delete()) {
      ids.erase(ids.begin() + pos);
    } else {
      ids.insert(ids.begin() + pos + 1, top_initial_id + static_cast<int>(t) + 1);
    }
  }
  return trace;
}

State replay_final_state(const EditSequenceInstance& instance) {
  return implicit_to_explicit(instance).states.back();
}

}  // namespace editseq::core
