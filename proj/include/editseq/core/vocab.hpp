#pragma once

#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace editseq::core {

using TokenId = int;

// Token vocabulary. Ids 0..3 are reserved control tokens; content symbols
// follow. Edit content ranges over {DELETE} plus the content symbols; START
// and END only ever appear as state delimiters.
class Vocab {
 public:
  static constexpr TokenId kStart = 0;
  static constexpr TokenId kEnd = 1;
  static constexpr TokenId kDelete = 2;
  static constexpr TokenId kPad = 3;
  static constexpr TokenId kReservedCount = 4;

  static constexpr const char* kStartText = "<S>";
  static constexpr const char* kEndText = "<E>";
  static constexpr const char* kDeleteText = "<DEL>";
  static constexpr const char* kPadText = "<PAD>";

  Vocab() = default;

  explicit Vocab(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
      const auto& s = symbols_[i];
      if (s == kStartText || s == kEndText || s == kDeleteText || s == kPadText) {
        throw std::invalid_argument("vocab symbol collides with reserved token: " + s);
      }
      if (!index_.emplace(s, kReservedCount + static_cast<TokenId>(i)).second) {
        throw std::invalid_argument("duplicate vocab symbol: " + s);
      }
    }
  }

  // Single-character symbols 'A', 'B', ... as used by the synthetic tasks.
  static Vocab letters(int count) {
    std::vector<std::string> syms;
    syms.reserve(count);
    for (int i = 0; i < count; ++i) syms.push_back(std::string(1, static_cast<char>('A' + i)));
    return Vocab(std::move(syms));
  }

  int size() const { return static_cast<int>(symbols_.size()); }
  int total_ids() const { return kReservedCount + size(); }

  // DELETE plus every symbol: the support of an edit's content distribution.
  int content_classes() const { return size() + 1; }

  bool is_symbol(TokenId id) const { return id >= kReservedCount && id < total_ids(); }
  bool is_content(TokenId id) const { return id == kDelete || is_symbol(id); }

  TokenId symbol_id(const std::string& text) const {
    auto it = index_.find(text);
    if (it == index_.end()) throw std::out_of_range("unknown vocab symbol: " + text);
    return it->second;
  }

  const std::string& text(TokenId id) const {
    static const std::string reserved[] = {kStartText, kEndText, kDeleteText, kPadText};
    if (id >= 0 && id < kReservedCount) return reserved[id];
    if (is_symbol(id)) return symbols_[id - kReservedCount];
    throw std::out_of_range("token id out of range: " + std::to_string(id));
  }

  TokenId id_of(const std::string& text) const {
    if (text == kStartText) return kStart;
    if (text == kEndText) return kEnd;
    if (text == kDeleteText) return kDelete;
    if (text == kPadText) return kPad;
    return symbol_id(text);
  }

  // Maps a content token id onto the compact class index used by model
  // output heads: class 0 is DELETE, classes 1..V are the symbols.
  int content_class(TokenId id) const {
    if (id == kDelete) return 0;
    if (is_symbol(id)) return id - kReservedCount + 1;
    throw std::out_of_range("token is not valid edit content: " + std::to_string(id));
  }

  TokenId content_class_to_id(int cls) const {
    if (cls == 0) return kDelete;
    if (cls >= 1 && cls <= size()) return kReservedCount + cls - 1;
    throw std::out_of_range("content class out of range: " + std::to_string(cls));
  }

  const std::vector<std::string>& symbols() const { return symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, TokenId> index_;
};

}  // namespace editseq::core
