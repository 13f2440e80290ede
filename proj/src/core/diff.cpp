#include "editseq/core/diff.hpp"

#include <deque>
#include <unordered_map>

namespace editseq::core {

namespace {

struct Region {
  int alo, ahi, blo, bhi;
};

MatchingBlock longest_match(std::span<const TokenId> a, std::span<const TokenId> b,
                            const std::unordered_map<TokenId, std::vector<int>>& b_index,
                            int alo, int ahi, int blo, int bhi) {
  int best_i = alo, best_j = blo, best_size = 0;
  // j2len[j] = length of the longest match ending at a[i-1], b[j-1].
  std::unordered_map<int, int> j2len;
  std::unordered_map<int, int> new_j2len;
  for (int i = alo; i < ahi; ++i) {
    new_j2len.clear();
    auto it = b_index.find(a[static_cast<std::size_t>(i)]);
    if (it != b_index.end()) {
      for (int j : it->second) {
        if (j < blo) continue;
        if (j >= bhi) break;
        int k = 1;
        auto prev = j2len.find(j - 1);
        if (prev != j2len.end()) k = prev->second + 1;
        new_j2len[j] = k;
        if (k > best_size) {
          best_i = i - k + 1;
          best_j = j - k + 1;
          best_size = k;
        }
      }
    }
    std::swap(j2len, new_j2len);
  }
  return MatchingBlock{best_i, best_j, best_size};
}

}  // namespace

std::vector<MatchingBlock> matching_blocks(std::span<const TokenId> a, std::span<const TokenId> b) {
  std::unordered_map<TokenId, std::vector<int>> b_index;
  for (int j = 0; j < static_cast<int>(b.size()); ++j) b_index[b[static_cast<std::size_t>(j)]].push_back(j);

  std::vector<MatchingBlock> found;
  std::deque<Region> queue{{0, static_cast<int>(a.size()), 0, static_cast<int>(b.size())}};
  while (!queue.empty()) {
    Region r = queue.front();
    queue.pop_front();
    MatchingBlock m = longest_match(a, b, b_index, r.alo, r.ahi, r.blo, r.bhi);
    if (m.size == 0) continue;
    found.push_back(m);
    if (r.alo < m.a_start && r.blo < m.b_start) queue.push_back({r.alo, m.a_start, r.blo, m.b_start});
    if (m.a_start + m.size < r.ahi && m.b_start + m.size < r.bhi) {
      queue.push_back({m.a_start + m.size, r.ahi, m.b_start + m.size, r.bhi});
    }
  }
  std::sort(found.begin(), found.end(), [](const MatchingBlock& x, const MatchingBlock& y) {
    return x.a_start < y.a_start;
  });

  // Coalesce adjacent blocks, then append the terminal sentinel.
  std::vector<MatchingBlock> blocks;
  for (const auto& m : found) {
    if (!blocks.empty() && blocks.back().a_start + blocks.back().size == m.a_start &&
        blocks.back().b_start + blocks.back().size == m.b_start) {
      blocks.back().size += m.size;
    } else {
      blocks.push_back(m);
    }
  }
  blocks.push_back(MatchingBlock{static_cast<int>(a.size()), static_cast<int>(b.size()), 0});
  return blocks;
}

std::vector<ExplicitEdit> diff_snapshots(const State& a, const State& b) {
  const auto& ta = a.tokens();
  const auto& tb = b.tokens();
  auto blocks = matching_blocks(ta, tb);

  std::vector<ExplicitEdit> edits;
  int ai = 0, bj = 0;
  int offset = 0;  // cumulative length change applied to a so far
  for (const auto& m : blocks) {
    const int del_count = m.a_start - ai;
    const int ins_count = m.b_start - bj;
    const int base = ai + offset;  // current index of the region start
    // Deletions first: the run a[ai : m.a_start] disappears one token at a
    // time, always at the region start since survivors slide left into it.
    for (int k = 0; k < del_count; ++k) {
      edits.push_back(ExplicitEdit{base, Vocab::kDelete});
    }
    // Then insertions of b[bj : m.b_start], left to right, anchored on the
    // token just before the region.
    for (int k = 0; k < ins_count; ++k) {
      edits.push_back(ExplicitEdit{base - 1 + k, tb[static_cast<std::size_t>(bj + k)]});
    }
    offset += ins_count - del_count;
    ai = m.a_start + m.size;
    bj = m.b_start + m.size;
  }
  return edits;
}

EditSequenceInstance trace_from_snapshots(const std::vector<State>& snapshots, int conditioning) {
  if (snapshots.empty()) throw EditError("need at least one snapshot");
  std::vector<ExplicitEdit> all;
  for (std::size_t i = 0; i + 1 < snapshots.size(); ++i) {
    auto step = diff_snapshots(snapshots[i], snapshots[i + 1]);
    all.insert(all.end(), step.begin(), step.end());
  }
  return explicit_to_implicit(make_trace(snapshots.front(), all), conditioning);
}

}  // namespace editseq::core
