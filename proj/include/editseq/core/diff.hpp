#pragma once

#include <span>
#include <vector>

#include "editseq/core/edits.hpp"

namespace editseq::core {

// Maximal matching run: a[a_start : a_start+size] == b[b_start : b_start+size].
struct MatchingBlock {
  int a_start = 0;
  int b_start = 0;
  int size = 0;
  bool operator==(const MatchingBlock&) const = default;
};

// Ratcliff-Obershelp matching blocks over token sequences: recursively picks
// the longest matching run (ties resolved to the earliest start in a, then
// in b), with no junk heuristic. Returns blocks in order, terminated by a
// zero-size sentinel at (|a|, |b|).
std::vector<MatchingBlock> matching_blocks(std::span<const TokenId> a, std::span<const TokenId> b);

// Token-at-a-time edit script transforming a into b, derived from the
// matching blocks. Non-matching regions become deletions (left to right)
// followed by insertions. Each edit applies to the state produced by the
// previous one; replaying the list on a yields b exactly.
std::vector<ExplicitEdit> diff_snapshots(const State& a, const State& b);

// Concatenates the diffs of consecutive snapshots into one instance in
// implicit indexing.
EditSequenceInstance trace_from_snapshots(const std::vector<State>& snapshots, int conditioning);

}  // namespace editseq::core
