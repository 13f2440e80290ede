#include <sstream>

#include "doctest.h"
#include "editseq/core/diff.hpp"
#include "editseq/core/io.hpp"
#include "editseq/rng.hpp"

using namespace editseq;
using namespace editseq::core;

namespace {

const Vocab& letters10() {
  static const Vocab v = Vocab::letters(10);
  return v;
}

ExplicitEdit insert(const Vocab& v, int pos, char c) {
  return ExplicitEdit{pos, v.symbol_id(std::string(1, c))};
}

ExplicitEdit del(int pos) { return ExplicitEdit{pos, Vocab::kDelete}; }

// Independent diff reference: full DP longest-common-substring per region,
// earliest tie-break, recursive split. Used only to cross-check
// matching_blocks and diff_snapshots.
struct RefBlock {
  int a, b, n;
};

void ref_blocks_rec(const std::vector<TokenId>& a, const std::vector<TokenId>& b, int alo, int ahi,
                    int blo, int bhi, std::vector<RefBlock>& out) {
  int best_a = alo, best_b = blo, best_n = 0;
  for (int i = alo; i < ahi; ++i) {
    for (int j = blo; j < bhi; ++j) {
      int n = 0;
      while (i + n < ahi && j + n < bhi && a[i + n] == b[j + n]) ++n;
      if (n > best_n) {
        best_a = i;
        best_b = j;
        best_n = n;
      }
    }
  }
  if (best_n == 0) return;
  ref_blocks_rec(a, b, alo, best_a, blo, best_b, out);
  out.push_back({best_a, best_b, best_n});
  ref_blocks_rec(a, b, best_a + best_n, ahi, best_b + best_n, bhi, out);
}

std::vector<RefBlock> ref_blocks(const std::vector<TokenId>& a, const std::vector<TokenId>& b) {
  std::vector<RefBlock> out;
  ref_blocks_rec(a, b, 0, static_cast<int>(a.size()), 0, static_cast<int>(b.size()), out);
  return out;
}

State random_state(Rng& rng, const Vocab& v, int min_len, int max_len) {
  std::vector<TokenId> content(static_cast<std::size_t>(rng.next_int(min_len, max_len + 1)));
  for (auto& t : content) t = Vocab::kReservedCount + rng.next_int(0, v.size());
  return State::of_content(content);
}

std::vector<ExplicitEdit> random_edits(Rng& rng, const Vocab& v, const State& initial, int count) {
  std::vector<ExplicitEdit> edits;
  State s = initial;
  for (int i = 0; i < count; ++i) {
    const int last = s.length() - 1;
    ExplicitEdit e;
    if (last >= 2 && rng.next_double() < 0.4) {
      e = del(rng.next_int(1, last));
    } else {
      e = ExplicitEdit{rng.next_int(0, last), Vocab::kReservedCount + rng.next_int(0, v.size())};
    }
    s = apply_edit(s, e);
    edits.push_back(e);
  }
  return edits;
}

}  // namespace

TEST_CASE("apply_edit inserts after the anchor") {
  const auto& v = letters10();
  auto s = State::of_letters(v, "BACA");
  auto r = apply_edit(s, insert(v, 2, 'B'));
  CHECK(r.to_string(v) == "BABCA");
}

TEST_CASE("apply_edit deletes the addressed token") {
  const auto& v = letters10();
  auto s = State::of_letters(v, "AA");
  auto r = apply_edit(s, del(1));
  CHECK(r.to_string(v) == "A");
}

TEST_CASE("apply_edit rejects out-of-range and delimiter edits") {
  const auto& v = letters10();
  auto s = State::of_letters(v, "AB");  // tokens <S> A B <E>, last = 3
  CHECK_THROWS_AS(apply_edit(s, del(0)), EditError);         // START
  CHECK_THROWS_AS(apply_edit(s, del(3)), EditError);         // END
  CHECK_THROWS_AS(apply_edit(s, insert(v, 3, 'A')), EditError);  // after END
  CHECK_THROWS_AS(apply_edit(s, insert(v, -1, 'A')), EditError);
  CHECK_THROWS_AS(apply_edit(s, ExplicitEdit{1, Vocab::kStart}), EditError);
}

TEST_CASE("length changes by exactly one per edit") {
  const auto& v = letters10();
  Rng rng(7);
  State s = random_state(rng, v, 3, 12);
  for (int i = 0; i < 200; ++i) {
    const int last = s.length() - 1;
    ExplicitEdit e = (last >= 2 && rng.next_double() < 0.5)
                         ? del(rng.next_int(1, last))
                         : ExplicitEdit{rng.next_int(0, last), Vocab::kReservedCount + rng.next_int(0, 10)};
    State next = apply_edit(s, e);
    CHECK(next.length() == s.length() + (e.is_delete() ? -1 : 1));
    s = next;
  }
}

TEST_CASE("figure-style replay: BACA to BABBCACC") {
  const auto& v = letters10();
  auto s = State::of_letters(v, "BACA");
  std::vector<ExplicitEdit> edits = {insert(v, 2, 'B'), insert(v, 3, 'B'), insert(v, 6, 'C'),
                                     insert(v, 7, 'C')};
  auto trace = make_trace(s, edits);
  CHECK(trace.states.back().to_string(v) == "BABBCACC");

  // Implicit ids: initial tokens take 0..5, the first inserted B takes 6 and
  // the second insertion anchors on it.
  auto inst = explicit_to_implicit(trace);
  REQUIRE(inst.edits.size() == 4);
  CHECK(inst.edits[0] == ImplicitEdit{2, v.symbol_id("B")});
  CHECK(inst.edits[1] == ImplicitEdit{6, v.symbol_id("B")});
  CHECK(inst.edits[2] == ImplicitEdit{4, v.symbol_id("C")});
  CHECK(inst.edits[3] == ImplicitEdit{8, v.symbol_id("C")});

  auto back = implicit_to_explicit(inst);
  CHECK(back.edits == edits);
  CHECK(back.states.back().to_string(v) == "BABBCACC");
}

TEST_CASE("empty trace converts to empty instance") {
  const auto& v = letters10();
  auto trace = make_trace(State::of_letters(v, "AB"), {});
  auto inst = explicit_to_implicit(trace);
  CHECK(inst.edits.empty());
  auto back = implicit_to_explicit(inst);
  CHECK(back.states.size() == 1);
  CHECK(back.states[0] == trace.states[0]);
}

TEST_CASE("conversion round-trips on 1000 random traces") {
  const auto& v = letters10();
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(seed);
    State initial = random_state(rng, v, 18, 20);
    auto edits = random_edits(rng, v, initial, 15);
    auto trace = make_trace(initial, edits);
    auto inst = explicit_to_implicit(trace);
    auto back = implicit_to_explicit(inst);
    REQUIRE(back.edits == edits);
    REQUIRE(back.states.back() == trace.states.back());
    // and the inverse direction
    auto inst2 = explicit_to_implicit(back);
    REQUIRE(inst2.edits == inst.edits);
  }
}

TEST_CASE("implicit references to dead or future ids are rejected") {
  const auto& v = letters10();
  EditSequenceInstance inst;
  inst.initial = State::of_letters(v, "ABC");  // ids 0..4
  inst.edits = {ImplicitEdit{2, Vocab::kDelete}, ImplicitEdit{2, v.symbol_id("A")}};
  CHECK_THROWS_AS(implicit_to_explicit(inst), EditError);

  inst.edits = {ImplicitEdit{7, v.symbol_id("A")}};  // first edit may reference at most id 4
  CHECK_THROWS_AS(implicit_to_explicit(inst), EditError);
}

TEST_CASE("diff_snapshots matches the published per-replacement edit counts") {
  const auto& v = letters10();
  CHECK(diff_snapshots(State::of_letters(v, "AA"), State::of_letters(v, "")).size() == 2);
  CHECK(diff_snapshots(State::of_letters(v, "AA"), State::of_letters(v, "BB")).size() == 4);
}

TEST_CASE("diff_snapshots inserts DD after the shared prefix in DBBA -> DBDDBA") {
  const auto& v = letters10();
  auto edits = diff_snapshots(State::of_letters(v, "DBBA"), State::of_letters(v, "DBDDBA"));
  REQUIRE(edits.size() == 2);
  CHECK(edits[0] == insert(v, 2, 'D'));
  CHECK(edits[1] == insert(v, 3, 'D'));
}

TEST_CASE("diff_snapshots agrees with a reference matcher and replays, 500 random pairs") {
  const auto& v = letters10();
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    Rng rng(seed + 9000);
    State a = random_state(rng, v, 0, 14);
    State b = seed % 5 == 0 ? a : random_state(rng, v, 0, 14);

    auto blocks = matching_blocks(a.tokens(), b.tokens());
    auto ref = ref_blocks(a.tokens(), b.tokens());
    REQUIRE(blocks.size() == ref.size() + 1);  // sentinel
    for (std::size_t i = 0; i < ref.size(); ++i) {
      REQUIRE(blocks[i].a_start == ref[i].a);
      REQUIRE(blocks[i].b_start == ref[i].b);
      REQUIRE(blocks[i].size == ref[i].n);
    }

    auto edits = diff_snapshots(a, b);
    State s = a;
    for (const auto& e : edits) s = apply_edit(s, e);
    REQUIRE(s == b);
    // Minimality floor, tight for pure insertions/deletions.
    REQUIRE(static_cast<int>(edits.size()) >= std::abs(a.length() - b.length()));
  }
}

TEST_CASE("pure insertion and deletion diffs hit the minimality floor") {
  const auto& v = letters10();
  auto grow = diff_snapshots(State::of_letters(v, "ABC"), State::of_letters(v, "ADBEC"));
  CHECK(grow.size() == 2);
  auto shrink = diff_snapshots(State::of_letters(v, "ADBEC"), State::of_letters(v, "ABC"));
  CHECK(shrink.size() == 2);
}

TEST_CASE("trace_from_snapshots reproduces the four-insertion instance") {
  const auto& v = letters10();
  std::vector<State> snaps = {State::of_letters(v, "BACA"), State::of_letters(v, "BABBCA"),
                              State::of_letters(v, "BABBCACC")};
  auto inst = trace_from_snapshots(snaps, 2);
  REQUIRE(inst.edits.size() == 4);
  CHECK(inst.conditioning == 2);
  CHECK(inst.edits[0] == ImplicitEdit{2, v.symbol_id("B")});
  CHECK(inst.edits[1] == ImplicitEdit{6, v.symbol_id("B")});
  CHECK(inst.edits[2] == ImplicitEdit{4, v.symbol_id("C")});
  CHECK(inst.edits[3] == ImplicitEdit{8, v.symbol_id("C")});
  CHECK(replay_final_state(inst) == snaps.back());
}

TEST_CASE("single snapshot yields zero edits") {
  const auto& v = letters10();
  auto inst = trace_from_snapshots({State::of_letters(v, "ABBA")}, 0);
  CHECK(inst.edits.empty());
}

TEST_CASE("instance JSONL round trip preserves everything") {
  const auto& v = letters10();
  EditSequenceInstance inst;
  inst.initial = State::of_letters(v, "CAB");
  inst.edits = {ImplicitEdit{1, v.symbol_id("D")}, ImplicitEdit{2, Vocab::kDelete}};
  inst.conditioning = 1;
  inst.meta = {{"task", "unit"}, {"index", 3}};

  auto j = instance_to_json(inst, v);
  CHECK(j["edits"][1][1] == "<DEL>");
  auto back = instance_from_json(j, v);
  CHECK(back.initial == inst.initial);
  CHECK(back.edits == inst.edits);
  CHECK(back.conditioning == 1);
  CHECK(back.meta["task"] == "unit");

  std::stringstream ss;
  write_instances(ss, {inst, inst}, v);
  auto list = read_instances(ss, v);
  REQUIRE(list.size() == 2);
  CHECK(list[1].edits == inst.edits);
}

TEST_CASE("vocab file round trip") {
  const auto& v = letters10();
  const std::string path = "test_vocab_tmp.txt";
  write_vocab_file(path, v);
  auto v2 = read_vocab_file(path);
  CHECK(v2.size() == v.size());
  CHECK(v2.symbol_id("J") == v.symbol_id("J"));
  CHECK(v2.text(Vocab::kDelete) == "<DEL>");
  std::remove(path.c_str());
}
