#include <algorithm>

#include "doctest.h"
#include "editseq/pomp/pomp.hpp"

using namespace editseq;
using namespace editseq::synth;
using namespace editseq::pomp;

namespace {

SyntheticDataset small_dataset(const std::string& name, int train, int test, std::uint64_t seed) {
  auto task = make_task(name, seed);
  task.train_size = train;
  task.dev_size = 1;
  task.test_size = test;
  return generate_dataset(task);
}

}  // namespace

TEST_CASE("empty training set scores exactly the uniform chance rate") {
  auto ds = small_dataset("ContextAppend11", 1, 50, 3);
  std::vector<core::EditSequenceInstance> empty;
  CHECK(pomp_expected_accuracy(empty, ds.test, 10) == doctest::Approx(1.0 / 11.0).epsilon(1e-12));
}

TEST_CASE("full window coverage scores exactly one") {
  // Append1 windows are the single character 'A'; any train instance covers
  // every test instance.
  auto ds = small_dataset("Append1", 5, 50, 4);
  CHECK(pomp_expected_accuracy(ds.train, ds.test, 10) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("accuracy is monotone in nested training sets and order invariant") {
  auto ds = small_dataset("ContextAppend52", 400, 120, 5);
  std::vector<core::EditSequenceInstance> t1(ds.train.begin(), ds.train.begin() + 50);
  std::vector<core::EditSequenceInstance> t2(ds.train.begin(), ds.train.begin() + 200);
  double a1 = pomp_expected_accuracy(t1, ds.test, 10);
  double a2 = pomp_expected_accuracy(t2, ds.test, 10);
  double a3 = pomp_expected_accuracy(ds.train, ds.test, 10);
  CHECK(a1 <= a2);
  CHECK(a2 <= a3);

  auto shuffled = ds.test;
  std::reverse(shuffled.begin(), shuffled.end());
  CHECK(pomp_expected_accuracy(ds.train, shuffled, 10) == doctest::Approx(a3).epsilon(1e-12));
}
