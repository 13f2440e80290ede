#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "editseq/nn/graph.hpp"
#include "editseq/rng.hpp"

namespace editseq::nn {

enum class Init { Zero, Glorot, Normal05, Ones };

// Named trainable arrays plus their Adam moments. Each array has exactly one
// owner name; ids are dense and stable, so gradients are tracked in a plain
// vector alongside.
template <typename S>
class ParamStore {
 public:
  struct Entry {
    std::string name;
    Mat<S> value;
    Mat<S> m;
    Mat<S> v;
  };

  int add(const std::string& name, int rows, int cols, Init init, Rng& rng) {
    for (const auto& e : entries_) {
      if (e.name == name) throw std::invalid_argument("duplicate parameter name: " + name);
    }
    Entry e;
    e.name = name;
    e.value = Mat<S>::Zero(rows, cols);
    switch (init) {
      case Init::Zero:
        break;
      case Init::Ones:
        e.value.setOnes();
        break;
      case Init::Glorot: {
        const double limit = std::sqrt(6.0 / (rows + cols));
        for (int c = 0; c < cols; ++c) {
          for (int r = 0; r < rows; ++r) {
            e.value(r, c) = static_cast<S>((rng.next_double() * 2.0 - 1.0) * limit);
          }
        }
        break;
      }
      case Init::Normal05:
        for (int c = 0; c < cols; ++c) {
          for (int r = 0; r < rows; ++r) e.value(r, c) = static_cast<S>(rng.next_gaussian() * 0.05);
        }
        break;
    }
    e.m = Mat<S>::Zero(rows, cols);
    e.v = Mat<S>::Zero(rows, cols);
    entries_.push_back(std::move(e));
    return static_cast<int>(entries_.size()) - 1;
  }

  int count() const { return static_cast<int>(entries_.size()); }
  Entry& entry(int id) { return entries_.at(static_cast<std::size_t>(id)); }
  const Entry& entry(int id) const { return entries_.at(static_cast<std::size_t>(id)); }
  const Mat<S>& value(int id) const { return entry(id).value; }
  Mat<S>& value(int id) { return entry(id).value; }

  int find(const std::string& name) const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (entries_[i].name == name) return static_cast<int>(i);
    }
    throw std::out_of_range("no such parameter: " + name);
  }

  std::int64_t step() const { return step_; }
  void set_step(std::int64_t s) { step_ = s; }

  std::int64_t scalar_count() const {
    std::int64_t total = 0;
    for (const auto& e : entries_) total += e.value.size();
    return total;
  }

  std::vector<Mat<S>> snapshot_values() const {
    std::vector<Mat<S>> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.value);
    return out;
  }

  void restore_values(const std::vector<Mat<S>>& values) {
    if (values.size() != entries_.size()) throw std::invalid_argument("snapshot size mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) entries_[i].value = values[i];
  }

  // Registers this store's array as a leaf of `g`.
  Var leaf(Graph<S>& g, int id) const { return g.param(id, &entries_.at(static_cast<std::size_t>(id)).value); }

 private:
  std::vector<Entry> entries_;
  std::int64_t step_ = 0;
};

// Per-worker gradient accumulator aligned with a ParamStore.
template <typename S>
class GradSink {
 public:
  explicit GradSink(const ParamStore<S>& store) {
    grads_.reserve(static_cast<std::size_t>(store.count()));
    for (int i = 0; i < store.count(); ++i) {
      grads_.push_back(Mat<S>::Zero(store.value(i).rows(), store.value(i).cols()));
    }
  }

  void accumulate(int id, const Mat<S>& g) { grads_[static_cast<std::size_t>(id)] += g; }

  void add(const GradSink& other) {
    for (std::size_t i = 0; i < grads_.size(); ++i) grads_[i] += other.grads_[i];
  }

  void scale(S factor) {
    for (auto& g : grads_) g *= factor;
  }

  void clear() {
    for (auto& g : grads_) g.setZero();
  }

  double global_norm() const {
    double sq = 0.0;
    for (const auto& g : grads_) sq += static_cast<double>(g.template cast<double>().squaredNorm());
    return std::sqrt(sq);
  }

  bool all_finite() const {
    for (const auto& g : grads_) {
      if (!g.allFinite()) return false;
    }
    return true;
  }

  Mat<S>& grad(int id) { return grads_.at(static_cast<std::size_t>(id)); }
  const Mat<S>& grad(int id) const { return grads_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return grads_.size(); }

 private:
  std::vector<Mat<S>> grads_;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 1.0;  // global-norm clip applied before the update
};

struct DivergedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Global-norm clipping followed by one bias-corrected Adam step.
template <typename S>
void adam_update(ParamStore<S>& store, GradSink<S>& grads, const AdamConfig& cfg) {
  if (!grads.all_finite()) throw DivergedError("non-finite gradients in optimizer step");
  const double norm = grads.global_norm();
  if (cfg.clip_norm > 0 && norm > cfg.clip_norm) {
    grads.scale(static_cast<S>(cfg.clip_norm / norm));
  }
  store.set_step(store.step() + 1);
  const double t = static_cast<double>(store.step());
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);
  for (int i = 0; i < store.count(); ++i) {
    auto& e = store.entry(i);
    const auto& g = grads.grad(i);
    e.m = static_cast<S>(cfg.beta1) * e.m + static_cast<S>(1.0 - cfg.beta1) * g;
    e.v = (static_cast<S>(cfg.beta2) * e.v.array() +
           static_cast<S>(1.0 - cfg.beta2) * g.array().square())
              .matrix();
    e.value.array() -= static_cast<S>(cfg.lr) * (e.m.array() / static_cast<S>(bc1)) /
                       ((e.v.array() / static_cast<S>(bc2)).sqrt() + static_cast<S>(cfg.epsilon));
  }
}

}  // namespace editseq::nn
