#pragma once

#include "editseq/models/model.hpp"

namespace editseq::models {

// Hierarchical recurrent model over the explicit state grid: a first-level
// LSTM encodes every state row (with the previous row's token at the same
// position as a second input channel), a second-level LSTM consumes the
// per-row final hidden states, and edits are predicted with a pointer head
// over the current row plus a content head.
class ExplicitModel : public EditModel {
 public:
  ExplicitModel(const ModelConfig& config, std::uint64_t seed);
  Outputs forward(nn::Graph<float>& g, const PreparedInstance& instance) const override;
  Prediction predict_next(const PreparedInstance& prefix) const override;

 private:
  struct Ids;
  std::unique_ptr<Ids> ids_;
  Outputs build(nn::Graph<float>& g, const PreparedInstance& instance, bool extra_step) const;
};

// Sequence-to-sequence baseline on the implicit representation: LSTM encoder
// over the initial state, LSTM decoder over (position, content) pairs with
// learned position-id embeddings and a position-then-content factorization.
class ImplicitRnnModel : public EditModel {
 public:
  ImplicitRnnModel(const ModelConfig& config, std::uint64_t seed);
  Outputs forward(nn::Graph<float>& g, const PreparedInstance& instance) const override;
  Prediction predict_next(const PreparedInstance& prefix) const override;

 private:
  struct Ids;
  std::unique_ptr<Ids> ids_;
  Outputs build(nn::Graph<float>& g, const PreparedInstance& instance, bool extra_step) const;
};

// Attention model on the implicit representation: MHA encoder over initial
// tokens and edits, pointer decoder over encoder columns for positions, and
// a vanilla or analogical content decoder.
class ImplicitAttentionModel : public EditModel {
 public:
  ImplicitAttentionModel(const ModelConfig& config, std::uint64_t seed);
  Outputs forward(nn::Graph<float>& g, const PreparedInstance& instance) const override;
  Prediction predict_next(const PreparedInstance& prefix) const override;

 private:
  struct Ids;
  std::unique_ptr<Ids> ids_;
  Outputs build(nn::Graph<float>& g, const PreparedInstance& instance,
                std::optional<int> predict_position_override, bool extra_step) const;
};

}  // namespace editseq::models
