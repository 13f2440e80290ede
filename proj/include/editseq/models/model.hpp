#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "editseq/core/edits.hpp"
#include "editseq/nn/checkpoint.hpp"
#include "editseq/nn/mha.hpp"

namespace editseq::models {

enum class Family { Explicit, ImplicitRnn, ImplicitAttention };
enum class Decoder { Vanilla, Analogical };

struct ModelConfig {
  Family family = Family::ImplicitAttention;
  int hidden = 128;
  Decoder decoder = Decoder::Analogical;      // IA only
  nn::Aggregation aggregation = nn::Aggregation::Gru;  // IA only
  int blocks = 1;                             // stacked MHA blocks per stage, IA only
  int vocab_symbols = 10;
  int max_positions = 0;  // implicit id space (initial tokens + edits), IR/IA

  // Canonical family name: E, IR, IA-v, IA-vg, IA-a, IA-ag.
  std::string family_name() const;
  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
  static ModelConfig for_family(const std::string& name);
};

// Instance unpacked into model-ready arrays. Explicit positions come from a
// single implicit_to_explicit conversion; landing_position is where the
// token produced by an insert actually sits in the post-edit state.
struct PreparedInstance {
  std::vector<int> initial_ids;  // token ids including START/END
  struct Step {
    int implicit_position = 0;
    int explicit_position = 0;
    int landing_position = 0;
    int content_id = 0;
    int content_class = 0;
  };
  std::vector<Step> steps;
  std::vector<std::vector<int>> states;  // token ids per timestep, 0..T
  int conditioning = 0;

  int initial_length() const { return static_cast<int>(initial_ids.size()); }
  int edit_count() const { return static_cast<int>(steps.size()); }
  // Prefix view for autoregressive decoding.
  PreparedInstance prefix(int edits) const;
};

PreparedInstance prepare_instance(const core::EditSequenceInstance& instance, const core::Vocab& vocab);

// Per-step probability column: probabilities live in column `col` of the
// node's value (or of its cached aux matrix), rows [0, valid).
struct StepProbs {
  nn::Var node;
  int col = 0;
  bool from_aux = false;
  int valid = 0;
};

struct Outputs {
  nn::Var loss;
  std::vector<StepProbs> position;
  std::vector<StepProbs> content;
  // Causality diagnostics: gradient probes attach here.
  nn::Var edit_content_embeds;     // D x T (IR and IA)
  std::vector<nn::Var> row_embeds; // per-position row-token gathers (E)
};

struct Prediction {
  int position = 0;        // family-specific indexing (explicit for E, implicit ids otherwise)
  int content_class = 0;
  double position_logprob = 0.0;
  double content_logprob = 0.0;
};

class EditModel {
 public:
  EditModel(const ModelConfig& config, std::uint64_t seed) : cfg_(config), rng_(seed) {}
  virtual ~EditModel() = default;

  const ModelConfig& config() const { return cfg_; }
  nn::ParamStore<float>& store() { return store_; }
  const nn::ParamStore<float>& store() const { return store_; }

  // Teacher-forced forward pass with loss over non-conditioning steps.
  virtual Outputs forward(nn::Graph<float>& g, const PreparedInstance& instance) const = 0;

  // Greedy next-edit prediction conditioned on a ground-truth prefix. The
  // content head conditions on the predicted position.
  virtual Prediction predict_next(const PreparedInstance& prefix) const = 0;

 protected:
  ModelConfig cfg_;
  nn::ParamStore<float> store_;
  Rng rng_;
};

std::unique_ptr<EditModel> make_model(const ModelConfig& config, std::uint64_t seed);

// Reads probabilities out of a finished graph.
Eigen::VectorXf step_distribution(const nn::Graph<float>& g, const StepProbs& p);
// Argmax with ties broken toward the lowest index.
int argmax_lowest(const Eigen::VectorXf& v);

// Model checkpoint = substrate container + config descriptor.
void save_model(const std::string& path, const EditModel& model, const nlohmann::json& extra = {});
struct LoadedModel {
  std::unique_ptr<EditModel> model;
  nlohmann::json descriptor;
};
LoadedModel load_model(const std::string& path);

}  // namespace editseq::models
