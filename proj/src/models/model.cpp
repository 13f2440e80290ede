#include "editseq/models/model.hpp"

#include "editseq/models/families.hpp"

namespace editseq::models {

std::string ModelConfig::family_name() const {
  switch (family) {
    case Family::Explicit:
      return "E";
    case Family::ImplicitRnn:
      return "IR";
    case Family::ImplicitAttention: {
      std::string name = "IA-";
      name += decoder == Decoder::Vanilla ? "v" : "a";
      if (aggregation == nn::Aggregation::Gru) name += "g";
      return name;
    }
  }
  return "?";
}

ModelConfig ModelConfig::for_family(const std::string& name) {
  ModelConfig cfg;
  if (name == "E") {
    cfg.family = Family::Explicit;
  } else if (name == "IR") {
    cfg.family = Family::ImplicitRnn;
  } else if (name == "IA-v" || name == "IA-vg" || name == "IA-a" || name == "IA-ag") {
    cfg.family = Family::ImplicitAttention;
    cfg.decoder = name[3] == 'v' ? Decoder::Vanilla : Decoder::Analogical;
    cfg.aggregation = name.back() == 'g' ? nn::Aggregation::Gru : nn::Aggregation::Sum;
  } else {
    throw std::invalid_argument("unknown model family: " + name);
  }
  return cfg;
}

nlohmann::json ModelConfig::to_json() const {
  return {{"family", family_name()},     {"hidden", hidden},
          {"blocks", blocks},            {"vocab_symbols", vocab_symbols},
          {"max_positions", max_positions}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig cfg = for_family(j.at("family").get<std::string>());
  cfg.hidden = j.at("hidden").get<int>();
  cfg.blocks = j.value("blocks", 1);
  cfg.vocab_symbols = j.at("vocab_symbols").get<int>();
  cfg.max_positions = j.at("max_positions").get<int>();
  return cfg;
}

PreparedInstance prepare_instance(const core::EditSequenceInstance& instance, const core::Vocab& vocab) {
  PreparedInstance out;
  out.initial_ids = instance.initial.tokens();
  out.conditioning = instance.conditioning;
  auto trace = core::implicit_to_explicit(instance);
  out.states.reserve(trace.states.size());
  for (const auto& s : trace.states) out.states.push_back(s.tokens());
  out.steps.reserve(instance.edits.size());
  for (std::size_t t = 0; t < instance.edits.size(); ++t) {
    PreparedInstance::Step step;
    step.implicit_position = instance.edits[t].position;
    step.explicit_position = trace.edits[t].position;
    step.landing_position = trace.edits[t].position + (trace.edits[t].is_delete() ? 0 : 1);
    step.content_id = instance.edits[t].content;
    step.content_class = vocab.content_class(instance.edits[t].content);
    out.steps.push_back(step);
  }
  return out;
}

PreparedInstance PreparedInstance::prefix(int edits) const {
  PreparedInstance out;
  out.initial_ids = initial_ids;
  out.conditioning = std::min(conditioning, edits);
  out.steps.assign(steps.begin(), steps.begin() + edits);
  out.states.assign(states.begin(), states.begin() + edits + 1);
  return out;
}

std::unique_ptr<EditModel> make_model(const ModelConfig& config, std::uint64_t seed) {
  switch (config.family) {
    case Family::Explicit:
      return std::make_unique<ExplicitModel>(config, seed);
    case Family::ImplicitRnn:
      return std::make_unique<ImplicitRnnModel>(config, seed);
    case Family::ImplicitAttention:
      return std::make_unique<ImplicitAttentionModel>(config, seed);
  }
  throw std::invalid_argument("bad family");
}

Eigen::VectorXf step_distribution(const nn::Graph<float>& g, const StepProbs& p) {
  const auto& m = p.from_aux ? g.aux(p.node)[0] : g.val(p.node);
  return m.col(p.col).head(p.valid);
}

int argmax_lowest(const Eigen::VectorXf& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = i;
  }
  return best;
}

void save_model(const std::string& path, const EditModel& model, const nlohmann::json& extra) {
  nlohmann::json desc = {{"kind", "editseq-model"}, {"config", model.config().to_json()}};
  if (!extra.is_null() && !extra.empty()) desc["meta"] = extra;
  nn::save_checkpoint(path, model.store(), desc);
}

LoadedModel load_model(const std::string& path) {
  auto ck = nn::load_checkpoint(path);
  LoadedModel out;
  out.descriptor = ck.descriptor;
  auto cfg = ModelConfig::from_json(ck.descriptor.at("config"));
  out.model = make_model(cfg, 0);
  // Replace freshly initialized parameters with the stored ones.
  auto& store = out.model->store();
  if (store.count() != ck.store.count()) throw std::runtime_error("checkpoint/model layout mismatch");
  for (int i = 0; i < store.count(); ++i) {
    if (store.entry(i).name != ck.store.entry(i).name) {
      throw std::runtime_error("checkpoint parameter order mismatch at " + store.entry(i).name);
    }
    store.entry(i) = ck.store.entry(i);
  }
  store.set_step(ck.store.step());
  return out;
}

}  // namespace editseq::models
