#include <cmath>

#include "editseq/models/families.hpp"
#include "editseq/nn/mha.hpp"
#include "editseq/nn/posenc.hpp"

namespace editseq::models {

using nn::Graph;
using nn::MhaConfig;
using nn::MhaParams;
using nn::Var;

struct ImplicitAttentionModel::Ids {
  int token_embed = -1;
  int is_edit = -1;
  std::vector<MhaParams> s2s;
  std::vector<MhaParams> e2e;
  MhaParams s2e;
  std::vector<MhaParams> pos_head;
  std::vector<MhaParams> content_head;
  int w_content = -1;
  int b_content = -1;
};

ImplicitAttentionModel::ImplicitAttentionModel(const ModelConfig& config, std::uint64_t seed)
    : EditModel(config, seed), ids_(std::make_unique<Ids>()) {
  const int d = cfg_.hidden;
  const int total_ids = core::Vocab::kReservedCount + cfg_.vocab_symbols;
  const int classes = cfg_.vocab_symbols + 1;
  ids_->token_embed = store_.add("ia.token_embed", d, total_ids, nn::Init::Normal05, rng_);
  ids_->is_edit = store_.add("ia.is_edit", d, 1, nn::Init::Normal05, rng_);
  for (int b = 0; b < cfg_.blocks; ++b) {
    ids_->s2s.push_back(MhaParams::create(store_, "ia.s2s." + std::to_string(b), d, cfg_.aggregation, rng_));
  }
  for (int b = 0; b < cfg_.blocks; ++b) {
    ids_->e2e.push_back(MhaParams::create(store_, "ia.e2e." + std::to_string(b), d, cfg_.aggregation, rng_));
  }
  ids_->s2e = MhaParams::create(store_, "ia.s2e", d, cfg_.aggregation, rng_);
  for (int b = 0; b < cfg_.blocks; ++b) {
    ids_->pos_head.push_back(
        MhaParams::create(store_, "ia.pos." + std::to_string(b), d, cfg_.aggregation, rng_));
  }
  for (int b = 0; b < cfg_.blocks; ++b) {
    ids_->content_head.push_back(
        MhaParams::create(store_, "ia.content." + std::to_string(b), d, cfg_.aggregation, rng_));
  }
  ids_->w_content = store_.add("ia.w_content", classes, d, nn::Init::Glorot, rng_);
  ids_->b_content = store_.add("ia.b_content", classes, 1, nn::Init::Zero, rng_);
}

Outputs ImplicitAttentionModel::forward(Graph<float>& g, const PreparedInstance& pi) const {
  return build(g, pi, std::nullopt, false);
}

Outputs ImplicitAttentionModel::build(Graph<float>& g, const PreparedInstance& pi,
                                      std::optional<int> predict_position_override,
                                      bool extra_step) const {
  const int d = cfg_.hidden;
  const int t = pi.edit_count();
  const int m = pi.initial_length();
  const int t_ext = t + (extra_step ? 1 : 0);
  const MhaConfig self_cfg{d, 8, nn::MaskMode::None, cfg_.aggregation};
  const MhaConfig causal_cfg{d, 8, nn::MaskMode::Causal, cfg_.aggregation};
  auto apply_blocks = [&](const std::vector<MhaParams>& blocks, const MhaConfig& cfg, Var x) {
    for (const auto& p : blocks) x = nn::mha_apply(g, store_, p, cfg, x);
    return x;
  };

  Outputs out;
  Var embed = store_.leaf(g, ids_->token_embed);

  // Encoder: self-attention over initial tokens, causal self-attention over
  // edit embeddings, then cross-attention from state columns into edits.
  Var state_h = g.gather_cols(embed, pi.initial_ids);
  state_h = apply_blocks(ids_->s2s, self_cfg, state_h);

  std::vector<int> positions, contents, landings;
  for (const auto& s : pi.steps) {
    positions.push_back(s.implicit_position);
    contents.push_back(s.content_id);
    landings.push_back(s.landing_position);
  }

  Var columns = state_h;
  if (t > 0) {
    // Edit embedding: content + sinusoid of the explicit landing position +
    // a shared is-edit marker.
    Var content_embeds = g.gather_cols(embed, contents);
    out.edit_content_embeds = content_embeds;
    Var edit_h = g.add_bias(
        g.add(content_embeds, g.constant(nn::sinusoidal_for_indices<float>(landings, d))),
        store_.leaf(g, ids_->is_edit));
    edit_h = apply_blocks(ids_->e2e, causal_cfg, edit_h);
    edit_h = nn::mha_apply(g, store_, ids_->s2e, self_cfg, edit_h, state_h);
    columns = g.hstack({state_h, edit_h});
  }

  if (t_ext == 0) {
    out.loss = g.constant(nn::Mat<float>::Zero(1, 1));
    return out;
  }

  // Contexts of the chosen positions, shifted forward in time for the
  // position head. In prediction mode the shifted sequence gains a column
  // ending with the context of the last given edit.
  Var u;
  if (t > 0) u = g.gather_cols(columns, positions);
  Var timing = g.constant(nn::sinusoidal_columns<float>(t_ext, d));
  Var zero_col = g.constant(nn::Mat<float>::Zero(d, 1));
  Var prev_u_raw = extra_step ? (t > 0 ? g.hstack({zero_col, u}) : zero_col) : g.shift_cols(u);
  Var prev_u = g.add(prev_u_raw, timing);

  Var u_pred = apply_blocks(ids_->pos_head, causal_cfg, prev_u);
  Var pos_logits = g.matmul_tn(columns, u_pred);  // (M+T) x t_ext

  std::vector<int> pos_valid(static_cast<std::size_t>(t_ext));
  for (int j = 0; j < t_ext; ++j) pos_valid[static_cast<std::size_t>(j)] = m + j;

  Var pos_metric;
  int predicted_position = -1;
  if (extra_step) {
    pos_metric = g.masked_softmax(pos_logits, pos_valid);
    Eigen::VectorXf dist = g.val(pos_metric).col(t_ext - 1).head(pos_valid.back());
    predicted_position = predict_position_override.value_or(argmax_lowest(dist));
  } else {
    pos_metric = g.softmax_xent(pos_logits, pos_valid, positions);
  }
  for (int j = 0; j < t_ext; ++j) {
    out.position.push_back(StepProbs{pos_metric, j, !extra_step, pos_valid[static_cast<std::size_t>(j)]});
  }

  // Content head: previous contents plus current contexts (ground truth when
  // teacher forcing, the predicted position when decoding).
  Var v;
  if (t > 0) v = g.gather_cols(embed, contents);
  Var v_bar_raw = extra_step ? (t > 0 ? g.hstack({zero_col, v}) : zero_col) : g.shift_cols(v);
  Var v_bar = g.add(v_bar_raw, timing);

  Var u_current;
  if (extra_step) {
    auto gathered = positions;
    gathered.push_back(predicted_position);
    u_current = g.gather_cols(columns, gathered);
  } else {
    u_current = u;
  }

  Var decoded;
  if (cfg_.decoder == Decoder::Vanilla) {
    decoded = apply_blocks(ids_->content_head, causal_cfg, g.add(u_current, v_bar));
  } else {
    Var analogies = apply_blocks(ids_->content_head, causal_cfg, g.sub(v_bar, prev_u));
    decoded = g.add(analogies, u_current);
  }
  Var content_logits =
      g.add_bias(g.matmul(store_.leaf(g, ids_->w_content), decoded), store_.leaf(g, ids_->b_content));

  const int classes = cfg_.vocab_symbols + 1;
  std::vector<int> content_valid(static_cast<std::size_t>(t_ext), classes);
  Var content_metric;
  if (extra_step) {
    content_metric = g.masked_softmax(content_logits, content_valid);
  } else {
    std::vector<int> content_targets;
    for (const auto& s : pi.steps) content_targets.push_back(s.content_class);
    content_metric = g.softmax_xent(content_logits, content_valid, content_targets);
  }
  for (int j = 0; j < t_ext; ++j) {
    out.content.push_back(StepProbs{content_metric, j, !extra_step, classes});
  }

  if (!extra_step) {
    std::vector<std::uint8_t> keep(static_cast<std::size_t>(t), 0);
    for (int j = pi.conditioning; j < t; ++j) keep[static_cast<std::size_t>(j)] = 1;
    out.loss = g.mean_where(g.add(pos_metric, content_metric), std::move(keep));
  }
  return out;
}

Prediction ImplicitAttentionModel::predict_next(const PreparedInstance& prefix) const {
  Graph<float> g;
  Outputs out = build(g, prefix, std::nullopt, true);
  const int last = prefix.edit_count();

  Prediction pred;
  Eigen::VectorXf pos_dist = step_distribution(g, out.position[static_cast<std::size_t>(last)]);
  pred.position = argmax_lowest(pos_dist);
  pred.position_logprob = std::log(std::max(1e-30f, pos_dist(pred.position)));
  Eigen::VectorXf content_dist = step_distribution(g, out.content[static_cast<std::size_t>(last)]);
  pred.content_class = argmax_lowest(content_dist);
  pred.content_logprob = std::log(std::max(1e-30f, content_dist(pred.content_class)));
  return pred;
}

}  // namespace editseq::models
