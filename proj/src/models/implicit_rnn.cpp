#include <cmath>

#include "editseq/models/families.hpp"
#include "editseq/nn/posenc.hpp"

namespace editseq::models {

using nn::Graph;
using nn::Var;

struct ImplicitRnnModel::Ids {
  int token_embed = -1;
  int pos_embed = -1;   // learned position-id embeddings, D x P
  int enc_wx = -1, enc_wh = -1, enc_b = -1;
  int dec_wx = -1, dec_wh = -1, dec_b = -1;
  int go = -1;          // learned first decoder input
  int w_pos_out = -1;   // P x D
  int w_content = -1;   // C x 2D
};

ImplicitRnnModel::ImplicitRnnModel(const ModelConfig& config, std::uint64_t seed)
    : EditModel(config, seed), ids_(std::make_unique<Ids>()) {
  const int d = cfg_.hidden;
  const int total_ids = core::Vocab::kReservedCount + cfg_.vocab_symbols;
  const int classes = cfg_.vocab_symbols + 1;
  const int p = cfg_.max_positions;
  if (p <= 0) throw std::invalid_argument("implicit RNN model needs max_positions > 0");
  ids_->token_embed = store_.add("ir.token_embed", d, total_ids, nn::Init::Normal05, rng_);
  ids_->pos_embed = store_.add("ir.pos_embed", d, p, nn::Init::Normal05, rng_);
  ids_->enc_wx = store_.add("ir.enc_wx", 4 * d, d, nn::Init::Glorot, rng_);
  ids_->enc_wh = store_.add("ir.enc_wh", 4 * d, d, nn::Init::Glorot, rng_);
  ids_->enc_b = store_.add("ir.enc_b", 4 * d, 1, nn::Init::Zero, rng_);
  ids_->dec_wx = store_.add("ir.dec_wx", 4 * d, 2 * d, nn::Init::Glorot, rng_);
  ids_->dec_wh = store_.add("ir.dec_wh", 4 * d, d, nn::Init::Glorot, rng_);
  ids_->dec_b = store_.add("ir.dec_b", 4 * d, 1, nn::Init::Zero, rng_);
  ids_->go = store_.add("ir.go", 2 * d, 1, nn::Init::Normal05, rng_);
  ids_->w_pos_out = store_.add("ir.w_pos_out", p, d, nn::Init::Glorot, rng_);
  ids_->w_content = store_.add("ir.w_content", classes, 2 * d, nn::Init::Glorot, rng_);
  // Standard unit forget-gate bias.
  store_.value(ids_->enc_b).col(0).segment(d, d).setOnes();
  store_.value(ids_->dec_b).col(0).segment(d, d).setOnes();
}

Outputs ImplicitRnnModel::forward(Graph<float>& g, const PreparedInstance& pi) const {
  return build(g, pi, false);
}

Outputs ImplicitRnnModel::build(Graph<float>& g, const PreparedInstance& pi, bool extra_step) const {
  const int d = cfg_.hidden;
  const int t = pi.edit_count();
  const int m = pi.initial_length();
  const int t_ext = t + (extra_step ? 1 : 0);
  if (m + t > cfg_.max_positions) throw std::invalid_argument("instance exceeds max_positions");

  Outputs out;
  Var embed = store_.leaf(g, ids_->token_embed);
  Var pos_embed = store_.leaf(g, ids_->pos_embed);

  // Encoder LSTM over the initial state.
  Var enc_in = g.gather_cols(embed, pi.initial_ids);
  Var h = g.constant(nn::Mat<float>::Zero(d, 1));
  Var c = g.constant(nn::Mat<float>::Zero(d, 1));
  for (int i = 0; i < m; ++i) {
    Var hc = g.lstm_step(g.col_range(enc_in, i, 1), h, c, store_.leaf(g, ids_->enc_wx),
                         store_.leaf(g, ids_->enc_wh), store_.leaf(g, ids_->enc_b));
    h = g.row_range(hc, 0, d);
    c = g.row_range(hc, d, d);
  }

  if (t_ext == 0) {
    out.loss = g.constant(nn::Mat<float>::Zero(1, 1));
    return out;
  }

  std::vector<int> positions, contents;
  for (const auto& s : pi.steps) {
    positions.push_back(s.implicit_position);
    contents.push_back(s.content_id);
  }

  Var content_embeds;
  if (t > 0) {
    content_embeds = g.gather_cols(embed, contents);
    out.edit_content_embeds = content_embeds;
  }

  // Decoder inputs: a learned GO vector, then concat(position embedding of
  // the previous edit, content embedding of the previous edit).
  std::vector<Var> inputs{store_.leaf(g, ids_->go)};
  if (t_ext > 1) {
    std::vector<int> prev_pos(positions.begin(), positions.begin() + (t_ext - 1));
    Var pos_in = g.gather_cols(pos_embed, prev_pos);
    Var content_in = g.col_range(content_embeds, 0, t_ext - 1);
    inputs.push_back(g.vstack(pos_in, content_in));
  }
  Var dec_in = inputs.size() == 1 ? inputs[0] : g.hstack(inputs);

  std::vector<std::pair<Var, int>> h_refs;
  for (int step = 0; step < t_ext; ++step) {
    Var hc = g.lstm_step(g.col_range(dec_in, step, 1), h, c, store_.leaf(g, ids_->dec_wx),
                         store_.leaf(g, ids_->dec_wh), store_.leaf(g, ids_->dec_b));
    h = g.row_range(hc, 0, d);
    c = g.row_range(hc, d, d);
    h_refs.emplace_back(h, 0);
  }
  Var h_dec = g.collect_cols(std::move(h_refs));  // D x t_ext

  Var pos_logits = g.matmul(store_.leaf(g, ids_->w_pos_out), h_dec);  // P x t_ext
  std::vector<int> pos_valid(static_cast<std::size_t>(t_ext));
  for (int j = 0; j < t_ext; ++j) pos_valid[static_cast<std::size_t>(j)] = m + j;

  Var pos_metric;
  int predicted_position = -1;
  if (extra_step) {
    pos_metric = g.masked_softmax(pos_logits, pos_valid);
    Eigen::VectorXf dist = g.val(pos_metric).col(t_ext - 1).head(pos_valid.back());
    predicted_position = argmax_lowest(dist);
  } else {
    pos_metric = g.softmax_xent(pos_logits, pos_valid, positions);
  }
  for (int j = 0; j < t_ext; ++j) {
    out.position.push_back(StepProbs{pos_metric, j, !extra_step, pos_valid[static_cast<std::size_t>(j)]});
  }

  // Content given position: the hidden state concatenated with the embedding
  // of the current edit's position (ground truth in teacher forcing, the
  // prediction when decoding).
  std::vector<int> current_pos = positions;
  if (extra_step) current_pos.push_back(predicted_position);
  Var h_tilde = g.vstack(h_dec, g.gather_cols(pos_embed, current_pos));
  Var content_logits = g.matmul(store_.leaf(g, ids_->w_content), h_tilde);

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

Prediction ImplicitRnnModel::predict_next(const PreparedInstance& prefix) const {
  Graph<float> g;
  Outputs out = build(g, prefix, true);
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
