#include <algorithm>
#include <cmath>

#include "editseq/models/families.hpp"

namespace editseq::models {

using nn::Graph;
using nn::Var;

struct ExplicitModel::Ids {
  int token_embed = -1;
  int row_wx = -1, row_wh = -1, row_b = -1;    // first level, over tokens
  int time_wx = -1, time_wh = -1, time_b = -1; // second level, over rows
  int w_content = -1;                          // C x D
};

ExplicitModel::ExplicitModel(const ModelConfig& config, std::uint64_t seed)
    : EditModel(config, seed), ids_(std::make_unique<Ids>()) {
  const int d = cfg_.hidden;
  const int total_ids = core::Vocab::kReservedCount + cfg_.vocab_symbols;
  const int classes = cfg_.vocab_symbols + 1;
  ids_->token_embed = store_.add("e.token_embed", d, total_ids, nn::Init::Normal05, rng_);
  ids_->row_wx = store_.add("e.row_wx", 4 * d, 2 * d, nn::Init::Glorot, rng_);
  ids_->row_wh = store_.add("e.row_wh", 4 * d, d, nn::Init::Glorot, rng_);
  ids_->row_b = store_.add("e.row_b", 4 * d, 1, nn::Init::Zero, rng_);
  ids_->time_wx = store_.add("e.time_wx", 4 * d, d, nn::Init::Glorot, rng_);
  ids_->time_wh = store_.add("e.time_wh", 4 * d, d, nn::Init::Glorot, rng_);
  ids_->time_b = store_.add("e.time_b", 4 * d, 1, nn::Init::Zero, rng_);
  ids_->w_content = store_.add("e.w_content", classes, d, nn::Init::Glorot, rng_);
  store_.value(ids_->row_b).col(0).segment(d, d).setOnes();
  store_.value(ids_->time_b).col(0).segment(d, d).setOnes();
}

Outputs ExplicitModel::forward(Graph<float>& g, const PreparedInstance& pi) const {
  return build(g, pi, false);
}

Outputs ExplicitModel::build(Graph<float>& g, const PreparedInstance& pi, bool extra_step) const {
  const int d = cfg_.hidden;
  const int t = pi.edit_count();
  const int rows = t + (extra_step ? 1 : 0);  // states consumed as input rows

  Outputs out;
  if (rows == 0) {
    out.loss = g.constant(nn::Mat<float>::Zero(1, 1));
    return out;
  }

  Var embed = store_.leaf(g, ids_->token_embed);
  std::vector<int> row_len(static_cast<std::size_t>(rows));
  int maxlen = 0;
  for (int r = 0; r < rows; ++r) {
    row_len[static_cast<std::size_t>(r)] = static_cast<int>(pi.states[static_cast<std::size_t>(r)].size());
    maxlen = std::max(maxlen, row_len[static_cast<std::size_t>(r)]);
  }

  // First level: one LSTM over token positions, all rows batched as columns.
  // Each input concatenates the current token with the token at the same
  // position in the previous row (PAD when absent).
  Var h = g.constant(nn::Mat<float>::Zero(d, rows));
  Var c = g.constant(nn::Mat<float>::Zero(d, rows));
  std::vector<Var> row_hidden;  // h after consuming position m, D x rows
  row_hidden.reserve(static_cast<std::size_t>(maxlen));
  out.row_embeds.reserve(static_cast<std::size_t>(maxlen));
  for (int mpos = 0; mpos < maxlen; ++mpos) {
    std::vector<int> cur(static_cast<std::size_t>(rows), core::Vocab::kPad);
    std::vector<int> prev(static_cast<std::size_t>(rows), core::Vocab::kPad);
    for (int r = 0; r < rows; ++r) {
      if (mpos < row_len[static_cast<std::size_t>(r)]) {
        cur[static_cast<std::size_t>(r)] = pi.states[static_cast<std::size_t>(r)][static_cast<std::size_t>(mpos)];
      }
      if (r >= 1 && mpos < row_len[static_cast<std::size_t>(r - 1)]) {
        prev[static_cast<std::size_t>(r)] =
            pi.states[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(mpos)];
      }
    }
    Var cur_embed = g.gather_cols(embed, cur);
    out.row_embeds.push_back(cur_embed);
    Var x = g.vstack(cur_embed, g.gather_cols(embed, prev));
    Var hc = g.lstm_step(x, h, c, store_.leaf(g, ids_->row_wx), store_.leaf(g, ids_->row_wh),
                         store_.leaf(g, ids_->row_b));
    h = g.row_range(hc, 0, d);
    c = g.row_range(hc, d, d);
    row_hidden.push_back(h);
  }

  // Second level consumes each row's final hidden state.
  std::vector<std::pair<Var, int>> last_refs;
  for (int r = 0; r < rows; ++r) {
    last_refs.emplace_back(row_hidden[static_cast<std::size_t>(row_len[static_cast<std::size_t>(r)] - 1)], r);
  }
  Var row_summary = g.collect_cols(std::move(last_refs));  // D x rows

  Var h2 = g.constant(nn::Mat<float>::Zero(d, 1));
  Var c2 = g.constant(nn::Mat<float>::Zero(d, 1));
  std::vector<std::pair<Var, int>> o_refs;
  std::vector<Var> pointer_rows;  // per-step 1 x 1 losses (teacher mode)
  for (int step = 0; step < rows; ++step) {
    Var hc2 = g.lstm_step(g.col_range(row_summary, step, 1), h2, c2, store_.leaf(g, ids_->time_wx),
                          store_.leaf(g, ids_->time_wh), store_.leaf(g, ids_->time_b));
    h2 = g.row_range(hc2, 0, d);
    c2 = g.row_range(hc2, d, d);
    o_refs.emplace_back(h2, 0);

    // Pointer over the tokens of this step's row.
    const int len = row_len[static_cast<std::size_t>(step)];
    std::vector<std::pair<Var, int>> key_refs;
    key_refs.reserve(static_cast<std::size_t>(len));
    for (int mpos = 0; mpos < len; ++mpos) {
      key_refs.emplace_back(row_hidden[static_cast<std::size_t>(mpos)], step);
    }
    Var keys = g.collect_cols(std::move(key_refs));    // D x len
    Var logits = g.matmul_tn(keys, h2);                // len x 1
    if (extra_step) {
      Var probs = g.masked_softmax(logits, {len});
      out.position.push_back(StepProbs{probs, 0, false, len});
    } else {
      Var loss_row = g.softmax_xent(logits, {len}, {pi.steps[static_cast<std::size_t>(step)].explicit_position});
      out.position.push_back(StepProbs{loss_row, 0, true, len});
      pointer_rows.push_back(loss_row);
    }
  }

  // Content head on the second-level outputs, all steps at once.
  Var outputs2 = g.collect_cols(std::move(o_refs));  // D x rows
  Var content_logits = g.matmul(store_.leaf(g, ids_->w_content), outputs2);
  const int classes = cfg_.vocab_symbols + 1;
  std::vector<int> content_valid(static_cast<std::size_t>(rows), classes);
  Var content_metric;
  if (extra_step) {
    content_metric = g.masked_softmax(content_logits, content_valid);
  } else {
    std::vector<int> content_targets;
    for (const auto& s : pi.steps) content_targets.push_back(s.content_class);
    content_metric = g.softmax_xent(content_logits, content_valid, content_targets);
  }
  for (int j = 0; j < rows; ++j) {
    out.content.push_back(StepProbs{content_metric, j, !extra_step, classes});
  }

  if (!extra_step) {
    Var pos_row = g.hstack(pointer_rows);  // 1 x rows
    std::vector<std::uint8_t> keep(static_cast<std::size_t>(t), 0);
    for (int j = pi.conditioning; j < t; ++j) keep[static_cast<std::size_t>(j)] = 1;
    out.loss = g.mean_where(g.add(pos_row, content_metric), std::move(keep));
  }
  return out;
}

Prediction ExplicitModel::predict_next(const PreparedInstance& prefix) const {
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
