#pragma once

#include <optional>

#include "editseq/nn/params.hpp"
#include "editseq/nn/posenc.hpp"

namespace editseq::nn {

enum class Aggregation { Sum, Gru };
enum class MaskMode { None, Causal };

struct MhaConfig {
  int width = 128;
  int heads = 8;
  MaskMode mask = MaskMode::None;
  Aggregation aggregation = Aggregation::Sum;
};

// Parameter ids for one multi-head attention module: query/key/value/output
// projections plus the optional GRU aggregation cell.
struct MhaParams {
  int wq = -1;
  int wkv = -1;
  int wo = -1;
  int gru_wx = -1;
  int gru_wh = -1;
  int gru_b = -1;

  template <typename S>
  static MhaParams create(ParamStore<S>& store, const std::string& prefix, int width,
                          Aggregation aggregation, Rng& rng) {
    MhaParams p;
    p.wq = store.add(prefix + ".wq", width, width, Init::Glorot, rng);
    p.wkv = store.add(prefix + ".wkv", 2 * width, width, Init::Glorot, rng);
    p.wo = store.add(prefix + ".wo", width, width, Init::Glorot, rng);
    if (aggregation == Aggregation::Gru) {
      p.gru_wx = store.add(prefix + ".agg_wx", 3 * width, width, Init::Glorot, rng);
      p.gru_wh = store.add(prefix + ".agg_wh", 3 * width, width, Init::Glorot, rng);
      p.gru_b = store.add(prefix + ".agg_b", 3 * width, 1, Init::Zero, rng);
    }
    return p;
  }
};

// One MHA module application. The positional encoding is added to the query
// matrix; keys and values come from `kv` when given (cross form) or from the
// raw query input (self form). The attention result is aggregated with the
// encoded queries by sum or by a GRU update.
template <typename S>
Var mha_apply(Graph<S>& g, const ParamStore<S>& store, const MhaParams& p, const MhaConfig& cfg,
              Var q_input, std::optional<Var> kv = std::nullopt) {
  const int n = g.cols(q_input);
  Var q_enc = g.add(q_input, g.constant(sinusoidal_columns<S>(n, cfg.width)));
  Var kv_source = kv.value_or(q_input);

  Var q_proj = g.matmul(store.leaf(g, p.wq), q_enc);
  Var kv_proj = g.matmul(store.leaf(g, p.wkv), kv_source);
  Var k_proj = g.row_range(kv_proj, 0, cfg.width);
  Var v_proj = g.row_range(kv_proj, cfg.width, cfg.width);

  Var attended = g.attention(q_proj, k_proj, v_proj, cfg.heads, cfg.mask == MaskMode::Causal);
  Var result = g.matmul(store.leaf(g, p.wo), attended);

  if (cfg.aggregation == Aggregation::Sum) return g.add(q_enc, result);
  return g.gru_step(q_enc, result, store.leaf(g, p.gru_wx), store.leaf(g, p.gru_wh),
                    store.leaf(g, p.gru_b));
}

}  // namespace editseq::nn
