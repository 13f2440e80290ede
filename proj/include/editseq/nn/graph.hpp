#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace editseq::nn {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Reverse-mode tape over dense matrices. Forward values are computed eagerly
// as nodes are added, so intermediate values can be inspected while a graph
// is being built (greedy decoding relies on this). backward() runs the tape
// in reverse and accumulates into parameter gradients, which are harvested
// per graph via param_grads().
template <typename S>
class Graph {
 public:
  using M = Mat<S>;

  Graph() { nodes_.reserve(1024); }

  // ---- leaves ----

  Var constant(M value) { return push(std::move(value), false); }

  // Leaf that views external storage (no copy). The pointee must outlive the
  // graph.
  Var view(const M* value, bool needs_grad = false, int param_id = -1) {
    Node n;
    n.view = value;
    n.needs_grad = needs_grad;
    n.param_id = param_id;
    nodes_.push_back(std::move(n));
    return Var{static_cast<int>(nodes_.size()) - 1};
  }

  Var param(int param_id, const M* value) { return view(value, true, param_id); }

  const M& val(Var v) const {
    const Node& n = node(v);
    return n.view ? *n.view : n.own;
  }

  M& grad(Var v) { return ensure_grad(v.id); }
  bool has_grad(Var v) const { return node(v).grad_ready; }
  const std::vector<M>& aux(Var v) const { return node(v).aux; }

  int rows(Var v) const { return static_cast<int>(val(v).rows()); }
  int cols(Var v) const { return static_cast<int>(val(v).cols()); }

  // ---- arithmetic ----

  Var matmul(Var a, Var b) {
    Var out = push(val(a) * val(b), needs(a) || needs(b));
    set_back(out, [this, a, b, out] {
      const M& g = node(out).grad;
      if (needs(a)) ensure_grad(a.id).noalias() += g * val(b).transpose();
      if (needs(b)) ensure_grad(b.id).noalias() += val(a).transpose() * g;
    });
    return out;
  }

  // a' * b, used for pointer logits (keys' x queries).
  Var matmul_tn(Var a, Var b) {
    Var out = push(val(a).transpose() * val(b), needs(a) || needs(b));
    set_back(out, [this, a, b, out] {
      const M& g = node(out).grad;
      if (needs(a)) ensure_grad(a.id).noalias() += val(b) * g.transpose();
      if (needs(b)) ensure_grad(b.id).noalias() += val(a) * g;
    });
    return out;
  }

  Var add(Var a, Var b) {
    Var out = push(val(a) + val(b), needs(a) || needs(b));
    set_back(out, [this, a, b, out] {
      const M& g = node(out).grad;
      if (needs(a)) ensure_grad(a.id) += g;
      if (needs(b)) ensure_grad(b.id) += g;
    });
    return out;
  }

  Var sub(Var a, Var b) {
    Var out = push(val(a) - val(b), needs(a) || needs(b));
    set_back(out, [this, a, b, out] {
      const M& g = node(out).grad;
      if (needs(a)) ensure_grad(a.id) += g;
      if (needs(b)) ensure_grad(b.id) -= g;
    });
    return out;
  }

  Var hadamard(Var a, Var b) {
    Var out = push(val(a).cwiseProduct(val(b)), needs(a) || needs(b));
    set_back(out, [this, a, b, out] {
      const M& g = node(out).grad;
      if (needs(a)) ensure_grad(a.id) += g.cwiseProduct(val(b));
      if (needs(b)) ensure_grad(b.id) += g.cwiseProduct(val(a));
    });
    return out;
  }

  Var scale(Var a, S factor) {
    Var out = push(val(a) * factor, needs(a));
    set_back(out, [this, a, out, factor] {
      if (needs(a)) ensure_grad(a.id) += node(out).grad * factor;
    });
    return out;
  }

  // bias is D x 1, broadcast over columns.
  Var add_bias(Var a, Var bias) {
    M v = val(a);
    v.colwise() += Vec<S>(val(bias).col(0));
    Var out = push(std::move(v), needs(a) || needs(bias));
    set_back(out, [this, a, bias, out] {
      const M& g = node(out).grad;
      if (needs(a)) ensure_grad(a.id) += g;
      if (needs(bias)) ensure_grad(bias.id).col(0) += g.rowwise().sum();
    });
    return out;
  }

  Var tanh_op(Var a) {
    Var out = push(val(a).array().tanh().matrix(), needs(a));
    set_back(out, [this, a, out] {
      if (!needs(a)) return;
      const M& y = val(out);
      ensure_grad(a.id).array() += node(out).grad.array() * (S(1) - y.array().square());
    });
    return out;
  }

  Var sigmoid_op(Var a) {
    M y = ((val(a).array() * S(-1)).exp() + S(1)).inverse().matrix();
    Var out = push(std::move(y), needs(a));
    set_back(out, [this, a, out] {
      if (!needs(a)) return;
      const M& y2 = val(out);
      ensure_grad(a.id).array() += node(out).grad.array() * y2.array() * (S(1) - y2.array());
    });
    return out;
  }

  // ---- shape ops ----

  Var vstack(Var a, Var b) {
    M v(val(a).rows() + val(b).rows(), val(a).cols());
    v << val(a), val(b);
    Var out = push(std::move(v), needs(a) || needs(b));
    set_back(out, [this, a, b, out] {
      const M& g = node(out).grad;
      const int ra = static_cast<int>(val(a).rows());
      if (needs(a)) ensure_grad(a.id) += g.topRows(ra);
      if (needs(b)) ensure_grad(b.id) += g.bottomRows(g.rows() - ra);
    });
    return out;
  }

  Var hstack(const std::vector<Var>& parts) {
    if (parts.empty()) throw std::invalid_argument("hstack of nothing");
    int total = 0;
    bool ng = false;
    for (Var p : parts) {
      total += cols(p);
      ng = ng || needs(p);
    }
    M v(val(parts[0]).rows(), total);
    int c = 0;
    for (Var p : parts) {
      v.middleCols(c, cols(p)) = val(p);
      c += cols(p);
    }
    Var out = push(std::move(v), ng);
    set_back(out, [this, parts, out] {
      const M& g = node(out).grad;
      int c2 = 0;
      for (Var p : parts) {
        const int w = cols(p);
        if (needs(p)) ensure_grad(p.id) += g.middleCols(c2, w);
        c2 += w;
      }
    });
    return out;
  }

  Var row_range(Var a, int r0, int n) {
    Var out = push(val(a).middleRows(r0, n), needs(a));
    set_back(out, [this, a, out, r0, n] {
      if (needs(a)) ensure_grad(a.id).middleRows(r0, n) += node(out).grad;
    });
    return out;
  }

  Var col_range(Var a, int c0, int n) {
    Var out = push(val(a).middleCols(c0, n), needs(a));
    set_back(out, [this, a, out, c0, n] {
      if (needs(a)) ensure_grad(a.id).middleCols(c0, n) += node(out).grad;
    });
    return out;
  }

  // Column gather with repeat-aware scatter-add backward. Used both for
  // embedding lookup (src = embedding table) and context gathering.
  Var gather_cols(Var src, std::vector<int> idx) {
    M v(val(src).rows(), static_cast<int>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) v.col(static_cast<int>(j)) = val(src).col(idx[j]);
    Var out = push(std::move(v), needs(src));
    set_back(out, [this, src, out, idx = std::move(idx)] {
      if (!needs(src)) return;
      const M& g = node(out).grad;
      M& gs = ensure_grad(src.id);
      for (std::size_t j = 0; j < idx.size(); ++j) gs.col(idx[j]) += g.col(static_cast<int>(j));
    });
    return out;
  }

  // One column from each (var, column) pair; the pairs may reference
  // different nodes (e.g. per-timestep hidden states).
  Var collect_cols(std::vector<std::pair<Var, int>> refs) {
    if (refs.empty()) throw std::invalid_argument("collect_cols of nothing");
    M v(val(refs[0].first).rows(), static_cast<int>(refs.size()));
    bool ng = false;
    for (std::size_t j = 0; j < refs.size(); ++j) {
      v.col(static_cast<int>(j)) = val(refs[j].first).col(refs[j].second);
      ng = ng || needs(refs[j].first);
    }
    Var out = push(std::move(v), ng);
    set_back(out, [this, out, refs = std::move(refs)] {
      const M& g = node(out).grad;
      for (std::size_t j = 0; j < refs.size(); ++j) {
        if (needs(refs[j].first)) {
          ensure_grad(refs[j].first.id).col(refs[j].second) += g.col(static_cast<int>(j));
        }
      }
    });
    return out;
  }

  // Shift columns one step forward in time: out[:,0] = 0, out[:,t] = a[:,t-1].
  Var shift_cols(Var a) {
    M v = M::Zero(val(a).rows(), val(a).cols());
    if (val(a).cols() > 1) v.rightCols(val(a).cols() - 1) = val(a).leftCols(val(a).cols() - 1);
    Var out = push(std::move(v), needs(a));
    set_back(out, [this, a, out] {
      if (!needs(a)) return;
      const M& g = node(out).grad;
      if (g.cols() > 1) ensure_grad(a.id).leftCols(g.cols() - 1) += g.rightCols(g.cols() - 1);
    });
    return out;
  }

  // ---- recurrent cells ----

  // LSTM step, column-batched. Inputs x: Din x N, h/c: D x N. Gate order in
  // wx/wh/b is [input, forget, output, candidate]. Returns [h'; c'] (2D x N).
  Var lstm_step(Var x, Var h, Var c, Var wx, Var wh, Var b) {
    const int d = static_cast<int>(val(h).rows());
    const int n = static_cast<int>(val(h).cols());
    M pre = val(wx) * val(x) + val(wh) * val(h);
    pre.colwise() += Vec<S>(val(b).col(0));
    M gi = sigmoid_of(pre.topRows(d));
    M gf = sigmoid_of(pre.middleRows(d, d));
    M go = sigmoid_of(pre.middleRows(2 * d, d));
    M gc = pre.bottomRows(d).array().tanh().matrix();
    M c_new = gf.cwiseProduct(val(c)) + gi.cwiseProduct(gc);
    M tanh_c = c_new.array().tanh().matrix();
    M out(2 * d, n);
    out.topRows(d) = go.cwiseProduct(tanh_c);
    out.bottomRows(d) = c_new;
    bool ng = needs(x) || needs(h) || needs(c) || needs(wx) || needs(wh) || needs(b);
    Var ov = push(std::move(out), ng);
    Node& nd = node(ov);
    nd.aux = {std::move(gi), std::move(gf), std::move(go), std::move(gc), std::move(tanh_c)};
    set_back(ov, [this, x, h, c, wx, wh, b, ov, d] {
      const M& g = node(ov).grad;
      const auto& a = node(ov).aux;
      const M &gi2 = a[0], &gf2 = a[1], &go2 = a[2], &gc2 = a[3], &tc = a[4];
      M dh = g.topRows(d);
      M dc = g.bottomRows(d);
      dc.array() += dh.array() * go2.array() * (S(1) - tc.array().square());
      M dpre(4 * d, g.cols());
      dpre.topRows(d) = (dc.cwiseProduct(gc2).array() * gi2.array() * (S(1) - gi2.array())).matrix();
      dpre.middleRows(d, d) =
          (dc.cwiseProduct(val(c)).array() * gf2.array() * (S(1) - gf2.array())).matrix();
      dpre.middleRows(2 * d, d) = (dh.cwiseProduct(tc).array() * go2.array() * (S(1) - go2.array())).matrix();
      dpre.bottomRows(d) = (dc.cwiseProduct(gi2).array() * (S(1) - gc2.array().square())).matrix();
      if (needs(x)) ensure_grad(x.id).noalias() += val(wx).transpose() * dpre;
      if (needs(h)) ensure_grad(h.id).noalias() += val(wh).transpose() * dpre;
      if (needs(c)) ensure_grad(c.id) += dc.cwiseProduct(gf2);
      if (needs(wx)) ensure_grad(wx.id).noalias() += dpre * val(x).transpose();
      if (needs(wh)) ensure_grad(wh.id).noalias() += dpre * val(h).transpose();
      if (needs(b)) ensure_grad(b.id).col(0) += dpre.rowwise().sum();
    });
    return ov;
  }

  // GRU update, column-batched: q is the previous hidden state, r the input.
  // Gate order in wx/wh/b is [update, reset, candidate]; the reset gate is
  // applied after the hidden projection. out = z*q + (1-z)*cand.
  Var gru_step(Var q, Var r, Var wx, Var wh, Var b) {
    const int d = static_cast<int>(val(q).rows());
    M px = val(wx) * val(r);
    M ph = val(wh) * val(q);
    const auto& bv = val(b);
    M z = sigmoid_of((px.topRows(d) + ph.topRows(d)).colwise() + Vec<S>(bv.col(0).head(d)));
    M rg = sigmoid_of((px.middleRows(d, d) + ph.middleRows(d, d)).colwise() + Vec<S>(bv.col(0).segment(d, d)));
    M hn = ph.bottomRows(d);
    M cand = (((px.bottomRows(d) + rg.cwiseProduct(hn)).colwise() + Vec<S>(bv.col(0).tail(d))).array().tanh())
                 .matrix();
    M out = z.cwiseProduct(val(q)) + (M::Ones(d, z.cols()) - z).cwiseProduct(cand);
    bool ng = needs(q) || needs(r) || needs(wx) || needs(wh) || needs(b);
    Var ov = push(std::move(out), ng);
    node(ov).aux = {std::move(z), std::move(rg), std::move(cand), std::move(hn)};
    set_back(ov, [this, q, r, wx, wh, b, ov, d] {
      const M& g = node(ov).grad;
      const auto& a = node(ov).aux;
      const M &z2 = a[0], &rg2 = a[1], &cand2 = a[2], &hn2 = a[3];
      M dz = g.cwiseProduct(val(q) - cand2);
      M dcand = g.cwiseProduct(M::Ones(d, g.cols()) - z2);
      M dcand_pre = (dcand.array() * (S(1) - cand2.array().square())).matrix();
      M drg = dcand_pre.cwiseProduct(hn2);
      M dz_pre = (dz.array() * z2.array() * (S(1) - z2.array())).matrix();
      M drg_pre = (drg.array() * rg2.array() * (S(1) - rg2.array())).matrix();
      M dpx(3 * d, g.cols());
      dpx.topRows(d) = dz_pre;
      dpx.middleRows(d, d) = drg_pre;
      dpx.bottomRows(d) = dcand_pre;
      M dph(3 * d, g.cols());
      dph.topRows(d) = dz_pre;
      dph.middleRows(d, d) = drg_pre;
      dph.bottomRows(d) = dcand_pre.cwiseProduct(rg2);
      if (needs(r)) ensure_grad(r.id).noalias() += val(wx).transpose() * dpx;
      if (needs(q)) {
        ensure_grad(q.id).noalias() += val(wh).transpose() * dph;
        ensure_grad(q.id) += g.cwiseProduct(z2);
      }
      if (needs(wx)) ensure_grad(wx.id).noalias() += dpx * val(r).transpose();
      if (needs(wh)) ensure_grad(wh.id).noalias() += dph * val(q).transpose();
      if (needs(b)) ensure_grad(b.id).col(0) += dpx.rowwise().sum();
    });
    return ov;
  }

  // ---- attention ----

  // Scaled dot-product attention over pre-projected q (D x N), k/v (D x Mk),
  // split into `heads` row groups. Causal mode requires N == Mk and lets
  // query column t see key columns 0..t only. Per-head probabilities are
  // cached for the backward pass.
  Var attention(Var q, Var k, Var v, int heads, bool causal) {
    const int d = static_cast<int>(val(q).rows());
    const int n = static_cast<int>(val(q).cols());
    const int mk = static_cast<int>(val(k).cols());
    if (d % heads != 0) throw std::invalid_argument("width not divisible by heads");
    if (causal && n != mk) throw std::invalid_argument("causal attention needs aligned axes");
    const int dh = d / heads;
    const S inv_sqrt = S(1) / std::sqrt(static_cast<S>(dh));

    M out(d, n);
    std::vector<M> probs(static_cast<std::size_t>(heads));
    for (int h = 0; h < heads; ++h) {
      M logits = (val(k).middleRows(h * dh, dh).transpose() * val(q).middleRows(h * dh, dh)) * inv_sqrt;
      M& p = probs[static_cast<std::size_t>(h)];
      p = M::Zero(mk, n);
      for (int j = 0; j < n; ++j) {
        const int valid = causal ? j + 1 : mk;
        auto col = logits.col(j).head(valid);
        S mx = col.maxCoeff();
        Vec<S> e = (col.array() - mx).exp();
        p.col(j).head(valid) = e / e.sum();
      }
      out.middleRows(h * dh, dh).noalias() = val(v).middleRows(h * dh, dh) * p;
    }
    bool ng = needs(q) || needs(k) || needs(v);
    Var ov = push(std::move(out), ng);
    node(ov).aux = std::move(probs);
    set_back(ov, [this, q, k, v, ov, heads, dh, inv_sqrt] {
      const M& g = node(ov).grad;
      const auto& probs2 = node(ov).aux;
      for (int h = 0; h < heads; ++h) {
        const M& p = probs2[static_cast<std::size_t>(h)];
        auto gh = g.middleRows(h * dh, dh);
        if (needs(v)) ensure_grad(v.id).middleRows(h * dh, dh).noalias() += gh * p.transpose();
        if (!needs(q) && !needs(k)) continue;
        M dp = val(v).middleRows(h * dh, dh).transpose() * gh;  // Mk x N
        // softmax backward per column; masked entries have p == 0.
        M ds = p.cwiseProduct(dp);
        Eigen::Matrix<S, 1, Eigen::Dynamic> colsum = ds.colwise().sum();
        ds.noalias() -= p * colsum.asDiagonal();
        ds *= inv_sqrt;
        if (needs(q)) {
          ensure_grad(q.id).middleRows(h * dh, dh).noalias() += val(k).middleRows(h * dh, dh) * ds;
        }
        if (needs(k)) {
          ensure_grad(k.id).middleRows(h * dh, dh).noalias() +=
              val(q).middleRows(h * dh, dh) * ds.transpose();
        }
      }
    });
    return ov;
  }

  // ---- softmax / losses ----

  // Column-wise softmax restricted to the first valid[j] rows; other rows
  // are exactly zero (and receive exactly zero gradient).
  Var masked_softmax(Var logits, std::vector<int> valid) {
    const M& x = val(logits);
    M p = M::Zero(x.rows(), x.cols());
    for (int j = 0; j < x.cols(); ++j) {
      const int vj = valid[static_cast<std::size_t>(j)];
      auto col = x.col(j).head(vj);
      S mx = col.maxCoeff();
      Vec<S> e = (col.array() - mx).exp();
      p.col(j).head(vj) = e / e.sum();
    }
    Var out = push(std::move(p), needs(logits));
    set_back(out, [this, logits, out, valid = std::move(valid)] {
      if (!needs(logits)) return;
      const M& p2 = val(out);
      const M& g = node(out).grad;
      M& gl = ensure_grad(logits.id);
      for (int j = 0; j < p2.cols(); ++j) {
        const int vj = valid[static_cast<std::size_t>(j)];
        auto pc = p2.col(j).head(vj);
        auto gc = g.col(j).head(vj);
        S dot = pc.dot(gc);
        gl.col(j).head(vj).array() += pc.array() * (gc.array() - dot);
      }
    });
    return out;
  }

  // Fused masked softmax + cross entropy. Returns a 1 x N row of losses;
  // aux[0] holds the probabilities for metric readout.
  Var softmax_xent(Var logits, std::vector<int> valid, std::vector<int> targets) {
    const M& x = val(logits);
    const int n = static_cast<int>(x.cols());
    M loss(1, n);
    M p = M::Zero(x.rows(), x.cols());
    for (int j = 0; j < n; ++j) {
      const int vj = valid[static_cast<std::size_t>(j)];
      const int tj = targets[static_cast<std::size_t>(j)];
      if (tj < 0 || tj >= vj) throw std::invalid_argument("xent target outside valid range");
      auto col = x.col(j).head(vj);
      S mx = col.maxCoeff();
      Vec<S> e = (col.array() - mx).exp();
      S z = e.sum();
      p.col(j).head(vj) = e / z;
      loss(0, j) = std::log(z) + mx - x(tj, j);
    }
    Var out = push(std::move(loss), needs(logits));
    node(out).aux = {std::move(p)};
    set_back(out, [this, logits, out, valid = std::move(valid), targets = std::move(targets)] {
      if (!needs(logits)) return;
      const M& g = node(out).grad;
      const M& p2 = node(out).aux[0];
      M& gl = ensure_grad(logits.id);
      for (int j = 0; j < p2.cols(); ++j) {
        const int vj = valid[static_cast<std::size_t>(j)];
        gl.col(j).head(vj) += p2.col(j).head(vj) * g(0, j);
        gl(targets[static_cast<std::size_t>(j)], j) -= g(0, j);
      }
    });
    return out;
  }

  // Mean of the selected entries of a 1 x N row. Returns a 1 x 1 scalar; the
  // mean of an empty selection is 0.
  Var mean_where(Var row, std::vector<std::uint8_t> keep) {
    const M& x = val(row);
    S total = 0;
    int count = 0;
    for (int j = 0; j < x.cols(); ++j) {
      if (keep[static_cast<std::size_t>(j)]) {
        total += x(0, j);
        ++count;
      }
    }
    M v(1, 1);
    v(0, 0) = count ? total / static_cast<S>(count) : S(0);
    Var out = push(std::move(v), needs(row));
    set_back(out, [this, row, out, keep = std::move(keep), count] {
      if (!needs(row) || count == 0) return;
      const S g = node(out).grad(0, 0) / static_cast<S>(count);
      M& gr = ensure_grad(row.id);
      for (int j = 0; j < gr.cols(); ++j) {
        if (keep[static_cast<std::size_t>(j)]) gr(0, j) += g;
      }
    });
    return out;
  }

  Var sum_all(Var a) {
    M v(1, 1);
    v(0, 0) = val(a).sum();
    Var out = push(std::move(v), needs(a));
    set_back(out, [this, a, out] {
      if (needs(a)) ensure_grad(a.id).array() += node(out).grad(0, 0);
    });
    return out;
  }

  // ---- backward ----

  void backward(Var loss) {
    if (val(loss).rows() != 1 || val(loss).cols() != 1) {
      throw std::invalid_argument("backward expects a scalar");
    }
    ensure_grad(loss.id)(0, 0) = S(1);
    for (int i = loss.id; i >= 0; --i) {
      Node& n = nodes_[static_cast<std::size_t>(i)];
      if (n.back && n.needs_grad && n.grad_ready) n.back();
    }
  }

  // Accumulates this graph's parameter gradients into `sink` (indexed by
  // param id).
  template <typename Sink>
  void param_grads(Sink& sink) const {
    for (const Node& n : nodes_) {
      if (n.param_id >= 0 && n.grad_ready) sink.accumulate(n.param_id, n.grad);
    }
  }

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    M own;
    const M* view = nullptr;
    M grad;
    bool needs_grad = false;
    bool grad_ready = false;
    int param_id = -1;
    std::function<void()> back;
    std::vector<M> aux;
  };

  Node& node(Var v) { return nodes_.at(static_cast<std::size_t>(v.id)); }
  const Node& node(Var v) const { return nodes_.at(static_cast<std::size_t>(v.id)); }
  bool needs(Var v) const { return node(v).needs_grad; }

  Var push(M value, bool needs_grad) {
    Node n;
    n.own = std::move(value);
    n.needs_grad = needs_grad;
    nodes_.push_back(std::move(n));
    return Var{static_cast<int>(nodes_.size()) - 1};
  }

  void set_back(Var v, std::function<void()> fn) {
    if (node(v).needs_grad) node(v).back = std::move(fn);
  }

  M& ensure_grad(int id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.grad_ready) {
      const M& v = n.view ? *n.view : n.own;
      n.grad = M::Zero(v.rows(), v.cols());
      n.grad_ready = true;
    }
    return n.grad;
  }

  static M sigmoid_of(const M& x) { return ((x.array() * S(-1)).exp() + S(1)).inverse().matrix(); }

  std::vector<Node> nodes_;
};

}  // namespace editseq::nn
