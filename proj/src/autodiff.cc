// Copyright 2026 The evcoref Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "evcoref/autodiff.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace evcoref {
namespace {

std::string Shape(size_t n) { return "[" + std::to_string(n) + "]"; }

void CheckSameLength(const char *op, const Vector &a, const Vector &b) {
  if (a.size() != b.size()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + Shape(a.size()) +
                     " vs " + Shape(b.size()));
  }
}

void CheckScalar(const char *op, const Vector &a) {
  if (a.size() != 1) {
    throw ShapeError(std::string(op) + ": expected scalar, got " +
                     Shape(a.size()));
  }
}

}  // namespace

Parameter &ParameterStore::Add(std::string name, int rows, int cols,
                               ParamGroup group) {
  if (rows < 0 || cols < 0) {
    throw ShapeError("parameter " + name + ": negative dimension");
  }
  if (Find(name) != nullptr) {
    throw std::invalid_argument("duplicate parameter name: " + name);
  }
  Parameter &p = params_.emplace_back();
  p.name = std::move(name);
  p.rows = rows;
  p.cols = cols;
  p.group = group;
  p.value.assign(static_cast<size_t>(rows) * cols, 0.0);
  p.grad.assign(p.value.size(), 0.0);
  return p;
}

Parameter *ParameterStore::Find(const std::string &name) {
  for (Parameter &p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const Parameter *ParameterStore::Find(const std::string &name) const {
  for (const Parameter &p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

void ParameterStore::ZeroGrad() {
  for (Parameter &p : params_) std::fill(p.grad.begin(), p.grad.end(), 0.0);
}

size_t ParameterStore::NumScalars() const {
  size_t n = 0;
  for (const Parameter &p : params_) n += p.size();
  return n;
}

std::vector<Vector> ParameterStore::Snapshot() const {
  std::vector<Vector> out;
  out.reserve(params_.size());
  for (const Parameter &p : params_) out.push_back(p.value);
  return out;
}

void ParameterStore::Restore(const std::vector<Vector> &snapshot) {
  if (snapshot.size() != params_.size()) {
    throw ShapeError("Restore: snapshot has " +
                     std::to_string(snapshot.size()) + " parameters, store has " +
                     std::to_string(params_.size()));
  }
  for (size_t i = 0; i < params_.size(); ++i) {
    CheckSameLength("Restore", params_[i].value, snapshot[i]);
    params_[i].value = snapshot[i];
  }
}

Var Tape::Push(Vector value, std::function<void(Tape &)> backward) {
  Node &n = nodes_.emplace_back();
  n.value = std::move(value);
  if (recording_) n.backward = std::move(backward);
  return Var{static_cast<int>(nodes_.size()) - 1};
}

const Vector &Tape::at(Var x) const {
  if (x.id < 0 || static_cast<size_t>(x.id) >= nodes_.size()) {
    throw std::out_of_range("Tape: invalid variable id " +
                            std::to_string(x.id));
  }
  return nodes_[x.id].value;
}

double Tape::scalar(Var x) const {
  const Vector &val = at(x);
  CheckScalar("scalar", val);
  return val[0];
}

Var Tape::Constant(Vector value) { return Push(std::move(value), nullptr); }

Var Tape::Affine(Parameter &weight, Parameter &bias, Var x) {
  const Vector &in = at(x);
  if (static_cast<size_t>(weight.cols) != in.size() ||
      bias.rows != weight.rows || bias.cols != 1) {
    std::ostringstream msg;
    msg << "Affine(" << weight.name << "): weight [" << weight.rows << "x"
        << weight.cols << "] bias [" << bias.rows << "x" << bias.cols
        << "] vs input " << Shape(in.size());
    throw ShapeError(msg.str());
  }
  const int rows = weight.rows;
  const int cols = weight.cols;
  Vector out(bias.value);
  const double *w = weight.value.data();
  for (int r = 0; r < rows; ++r) {
    double acc = 0.0;
    const double *row = w + static_cast<size_t>(r) * cols;
    for (int c = 0; c < cols; ++c) acc += row[c] * in[c];
    out[r] += acc;
  }
  const int xi = x.id;
  Parameter *wp = &weight;
  Parameter *bp = &bias;
  const int self = static_cast<int>(nodes_.size());
  return Push(std::move(out), [xi, wp, bp, self, rows, cols](Tape &t) {
    const Vector &gy = t.g(self);
    const Vector &in = t.v(xi);
    Vector &gx = t.g(xi);
    double *gw = wp->grad.data();
    const double *w = wp->value.data();
    for (int r = 0; r < rows; ++r) {
      const double gr = gy[r];
      bp->grad[r] += gr;
      if (gr == 0.0) continue;
      double *grow = gw + static_cast<size_t>(r) * cols;
      const double *row = w + static_cast<size_t>(r) * cols;
      for (int c = 0; c < cols; ++c) {
        grow[c] += gr * in[c];
        gx[c] += gr * row[c];
      }
    }
  });
}

Var Tape::Row(Parameter &table, int r) {
  if (r < 0 || r >= table.rows) {
    throw std::out_of_range("Row(" + table.name + "): row " +
                            std::to_string(r) + " outside [0, " +
                            std::to_string(table.rows) + ")");
  }
  const int cols = table.cols;
  Vector out(table.value.begin() + static_cast<ptrdiff_t>(r) * cols,
             table.value.begin() + static_cast<ptrdiff_t>(r + 1) * cols);
  Parameter *tp = &table;
  const int self = static_cast<int>(nodes_.size());
  return Push(std::move(out), [tp, r, cols, self](Tape &t) {
    const Vector &gy = t.g(self);
    double *dst = tp->grad.data() + static_cast<size_t>(r) * cols;
    for (int c = 0; c < cols; ++c) dst[c] += gy[c];
  });
}

Var Tape::Relu(Var x) {
  Vector out(at(x));
  for (double &e : out) e = e > 0.0 ? e : 0.0;
  const int xi = x.id;
  const int self = static_cast<int>(nodes_.size());
  return Push(std::move(out), [xi, self](Tape &t) {
    const Vector &gy = t.g(self);
    const Vector &in = t.v(xi);
    Vector &gx = t.g(xi);
    for (size_t i = 0; i < gy.size(); ++i) {
      if (in[i] > 0.0) gx[i] += gy[i];
    }
  });
}

Var Tape::Sigmoid(Var x) {
  Vector out(at(x));
  for (double &e : out) {
    // Branches keep exp() from overflowing for large |e|.
    e = e >= 0.0 ? 1.0 / (1.0 + std::exp(-e)) : std::exp(e) / (1.0 + std::exp(e));
  }
  const int xi = x.id;
  const int self = static_cast<int>(nodes_.size());
  return Push(std::move(out), [xi, self](Tape &t) {
    const Vector &gy = t.g(self);
    const Vector &y = t.v(self);
    Vector &gx = t.g(xi);
    for (size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i] * y[i] * (1.0 - y[i]);
  });
}

Var Tape::Add(Var a, Var b) {
  CheckSameLength("Add", at(a), at(b));
  Vector out(at(a));
  const Vector &bv = at(b);
  for (size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  const int ai = a.id, bi = b.id;
  const int self = static_cast<int>(nodes_.size());
  return Push(std::move(out), [ai, bi, self](Tape &t) {
    const Vector &gy = t.g(self);
    for (size_t i = 0; i < gy.size(); ++i) {
      t.g(ai)[i] += gy[i];
      t.g(bi)[i] += gy[i];
    }
  });
}

Var Tape::Sub(Var a, Var b) {
  CheckSameLength("Sub", at(a), at(b));
  Vector out(at(a));
  const Vector &bv = at(b);
  for (size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  const int ai = a.id, bi = b.id;
  const int self = static_cast<int>(nodes_.size());
  return Push(std::move(out), [ai, bi, self](Tape &t) {
    const Vector &gy = t.g(self);
    for (size_t i = 0; i < gy.size(); ++i) {
      t.g(ai)[i] += gy[i];
      t.g(bi)[i] -= gy[i];
    }
  });
}

Var Tape::Mul(Var a, Var b) {
  CheckSameLength("Mul", at(a), at(b));
  Vector out(at(a));
  const Vector &bv = at(b);
  for (size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  const int ai = a.id, bi = b.id;
  const int self = static_cast<int>(nodes_.size());
  return Push(std::move(out), [ai, bi, self](Tape &t) {
    const Vector &gy = t.g(self);
    const Vector &av = t.v(ai);
    const Vector &bv = t.v(bi);
    for (size_t i = 0; i < gy.size(); ++i) {
      t.g(ai)[i] += gy[i] * bv[i];
      t.g(bi)[i] += gy[i] * av[i];
    }
  });
}

Var Tape::OneMinus(Var x) {
  Vector out(at(x));
  for (double &e : out) e = 1.0 - e;
  const int xi = x.id;
  const int self = static_cast<int>(nodes_.size());
  return Push(std::move(out), [xi, self](Tape &t) {
    const Vector &gy = t.g(self);
    for (size_t i = 0; i < gy.size(); ++i) t.g(xi)[i] -= gy[i];
  });
}

Var Tape::Dot(Var a, Var b) {
  const Vector &av = at(a);
  const Vector &bv = at(b);
  CheckSameLength("Dot", av, bv);
  double acc = 0.0;
  for (size_t i = 0; i < av.size(); ++i) acc += av[i] * bv[i];
  const int ai = a.id, bi = b.id;
  const int self = static_cast<int>(nodes_.size());
  return Push(Vector{acc}, [ai, bi, self](Tape &t) {
    const double gy = t.g(self)[0];
    const Vector &av = t.v(ai);
    const Vector &bv = t.v(bi);
    for (size_t i = 0; i < av.size(); ++i) {
      t.g(ai)[i] += gy * bv[i];
      t.g(bi)[i] += gy * av[i];
    }
  });
}

Var Tape::Scale(Var s, Var x) {
  CheckScalar("Scale", at(s));
  const double alpha = at(s)[0];
  Vector out(at(x));
  for (double &e : out) e *= alpha;
  const int si = s.id, xi = x.id;
  const int self = static_cast<int>(nodes_.size());
  return Push(std::move(out), [si, xi, self](Tape &t) {
    const Vector &gy = t.g(self);
    const Vector &xv = t.v(xi);
    const double alpha = t.v(si)[0];
    double gs = 0.0;
    for (size_t i = 0; i < gy.size(); ++i) {
      gs += gy[i] * xv[i];
      t.g(xi)[i] += gy[i] * alpha;
    }
    t.g(si)[0] += gs;
  });
}

Var Tape::ScaleConst(double alpha, Var x) {
  Vector out(at(x));
  for (double &e : out) e *= alpha;
  const int xi = x.id;
  const int self = static_cast<int>(nodes_.size());
  return Push(std::move(out), [alpha, xi, self](Tape &t) {
    const Vector &gy = t.g(self);
    for (size_t i = 0; i < gy.size(); ++i) t.g(xi)[i] += alpha * gy[i];
  });
}

Var Tape::Concat(std::span<const Var> parts) {
  Vector out;
  std::vector<int> ids;
  ids.reserve(parts.size());
  for (Var p : parts) {
    const Vector &pv = at(p);
    out.insert(out.end(), pv.begin(), pv.end());
    ids.push_back(p.id);
  }
  const int self = static_cast<int>(nodes_.size());
  return Push(std::move(out), [ids = std::move(ids), self](Tape &t) {
    const Vector &gy = t.g(self);
    size_t offset = 0;
    for (int id : ids) {
      Vector &gp = t.g(id);
      for (size_t i = 0; i < gp.size(); ++i) gp[i] += gy[offset + i];
      offset += gp.size();
    }
  });
}

Var Tape::Mean(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("Mean: no operands");
  Vector out(at(parts[0]).size(), 0.0);
  std::vector<int> ids;
  ids.reserve(parts.size());
  for (Var p : parts) {
    const Vector &pv = at(p);
    CheckSameLength("Mean", out, pv);
    for (size_t i = 0; i < out.size(); ++i) out[i] += pv[i];
    ids.push_back(p.id);
  }
  const double inv = 1.0 / static_cast<double>(parts.size());
  for (double &e : out) e *= inv;
  const int self = static_cast<int>(nodes_.size());
  return Push(std::move(out), [ids = std::move(ids), inv, self](Tape &t) {
    const Vector &gy = t.g(self);
    for (int id : ids) {
      Vector &gp = t.g(id);
      for (size_t i = 0; i < gp.size(); ++i) gp[i] += inv * gy[i];
    }
  });
}

Var Tape::Sum(std::span<const Var> scalars) {
  double acc = 0.0;
  std::vector<int> ids;
  ids.reserve(scalars.size());
  for (Var s : scalars) {
    CheckScalar("Sum", at(s));
    acc += at(s)[0];
    ids.push_back(s.id);
  }
  const int self = static_cast<int>(nodes_.size());
  return Push(Vector{acc}, [ids = std::move(ids), self](Tape &t) {
    const double gy = t.g(self)[0];
    for (int id : ids) t.g(id)[0] += gy;
  });
}

Var Tape::LogSumExp(std::span<const Var> scalars) {
  if (scalars.empty()) throw ShapeError("LogSumExp: no operands");
  double hi = -INFINITY;
  std::vector<int> ids;
  ids.reserve(scalars.size());
  for (Var s : scalars) {
    CheckScalar("LogSumExp", at(s));
    hi = std::max(hi, at(s)[0]);
    ids.push_back(s.id);
  }
  double acc = 0.0;
  for (int id : ids) acc += std::exp(v(id)[0] - hi);
  const double out = hi + std::log(acc);
  const int self = static_cast<int>(nodes_.size());
  return Push(Vector{out}, [ids = std::move(ids), self](Tape &t) {
    const double gy = t.g(self)[0];
    const double lse = t.v(self)[0];
    for (int id : ids) t.g(id)[0] += gy * std::exp(t.v(id)[0] - lse);
  });
}

Tape::Decomposition Tape::Decompose(Var t, Var h, double singular_threshold) {
  const Vector &tv = at(t);
  const Vector &hv = at(h);
  if (tv.size() != hv.size()) {
    throw ShapeError("Decompose: shape mismatch t" + Shape(tv.size()) +
                     " vs h" + Shape(hv.size()));
  }
  double tt = 0.0, ht = 0.0;
  for (size_t i = 0; i < tv.size(); ++i) {
    tt += tv[i] * tv[i];
    ht += hv[i] * tv[i];
  }
  const size_t n = tv.size();
  const int ti = t.id, hi = h.id;

  if (tt < singular_threshold) {
    Vector ortho(hv);  // copied first: Push may reallocate the node storage
    Var par = Push(Vector(n, 0.0), nullptr);
    const int self = static_cast<int>(nodes_.size());
    Var orth = Push(std::move(ortho), [hi, self](Tape &tp) {
      const Vector &gy = tp.g(self);
      for (size_t i = 0; i < gy.size(); ++i) tp.g(hi)[i] += gy[i];
    });
    return {par, orth};
  }

  const double alpha = ht / tt;
  Vector par(n), ortho(n);
  for (size_t i = 0; i < n; ++i) {
    par[i] = alpha * tv[i];
    ortho[i] = hv[i] - par[i];
  }
  // Both outputs are pushed first; a single closure on the orthogonal node
  // (the later one) handles the joint backward so that incoming gradients
  // from both are complete when it runs.
  Var pv = Push(std::move(par), [](Tape &) {});
  const int par_id = pv.id;
  const int self = static_cast<int>(nodes_.size());
  Var ov = Push(std::move(ortho), [ti, hi, par_id, self, tt, alpha](Tape &tp) {
    const Vector &gp = tp.g(par_id);
    const Vector &go = tp.g(self);
    const Vector &tv = tp.v(ti);
    const Vector &hv = tp.v(hi);
    const size_t n = tv.size();
    // Total gradient on the parallel part, since ortho = h - par.
    double qt = 0.0;
    Vector q(n);
    for (size_t i = 0; i < n; ++i) {
      q[i] = gp[i] - go[i];
      qt += q[i] * tv[i];
    }
    const double beta = qt / tt;
    Vector &gh = tp.g(hi);
    Vector &gt = tp.g(ti);
    for (size_t i = 0; i < n; ++i) {
      gh[i] += go[i] + beta * tv[i];
      gt[i] += alpha * q[i] + beta * (hv[i] - 2.0 * alpha * tv[i]);
    }
  });
  return {pv, ov};
}

void Tape::Backward(Var loss) {
  if (store_ != nullptr) store_->ZeroGrad();
  if (nodes_.empty()) return;
  CheckScalar("Backward", at(loss));
  for (Node &n : nodes_) n.grad.assign(n.value.size(), 0.0);
  nodes_[loss.id].grad[0] = 1.0;
  for (size_t i = nodes_.size(); i-- > 0;) {
    if (nodes_[i].backward) nodes_[i].backward(*this);
  }
}

}  // namespace evcoref
