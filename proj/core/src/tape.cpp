#include "snne/tape.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "snne/activations.hpp"

namespace snne {

namespace {
constexpr double kNormEps = 1e-12;
}

Tape::NodeId Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

void Tape::check_same_shape(NodeId a, NodeId b, const char* what) const {
  if (!at(a).value.same_shape(at(b).value)) {
    throw ShapeError(std::string(what) + ": shape mismatch " +
                     std::to_string(at(a).value.rows()) + "x" + std::to_string(at(a).value.cols()) +
                     " vs " + std::to_string(at(b).value.rows()) + "x" +
                     std::to_string(at(b).value.cols()));
  }
}

Tape::NodeId Tape::leaf(Matrix value, bool requires_grad) {
  Node n;
  n.op = Op::kLeaf;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::matmul(NodeId a, NodeId b) {
  Node n;
  n.op = Op::kMatMul;
  n.in0 = a;
  n.in1 = b;
  n.value = snne::matmul(at(a).value, at(b).value);
  n.requires_grad = at(a).requires_grad || at(b).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::matmul_nt(NodeId a, NodeId b) {
  Node n;
  n.op = Op::kMatMulNT;
  n.in0 = a;
  n.in1 = b;
  n.value = snne::matmul_nt(at(a).value, at(b).value);
  n.requires_grad = at(a).requires_grad || at(b).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::add_row_vector(NodeId x, NodeId bias) {
  const Matrix& xv = at(x).value;
  const Matrix& bv = at(bias).value;
  if (bv.rows() != 1 || bv.cols() != xv.cols()) {
    throw ShapeError("add_row_vector: bias must be 1x" + std::to_string(xv.cols()));
  }
  Node n;
  n.op = Op::kAddRowVec;
  n.in0 = x;
  n.in1 = bias;
  n.value = xv;
  for (std::size_t r = 0; r < xv.rows(); ++r)
    for (std::size_t c = 0; c < xv.cols(); ++c) n.value(r, c) += bv(0, c);
  n.requires_grad = at(x).requires_grad || at(bias).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::add(NodeId a, NodeId b) {
  check_same_shape(a, b, "add");
  Node n;
  n.op = Op::kAdd;
  n.in0 = a;
  n.in1 = b;
  n.value = at(a).value;
  const double* pb = at(b).value.data();
  for (std::size_t i = 0; i < n.value.size(); ++i) n.value.data()[i] += pb[i];
  n.requires_grad = at(a).requires_grad || at(b).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::sub(NodeId a, NodeId b) {
  check_same_shape(a, b, "sub");
  Node n;
  n.op = Op::kSub;
  n.in0 = a;
  n.in1 = b;
  n.value = at(a).value;
  const double* pb = at(b).value.data();
  for (std::size_t i = 0; i < n.value.size(); ++i) n.value.data()[i] -= pb[i];
  n.requires_grad = at(a).requires_grad || at(b).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::mul(NodeId a, NodeId b) {
  check_same_shape(a, b, "mul");
  Node n;
  n.op = Op::kMul;
  n.in0 = a;
  n.in1 = b;
  n.value = at(a).value;
  const double* pb = at(b).value.data();
  for (std::size_t i = 0; i < n.value.size(); ++i) n.value.data()[i] *= pb[i];
  n.requires_grad = at(a).requires_grad || at(b).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::div(NodeId a, NodeId b) {
  check_same_shape(a, b, "div");
  Node n;
  n.op = Op::kDiv;
  n.in0 = a;
  n.in1 = b;
  n.value = at(a).value;
  const double* pb = at(b).value.data();
  for (std::size_t i = 0; i < n.value.size(); ++i) n.value.data()[i] /= pb[i];
  n.requires_grad = at(a).requires_grad || at(b).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::scale(NodeId x, double c) {
  Node n;
  n.op = Op::kScale;
  n.in0 = x;
  n.c0 = c;
  n.value = at(x).value;
  for (std::size_t i = 0; i < n.value.size(); ++i) n.value.data()[i] *= c;
  n.requires_grad = at(x).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::add_scalar(NodeId x, double c) {
  Node n;
  n.op = Op::kAddScalar;
  n.in0 = x;
  n.c0 = c;
  n.value = at(x).value;
  for (std::size_t i = 0; i < n.value.size(); ++i) n.value.data()[i] += c;
  n.requires_grad = at(x).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::hadamard_const(NodeId x, Matrix weights) {
  if (!at(x).value.same_shape(weights)) throw ShapeError("hadamard_const: shape mismatch");
  Node n;
  n.op = Op::kHadamardConst;
  n.in0 = x;
  n.value = at(x).value;
  for (std::size_t i = 0; i < n.value.size(); ++i) n.value.data()[i] *= weights.data()[i];
  n.aux = std::move(weights);
  n.requires_grad = at(x).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::add_const(NodeId x, Matrix offset) {
  if (!at(x).value.same_shape(offset)) throw ShapeError("add_const: shape mismatch");
  Node n;
  n.op = Op::kAddConst;
  n.in0 = x;
  n.value = at(x).value;
  for (std::size_t i = 0; i < n.value.size(); ++i) n.value.data()[i] += offset.data()[i];
  n.aux = std::move(offset);
  n.requires_grad = at(x).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::selu(NodeId x) {
  Node n;
  n.op = Op::kSelu;
  n.in0 = x;
  n.value = at(x).value;
  for (std::size_t i = 0; i < n.value.size(); ++i)
    n.value.data()[i] = snne::selu(n.value.data()[i]);
  n.requires_grad = at(x).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::softplus(NodeId x) {
  Node n;
  n.op = Op::kSoftplus;
  n.in0 = x;
  n.value = at(x).value;
  for (std::size_t i = 0; i < n.value.size(); ++i)
    n.value.data()[i] = snne::softplus(n.value.data()[i]);
  n.requires_grad = at(x).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::exp(NodeId x) {
  Node n;
  n.op = Op::kExp;
  n.in0 = x;
  n.value = at(x).value;
  for (std::size_t i = 0; i < n.value.size(); ++i)
    n.value.data()[i] = std::exp(n.value.data()[i]);
  n.requires_grad = at(x).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::log(NodeId x) {
  Node n;
  n.op = Op::kLog;
  n.in0 = x;
  n.value = at(x).value;
  for (std::size_t i = 0; i < n.value.size(); ++i)
    n.value.data()[i] = std::log(n.value.data()[i]);
  n.requires_grad = at(x).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::square(NodeId x) {
  Node n;
  n.op = Op::kSquare;
  n.in0 = x;
  n.value = at(x).value;
  for (std::size_t i = 0; i < n.value.size(); ++i)
    n.value.data()[i] *= n.value.data()[i];
  n.requires_grad = at(x).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::column(NodeId x, std::size_t j) {
  const Matrix& xv = at(x).value;
  if (j >= xv.cols()) throw ShapeError("column: index out of range");
  Node n;
  n.op = Op::kColumn;
  n.in0 = x;
  n.c0 = static_cast<double>(j);
  n.value = Matrix(xv.rows(), 1);
  for (std::size_t r = 0; r < xv.rows(); ++r) n.value(r, 0) = xv(r, j);
  n.requires_grad = at(x).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::row_sum(NodeId x) {
  const Matrix& xv = at(x).value;
  Node n;
  n.op = Op::kRowSum;
  n.in0 = x;
  n.value = Matrix(xv.rows(), 1);
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < xv.cols(); ++c) acc += xv(r, c);
    n.value(r, 0) = acc;
  }
  n.requires_grad = at(x).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::sum_all(NodeId x) {
  const Matrix& xv = at(x).value;
  Node n;
  n.op = Op::kSumAll;
  n.in0 = x;
  n.value = Matrix(1, 1);
  double acc = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) acc += xv.data()[i];
  n.value(0, 0) = acc;
  n.requires_grad = at(x).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::mean_all(NodeId x) {
  const Matrix& xv = at(x).value;
  if (xv.size() == 0) throw ContractError("mean_all: empty input");
  Node n;
  n.op = Op::kMeanAll;
  n.in0 = x;
  n.value = Matrix(1, 1);
  double acc = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) acc += xv.data()[i];
  n.value(0, 0) = acc / static_cast<double>(xv.size());
  n.requires_grad = at(x).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::row_l2_normalize(NodeId x) {
  const Matrix& xv = at(x).value;
  Node n;
  n.op = Op::kRowL2Normalize;
  n.in0 = x;
  n.value = xv;
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    double sq = 0.0;
    for (std::size_t c = 0; c < xv.cols(); ++c) sq += xv(r, c) * xv(r, c);
    const double norm = std::max(std::sqrt(sq), kNormEps);
    for (std::size_t c = 0; c < xv.cols(); ++c) n.value(r, c) /= norm;
  }
  n.requires_grad = at(x).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::softmax_crossentropy(NodeId logits, std::vector<int> class_ids) {
  const Matrix& lv = at(logits).value;
  if (class_ids.size() != lv.rows()) {
    throw ShapeError("softmax_crossentropy: one class id per row required");
  }
  for (int c : class_ids) {
    if (c < 0 || static_cast<std::size_t>(c) >= lv.cols()) {
      throw ContractError("softmax_crossentropy: class id out of range");
    }
  }
  Node n;
  n.op = Op::kSoftmaxCrossEntropy;
  n.in0 = logits;
  n.aux = Matrix(lv.rows(), lv.cols());  // cached softmax for backward
  double total = 0.0;
  for (std::size_t r = 0; r < lv.rows(); ++r) {
    double mx = lv(r, 0);
    for (std::size_t c = 1; c < lv.cols(); ++c) mx = std::max(mx, lv(r, c));
    double denom = 0.0;
    for (std::size_t c = 0; c < lv.cols(); ++c) denom += std::exp(lv(r, c) - mx);
    const double lse = mx + std::log(denom);
    total += lse - lv(r, static_cast<std::size_t>(class_ids[r]));
    for (std::size_t c = 0; c < lv.cols(); ++c)
      n.aux(r, c) = std::exp(lv(r, c) - mx) / denom;
  }
  n.value = Matrix(1, 1);
  n.value(0, 0) = total / static_cast<double>(lv.rows());
  n.ids = std::move(class_ids);
  n.requires_grad = at(logits).requires_grad;
  return push(std::move(n));
}

const Matrix& Tape::grad(NodeId id) const {
  const Node& n = at(id);
  if (!n.requires_grad) throw ContractError("grad: node does not track gradients");
  if (!backward_done_) throw ContractError("grad: backward() has not run");
  return n.grad;
}

void Tape::backward(NodeId loss) {
  Node& top = at(loss);
  if (top.value.rows() != 1 || top.value.cols() != 1) {
    throw ContractError("backward: loss node must be scalar");
  }
  if (backward_done_) throw ContractError("backward: tape already consumed");
  backward_done_ = true;

  // Every gradient-tracking node owns a buffer afterwards, zero when the loss
  // does not depend on it (a contrastive batch without positives detaches the
  // whole projection subtree, for example).
  for (Node& node : nodes_) {
    if (node.requires_grad && node.grad.empty()) {
      node.grad = Matrix(node.value.rows(), node.value.cols());
    }
  }
  if (!top.requires_grad) return;

  auto ensure_grad = [&](NodeId id) -> Matrix& {
    Node& n = at(id);
    if (n.grad.empty()) n.grad = Matrix(n.value.rows(), n.value.cols());
    return n.grad;
  };

  ensure_grad(loss)(0, 0) = 1.0;

  for (NodeId id = loss; id >= 0; --id) {
    Node& n = at(id);
    if (!n.requires_grad || n.grad.empty()) continue;
    const Matrix& g = n.grad;
    switch (n.op) {
      case Op::kLeaf:
        break;
      case Op::kMatMul: {
        if (at(n.in0).requires_grad) {
          Matrix& ga = ensure_grad(n.in0);
          const Matrix contrib = snne::matmul_nt(g, at(n.in1).value);  // g * B^T
          for (std::size_t i = 0; i < ga.size(); ++i) ga.data()[i] += contrib.data()[i];
        }
        if (at(n.in1).requires_grad) {
          Matrix& gb = ensure_grad(n.in1);
          const Matrix contrib = snne::matmul(at(n.in0).value.transposed(), g);
          for (std::size_t i = 0; i < gb.size(); ++i) gb.data()[i] += contrib.data()[i];
        }
        break;
      }
      case Op::kMatMulNT: {
        // C = A * B^T: dA = g * B, dB = g^T * A
        if (at(n.in0).requires_grad) {
          Matrix& ga = ensure_grad(n.in0);
          const Matrix contrib = snne::matmul(g, at(n.in1).value);
          for (std::size_t i = 0; i < ga.size(); ++i) ga.data()[i] += contrib.data()[i];
        }
        if (at(n.in1).requires_grad) {
          Matrix& gb = ensure_grad(n.in1);
          const Matrix contrib = snne::matmul(g.transposed(), at(n.in0).value);
          for (std::size_t i = 0; i < gb.size(); ++i) gb.data()[i] += contrib.data()[i];
        }
        break;
      }
      case Op::kAddRowVec: {
        if (at(n.in0).requires_grad) {
          Matrix& gx = ensure_grad(n.in0);
          for (std::size_t i = 0; i < gx.size(); ++i) gx.data()[i] += g.data()[i];
        }
        if (at(n.in1).requires_grad) {
          Matrix& gb = ensure_grad(n.in1);
          for (std::size_t r = 0; r < g.rows(); ++r)
            for (std::size_t c = 0; c < g.cols(); ++c) gb(0, c) += g(r, c);
        }
        break;
      }
      case Op::kAdd: {
        for (NodeId in : {n.in0, n.in1}) {
          if (!at(in).requires_grad) continue;
          Matrix& gi = ensure_grad(in);
          for (std::size_t i = 0; i < gi.size(); ++i) gi.data()[i] += g.data()[i];
        }
        break;
      }
      case Op::kSub: {
        if (at(n.in0).requires_grad) {
          Matrix& ga = ensure_grad(n.in0);
          for (std::size_t i = 0; i < ga.size(); ++i) ga.data()[i] += g.data()[i];
        }
        if (at(n.in1).requires_grad) {
          Matrix& gb = ensure_grad(n.in1);
          for (std::size_t i = 0; i < gb.size(); ++i) gb.data()[i] -= g.data()[i];
        }
        break;
      }
      case Op::kMul: {
        if (at(n.in0).requires_grad) {
          Matrix& ga = ensure_grad(n.in0);
          const double* pb = at(n.in1).value.data();
          for (std::size_t i = 0; i < ga.size(); ++i) ga.data()[i] += g.data()[i] * pb[i];
        }
        if (at(n.in1).requires_grad) {
          Matrix& gb = ensure_grad(n.in1);
          const double* pa = at(n.in0).value.data();
          for (std::size_t i = 0; i < gb.size(); ++i) gb.data()[i] += g.data()[i] * pa[i];
        }
        break;
      }
      case Op::kDiv: {
        const double* pb = at(n.in1).value.data();
        if (at(n.in0).requires_grad) {
          Matrix& ga = ensure_grad(n.in0);
          for (std::size_t i = 0; i < ga.size(); ++i) ga.data()[i] += g.data()[i] / pb[i];
        }
        if (at(n.in1).requires_grad) {
          Matrix& gb = ensure_grad(n.in1);
          const double* pc = n.value.data();  // c = a / b, so da/db = -c/b
          for (std::size_t i = 0; i < gb.size(); ++i)
            gb.data()[i] -= g.data()[i] * pc[i] / pb[i];
        }
        break;
      }
      case Op::kScale: {
        if (at(n.in0).requires_grad) {
          Matrix& gx = ensure_grad(n.in0);
          for (std::size_t i = 0; i < gx.size(); ++i) gx.data()[i] += g.data()[i] * n.c0;
        }
        break;
      }
      case Op::kAddScalar:
      case Op::kAddConst: {
        if (at(n.in0).requires_grad) {
          Matrix& gx = ensure_grad(n.in0);
          for (std::size_t i = 0; i < gx.size(); ++i) gx.data()[i] += g.data()[i];
        }
        break;
      }
      case Op::kHadamardConst: {
        if (at(n.in0).requires_grad) {
          Matrix& gx = ensure_grad(n.in0);
          for (std::size_t i = 0; i < gx.size(); ++i)
            gx.data()[i] += g.data()[i] * n.aux.data()[i];
        }
        break;
      }
      case Op::kSelu: {
        if (at(n.in0).requires_grad) {
          Matrix& gx = ensure_grad(n.in0);
          const double* px = at(n.in0).value.data();
          for (std::size_t i = 0; i < gx.size(); ++i)
            gx.data()[i] += g.data()[i] * selu_grad(px[i]);
        }
        break;
      }
      case Op::kSoftplus: {
        if (at(n.in0).requires_grad) {
          Matrix& gx = ensure_grad(n.in0);
          const double* px = at(n.in0).value.data();
          for (std::size_t i = 0; i < gx.size(); ++i)
            gx.data()[i] += g.data()[i] * sigmoid(px[i]);
        }
        break;
      }
      case Op::kExp: {
        if (at(n.in0).requires_grad) {
          Matrix& gx = ensure_grad(n.in0);
          const double* pv = n.value.data();
          for (std::size_t i = 0; i < gx.size(); ++i) gx.data()[i] += g.data()[i] * pv[i];
        }
        break;
      }
      case Op::kLog: {
        if (at(n.in0).requires_grad) {
          Matrix& gx = ensure_grad(n.in0);
          const double* px = at(n.in0).value.data();
          for (std::size_t i = 0; i < gx.size(); ++i) gx.data()[i] += g.data()[i] / px[i];
        }
        break;
      }
      case Op::kSquare: {
        if (at(n.in0).requires_grad) {
          Matrix& gx = ensure_grad(n.in0);
          const double* px = at(n.in0).value.data();
          for (std::size_t i = 0; i < gx.size(); ++i)
            gx.data()[i] += 2.0 * g.data()[i] * px[i];
        }
        break;
      }
      case Op::kColumn: {
        if (at(n.in0).requires_grad) {
          Matrix& gx = ensure_grad(n.in0);
          const std::size_t j = static_cast<std::size_t>(n.c0);
          for (std::size_t r = 0; r < g.rows(); ++r) gx(r, j) += g(r, 0);
        }
        break;
      }
      case Op::kRowSum: {
        if (at(n.in0).requires_grad) {
          Matrix& gx = ensure_grad(n.in0);
          for (std::size_t r = 0; r < gx.rows(); ++r)
            for (std::size_t c = 0; c < gx.cols(); ++c) gx(r, c) += g(r, 0);
        }
        break;
      }
      case Op::kSumAll: {
        if (at(n.in0).requires_grad) {
          Matrix& gx = ensure_grad(n.in0);
          const double gs = g(0, 0);
          for (std::size_t i = 0; i < gx.size(); ++i) gx.data()[i] += gs;
        }
        break;
      }
      case Op::kMeanAll: {
        if (at(n.in0).requires_grad) {
          Matrix& gx = ensure_grad(n.in0);
          const double gs = g(0, 0) / static_cast<double>(gx.size());
          for (std::size_t i = 0; i < gx.size(); ++i) gx.data()[i] += gs;
        }
        break;
      }
      case Op::kRowL2Normalize: {
        if (at(n.in0).requires_grad) {
          Matrix& gx = ensure_grad(n.in0);
          const Matrix& x = at(n.in0).value;
          const Matrix& y = n.value;
          for (std::size_t r = 0; r < x.rows(); ++r) {
            double sq = 0.0;
            for (std::size_t c = 0; c < x.cols(); ++c) sq += x(r, c) * x(r, c);
            const double norm = std::sqrt(sq);
            if (norm <= kNormEps) {
              // clamped branch: y = x / eps
              for (std::size_t c = 0; c < x.cols(); ++c) gx(r, c) += g(r, c) / kNormEps;
              continue;
            }
            double dot = 0.0;
            for (std::size_t c = 0; c < x.cols(); ++c) dot += g(r, c) * y(r, c);
            for (std::size_t c = 0; c < x.cols(); ++c)
              gx(r, c) += (g(r, c) - dot * y(r, c)) / norm;
          }
        }
        break;
      }
      case Op::kSoftmaxCrossEntropy: {
        if (at(n.in0).requires_grad) {
          Matrix& gx = ensure_grad(n.in0);
          const double gs = g(0, 0) / static_cast<double>(gx.rows());
          for (std::size_t r = 0; r < gx.rows(); ++r) {
            for (std::size_t c = 0; c < gx.cols(); ++c) {
              const double onehot =
                  (static_cast<std::size_t>(n.ids[r]) == c) ? 1.0 : 0.0;
              gx(r, c) += gs * (n.aux(r, c) - onehot);
            }
          }
        }
        break;
      }
    }
  }
}

}  // namespace snne
