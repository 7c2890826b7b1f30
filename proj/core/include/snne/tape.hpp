#ifndef SNNE_TAPE_HPP
#define SNNE_TAPE_HPP

#include <cstddef>
#include <vector>

#include "snne/matrix.hpp"

namespace snne {

// Reverse-mode gradient tape for fixed feed-forward topologies.
//
// Values are computed eagerly as nodes are appended, so the node list is in
// topological order by construction. backward() walks it once in reverse and
// accumulates adjoints into every node whose subgraph contains a gradient
// leaf. A tape is single-use and single-threaded; build one per batch.
class Tape {
 public:
  using NodeId = int;

  // Leaves. Gradient leaves (parameters) get adjoint buffers in backward().
  NodeId leaf(Matrix value, bool requires_grad = false);

  // Linear algebra.
  NodeId matmul(NodeId a, NodeId b);
  NodeId matmul_nt(NodeId a, NodeId b);  // a * b^T
  NodeId add_row_vector(NodeId x, NodeId bias);  // (N x C) + (1 x C), broadcast over rows

  // Same-shape elementwise arithmetic.
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId div(NodeId a, NodeId b);

  // Affine by constants.
  NodeId scale(NodeId x, double c);
  NodeId add_scalar(NodeId x, double c);
  NodeId hadamard_const(NodeId x, Matrix weights);
  NodeId add_const(NodeId x, Matrix offset);

  // Elementwise nonlinearities.
  NodeId selu(NodeId x);
  NodeId softplus(NodeId x);
  NodeId exp(NodeId x);
  NodeId log(NodeId x);
  NodeId square(NodeId x);

  // Shape ops and reductions.
  NodeId column(NodeId x, std::size_t j);  // (N x C) -> (N x 1)
  NodeId row_sum(NodeId x);                // (N x C) -> (N x 1)
  NodeId sum_all(NodeId x);                // -> (1 x 1)
  NodeId mean_all(NodeId x);               // -> (1 x 1)

  // Rows scaled to unit L2 norm (norms below 1e-12 are clamped).
  NodeId row_l2_normalize(NodeId x);

  // Fused mean softmax cross-entropy over rows; class_ids index columns.
  NodeId softmax_crossentropy(NodeId logits, std::vector<int> class_ids);

  const Matrix& value(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  const Matrix& grad(NodeId id) const;
  bool requires_grad(NodeId id) const {
    return nodes_[static_cast<std::size_t>(id)].requires_grad;
  }
  std::size_t size() const { return nodes_.size(); }

  // Reverse accumulation from a scalar loss node. Call once per tape.
  void backward(NodeId loss);

 private:
  enum class Op {
    kLeaf,
    kMatMul,
    kMatMulNT,
    kAddRowVec,
    kAdd,
    kSub,
    kMul,
    kDiv,
    kScale,
    kAddScalar,
    kHadamardConst,
    kAddConst,
    kSelu,
    kSoftplus,
    kExp,
    kLog,
    kSquare,
    kColumn,
    kRowSum,
    kSumAll,
    kMeanAll,
    kRowL2Normalize,
    kSoftmaxCrossEntropy,
  };

  struct Node {
    Op op = Op::kLeaf;
    NodeId in0 = -1;
    NodeId in1 = -1;
    double c0 = 0.0;  // scale factor / added scalar / column index
    Matrix value;
    Matrix grad;     // allocated during backward for requires_grad nodes
    Matrix aux;      // constant payload (weights, offset, cached softmax)
    std::vector<int> ids;
    bool requires_grad = false;
  };

  NodeId push(Node n);
  Node& at(NodeId id) { return nodes_[static_cast<std::size_t>(id)]; }
  const Node& at(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
  void check_same_shape(NodeId a, NodeId b, const char* what) const;

  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

}  // namespace snne

#endif  // SNNE_TAPE_HPP
