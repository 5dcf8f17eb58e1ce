#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace netinf::ad {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Handle into a Tape. Only valid for the tape that created it, until clear().
struct Var {
    int id = -1;
    bool valid() const { return id >= 0; }
};

enum class Op {
    Leaf,
    Add,
    Sub,
    Scale,
    MatMul,
    Hadamard,
    CwisePow,
    Sin,
    Exp,
    Tanh,
    Sigmoid,
    HardSigmoid,
    Trace,
    Transpose,
    DiagProduct,
    RowSum,
    NormL1,
    NormL2,
    Reshape,
};

const char* op_name(Op op);

double hard_sigmoid_scalar(double x);

// Record-and-replay reverse-mode tape over dense matrices. Append-only during
// the forward pass; gradients are accumulated in fixed reverse insertion
// order, so results are bitwise reproducible for identical inputs.
// One tape per training run, confined to a single thread.
class Tape {
public:
    // Leaf tensors must be finite; NaN/Inf is rejected here.
    Var leaf(const Mat& value, bool requires_grad = false);
    Var scalar(double value, bool requires_grad = false);

    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var scale(Var a, double s);
    Var matmul(Var a, Var b);
    Var hadamard(Var a, Var b);
    Var cwise_pow(Var a, double exponent);
    Var sin(Var a);
    Var exp(Var a);
    Var tanh(Var a);
    Var sigmoid(Var a);
    Var hard_sigmoid(Var a);
    Var trace(Var a);
    Var transpose(Var a);
    // diag(A*G) as a column vector; A is n x m, G is m x n.
    Var diag_product(Var a, Var g);
    Var row_sum(Var a);
    Var norm_l1(Var a);
    Var norm_l2(Var a);
    // Row-major reshape; element count must be preserved.
    Var reshape(Var a, Eigen::Index rows, Eigen::Index cols);

    const Mat& value(Var v) const;

    // Reverse pass from `result`, seeded with `seed` (same shape as the
    // result). Gradients of all requires_grad leaves are available through
    // grad() afterwards.
    void backward(Var result, const Mat& seed);
    void backward(Var result);  // scalar result, seed 1

    const Mat& grad(Var v) const;

    std::size_t size() const { return nodes_.size(); }
    void clear();

private:
    struct Node {
        Op op = Op::Leaf;
        int a = -1;
        int b = -1;
        double scalar = 0.0;
        Mat value;
        Mat grad;
        bool needs_grad = false;
    };

    Var push(Node&& node);
    const Node& at(Var v, const char* ctx) const;

    std::vector<Node> nodes_;
};

}  // namespace netinf::ad
