#include "netinf/tape.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace netinf::ad {

const char* op_name(Op op) {
    switch (op) {
        case Op::Leaf: return "leaf";
        case Op::Add: return "add";
        case Op::Sub: return "sub";
        case Op::Scale: return "scale";
        case Op::MatMul: return "matmul";
        case Op::Hadamard: return "hadamard";
        case Op::CwisePow: return "cwise_pow";
        case Op::Sin: return "sin";
        case Op::Exp: return "exp";
        case Op::Tanh: return "tanh";
        case Op::Sigmoid: return "sigmoid";
        case Op::HardSigmoid: return "hard_sigmoid";
        case Op::Trace: return "trace";
        case Op::Transpose: return "transpose";
        case Op::DiagProduct: return "diag_product";
        case Op::RowSum: return "row_sum";
        case Op::NormL1: return "norm_l1";
        case Op::NormL2: return "norm_l2";
        case Op::Reshape: return "reshape";
    }
    return "?";
}

double hard_sigmoid_scalar(double x) {
    if (x <= -3.0) return 0.0;
    if (x >= 3.0) return 1.0;
    return x / 6.0 + 0.5;
}

namespace {

[[noreturn]] void shape_error(Op op, const Mat& a, const Mat& b) {
    std::ostringstream msg;
    msg << "tape: shape mismatch in op '" << op_name(op) << "': (" << a.rows()
        << "x" << a.cols() << ") vs (" << b.rows() << "x" << b.cols() << ")";
    throw std::invalid_argument(msg.str());
}

// Subgradient of the hard sigmoid: interior slope 1/6 at the kinks x = +-3.
double hard_sigmoid_slope(double x) {
    return (x >= -3.0 && x <= 3.0) ? 1.0 / 6.0 : 0.0;
}

Mat row_major_reshape(const Mat& m, Eigen::Index rows, Eigen::Index cols) {
    Mat out(rows, cols);
    const Eigen::Index c_in = m.cols();
    for (Eigen::Index k = 0; k < rows * cols; ++k)
        out(k / cols, k % cols) = m(k / c_in, k % c_in);
    return out;
}

}  // namespace

Var Tape::push(Node&& node) {
    nodes_.push_back(std::move(node));
    return Var{static_cast<int>(nodes_.size()) - 1};
}

const Tape::Node& Tape::at(Var v, const char* ctx) const {
    if (!v.valid() || static_cast<std::size_t>(v.id) >= nodes_.size()) {
        std::ostringstream msg;
        msg << "tape: " << ctx << ": handle " << v.id
            << " is not on this tape (tape size " << nodes_.size() << ")";
        throw std::invalid_argument(msg.str());
    }
    return nodes_[static_cast<std::size_t>(v.id)];
}

Var Tape::leaf(const Mat& value, bool requires_grad) {
    if (!value.allFinite())
        throw std::invalid_argument("tape: leaf tensor contains NaN/Inf");
    Node n;
    n.op = Op::Leaf;
    n.value = value;
    n.needs_grad = requires_grad;
    return push(std::move(n));
}

Var Tape::scalar(double value, bool requires_grad) {
    Mat m(1, 1);
    m(0, 0) = value;
    return leaf(m, requires_grad);
}

Var Tape::add(Var a, Var b) {
    const Node& na = at(a, "add");
    const Node& nb = at(b, "add");
    if (na.value.rows() != nb.value.rows() || na.value.cols() != nb.value.cols())
        shape_error(Op::Add, na.value, nb.value);
    Node n;
    n.op = Op::Add;
    n.a = a.id;
    n.b = b.id;
    n.value = na.value + nb.value;
    n.needs_grad = na.needs_grad || nb.needs_grad;
    return push(std::move(n));
}

Var Tape::sub(Var a, Var b) {
    const Node& na = at(a, "sub");
    const Node& nb = at(b, "sub");
    if (na.value.rows() != nb.value.rows() || na.value.cols() != nb.value.cols())
        shape_error(Op::Sub, na.value, nb.value);
    Node n;
    n.op = Op::Sub;
    n.a = a.id;
    n.b = b.id;
    n.value = na.value - nb.value;
    n.needs_grad = na.needs_grad || nb.needs_grad;
    return push(std::move(n));
}

Var Tape::scale(Var a, double s) {
    const Node& na = at(a, "scale");
    Node n;
    n.op = Op::Scale;
    n.a = a.id;
    n.scalar = s;
    n.value = s * na.value;
    n.needs_grad = na.needs_grad;
    return push(std::move(n));
}

Var Tape::matmul(Var a, Var b) {
    const Node& na = at(a, "matmul");
    const Node& nb = at(b, "matmul");
    if (na.value.cols() != nb.value.rows())
        shape_error(Op::MatMul, na.value, nb.value);
    Node n;
    n.op = Op::MatMul;
    n.a = a.id;
    n.b = b.id;
    n.value = na.value * nb.value;
    n.needs_grad = na.needs_grad || nb.needs_grad;
    return push(std::move(n));
}

Var Tape::hadamard(Var a, Var b) {
    const Node& na = at(a, "hadamard");
    const Node& nb = at(b, "hadamard");
    if (na.value.rows() != nb.value.rows() || na.value.cols() != nb.value.cols())
        shape_error(Op::Hadamard, na.value, nb.value);
    Node n;
    n.op = Op::Hadamard;
    n.a = a.id;
    n.b = b.id;
    n.value = na.value.cwiseProduct(nb.value);
    n.needs_grad = na.needs_grad || nb.needs_grad;
    return push(std::move(n));
}

Var Tape::cwise_pow(Var a, double exponent) {
    const Node& na = at(a, "cwise_pow");
    Node n;
    n.op = Op::CwisePow;
    n.a = a.id;
    n.scalar = exponent;
    n.value = na.value.array().pow(exponent).matrix();
    n.needs_grad = na.needs_grad;
    return push(std::move(n));
}

Var Tape::sin(Var a) {
    const Node& na = at(a, "sin");
    Node n;
    n.op = Op::Sin;
    n.a = a.id;
    n.value = na.value.array().sin().matrix();
    n.needs_grad = na.needs_grad;
    return push(std::move(n));
}

Var Tape::exp(Var a) {
    const Node& na = at(a, "exp");
    Node n;
    n.op = Op::Exp;
    n.a = a.id;
    n.value = na.value.array().exp().matrix();
    n.needs_grad = na.needs_grad;
    return push(std::move(n));
}

Var Tape::tanh(Var a) {
    const Node& na = at(a, "tanh");
    Node n;
    n.op = Op::Tanh;
    n.a = a.id;
    n.value = na.value.array().tanh().matrix();
    n.needs_grad = na.needs_grad;
    return push(std::move(n));
}

Var Tape::sigmoid(Var a) {
    const Node& na = at(a, "sigmoid");
    Node n;
    n.op = Op::Sigmoid;
    n.a = a.id;
    n.value = (1.0 / (1.0 + (-na.value.array()).exp())).matrix();
    n.needs_grad = na.needs_grad;
    return push(std::move(n));
}

Var Tape::hard_sigmoid(Var a) {
    const Node& na = at(a, "hard_sigmoid");
    Node n;
    n.op = Op::HardSigmoid;
    n.a = a.id;
    n.value = na.value.unaryExpr([](double x) { return hard_sigmoid_scalar(x); });
    n.needs_grad = na.needs_grad;
    return push(std::move(n));
}

Var Tape::trace(Var a) {
    const Node& na = at(a, "trace");
    if (na.value.rows() != na.value.cols())
        shape_error(Op::Trace, na.value, na.value);
    Node n;
    n.op = Op::Trace;
    n.a = a.id;
    n.value = Mat::Constant(1, 1, na.value.trace());
    n.needs_grad = na.needs_grad;
    return push(std::move(n));
}

Var Tape::transpose(Var a) {
    const Node& na = at(a, "transpose");
    Node n;
    n.op = Op::Transpose;
    n.a = a.id;
    n.value = na.value.transpose();
    n.needs_grad = na.needs_grad;
    return push(std::move(n));
}

Var Tape::diag_product(Var a, Var g) {
    const Node& na = at(a, "diag_product");
    const Node& ng = at(g, "diag_product");
    if (na.value.cols() != ng.value.rows() || na.value.rows() != ng.value.cols())
        shape_error(Op::DiagProduct, na.value, ng.value);
    Node n;
    n.op = Op::DiagProduct;
    n.a = a.id;
    n.b = g.id;
    const Eigen::Index rows = na.value.rows();
    Mat out(rows, 1);
    for (Eigen::Index i = 0; i < rows; ++i)
        out(i, 0) = na.value.row(i).dot(ng.value.col(i));
    n.value = out;
    n.needs_grad = na.needs_grad || ng.needs_grad;
    return push(std::move(n));
}

Var Tape::row_sum(Var a) {
    const Node& na = at(a, "row_sum");
    Node n;
    n.op = Op::RowSum;
    n.a = a.id;
    n.value = na.value.rowwise().sum();
    n.needs_grad = na.needs_grad;
    return push(std::move(n));
}

Var Tape::norm_l1(Var a) {
    const Node& na = at(a, "norm_l1");
    Node n;
    n.op = Op::NormL1;
    n.a = a.id;
    n.value = Mat::Constant(1, 1, na.value.array().abs().sum());
    n.needs_grad = na.needs_grad;
    return push(std::move(n));
}

Var Tape::norm_l2(Var a) {
    const Node& na = at(a, "norm_l2");
    Node n;
    n.op = Op::NormL2;
    n.a = a.id;
    n.value = Mat::Constant(1, 1, na.value.norm());
    n.needs_grad = na.needs_grad;
    return push(std::move(n));
}

Var Tape::reshape(Var a, Eigen::Index rows, Eigen::Index cols) {
    const Node& na = at(a, "reshape");
    if (na.value.size() != rows * cols) {
        std::ostringstream msg;
        msg << "tape: reshape: cannot view (" << na.value.rows() << "x"
            << na.value.cols() << ") as (" << rows << "x" << cols << ")";
        throw std::invalid_argument(msg.str());
    }
    Node n;
    n.op = Op::Reshape;
    n.a = a.id;
    n.value = row_major_reshape(na.value, rows, cols);
    n.needs_grad = na.needs_grad;
    return push(std::move(n));
}

const Mat& Tape::value(Var v) const { return at(v, "value").value; }

const Mat& Tape::grad(Var v) const {
    const Node& n = at(v, "grad");
    if (n.grad.size() == 0)
        throw std::logic_error("tape: grad requested before backward reached this node");
    return n.grad;
}

void Tape::backward(Var result) { backward(result, Mat::Constant(1, 1, 1.0)); }

void Tape::backward(Var result, const Mat& seed) {
    if (nodes_.empty())
        throw std::logic_error("tape: backward on an empty/cleared tape");
    const Node& res = at(result, "backward");
    if (seed.rows() != res.value.rows() || seed.cols() != res.value.cols())
        shape_error(res.op, seed, res.value);

    for (Node& n : nodes_) n.grad.resize(0, 0);
    nodes_[static_cast<std::size_t>(result.id)].grad = seed;

    auto accum = [&](int id, const Mat& g) {
        Node& n = nodes_[static_cast<std::size_t>(id)];
        if (!n.needs_grad) return;
        if (n.grad.size() == 0)
            n.grad = Mat::Zero(n.value.rows(), n.value.cols());
        n.grad += g;
    };

    for (int id = result.id; id >= 0; --id) {
        Node& n = nodes_[static_cast<std::size_t>(id)];
        if (n.grad.size() == 0 || !n.needs_grad) continue;
        const Mat& g = n.grad;
        switch (n.op) {
            case Op::Leaf:
                break;
            case Op::Add:
                accum(n.a, g);
                accum(n.b, g);
                break;
            case Op::Sub:
                accum(n.a, g);
                accum(n.b, -g);
                break;
            case Op::Scale:
                accum(n.a, n.scalar * g);
                break;
            case Op::MatMul:
                accum(n.a, g * nodes_[n.b].value.transpose());
                accum(n.b, nodes_[n.a].value.transpose() * g);
                break;
            case Op::Hadamard:
                accum(n.a, g.cwiseProduct(nodes_[n.b].value));
                accum(n.b, g.cwiseProduct(nodes_[n.a].value));
                break;
            case Op::CwisePow: {
                // d/dx x^p = p x^(p-1); at x == 0 with p < 1 the derivative
                // blows up, so the contribution is zeroed (norm-at-zero
                // convention).
                const double p = n.scalar;
                const Mat& x = nodes_[n.a].value;
                Mat dx = x.unaryExpr([p](double v) {
                    if (v == 0.0 && p < 1.0) return 0.0;
                    return p * std::pow(v, p - 1.0);
                });
                accum(n.a, g.cwiseProduct(dx));
                break;
            }
            case Op::Sin:
                accum(n.a, g.cwiseProduct(nodes_[n.a].value.array().cos().matrix()));
                break;
            case Op::Exp:
                accum(n.a, g.cwiseProduct(n.value));
                break;
            case Op::Tanh:
                accum(n.a, g.cwiseProduct((1.0 - n.value.array().square()).matrix()));
                break;
            case Op::Sigmoid:
                accum(n.a, g.cwiseProduct((n.value.array() * (1.0 - n.value.array())).matrix()));
                break;
            case Op::HardSigmoid:
                accum(n.a, g.cwiseProduct(nodes_[n.a].value.unaryExpr(
                               [](double x) { return hard_sigmoid_slope(x); })));
                break;
            case Op::Trace:
                accum(n.a, g(0, 0) * Mat::Identity(nodes_[n.a].value.rows(),
                                                   nodes_[n.a].value.cols()));
                break;
            case Op::Transpose:
                accum(n.a, g.transpose());
                break;
            case Op::DiagProduct: {
                const Mat& A = nodes_[n.a].value;
                const Mat& G = nodes_[n.b].value;
                // r_i = sum_j A_ij G_ji
                accum(n.a, g.col(0).asDiagonal() * G.transpose());
                accum(n.b, (g.col(0).asDiagonal() * A).transpose());
                break;
            }
            case Op::RowSum:
                accum(n.a, g.col(0) * Eigen::RowVectorXd::Ones(nodes_[n.a].value.cols()));
                break;
            case Op::NormL1: {
                const Mat& x = nodes_[n.a].value;
                accum(n.a, g(0, 0) * x.unaryExpr([](double v) {
                    return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
                }));
                break;
            }
            case Op::NormL2: {
                const double norm = n.value(0, 0);
                if (norm > 0.0)
                    accum(n.a, (g(0, 0) / norm) * nodes_[n.a].value);
                else
                    accum(n.a, Mat::Zero(nodes_[n.a].value.rows(), nodes_[n.a].value.cols()));
                break;
            }
            case Op::Reshape: {
                const Eigen::Index r = nodes_[n.a].value.rows();
                const Eigen::Index c = nodes_[n.a].value.cols();
                accum(n.a, row_major_reshape(g, r, c));
                break;
            }
        }
    }
}

void Tape::clear() { nodes_.clear(); }

}  // namespace netinf::ad
