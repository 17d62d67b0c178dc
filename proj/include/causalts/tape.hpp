#ifndef CAUSALTS_TAPE_HPP
#define CAUSALTS_TAPE_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace causalts {

// Handle into a Tape. Default-constructed handles are invalid.
struct Var {
    int i = -1;
    bool valid() const { return i >= 0; }
};

// Reverse-mode autodiff over an explicit computation graph of dense matrices.
// Nodes are appended in evaluation order (which is already a topological
// order), so backward() is a single reverse sweep. Scalars are 1x1 matrices.
// The tape is rebuilt for every forward pass; closures capture only indices
// and small cached values, never references into the node vector.
class Tape {
public:
    Tape() { nodes_.reserve(1024); }
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var leaf(Eigen::MatrixXd value, bool needs_grad = false);

    const Eigen::MatrixXd& val(Var v) const { return nodes_[check(v)].val; }
    // Valid after backward(); zero matrix when the node was never reached.
    const Eigen::MatrixXd& grad(Var v);

    std::size_t size() const { return nodes_.size(); }

    // Seeds d(loss)/d(loss) = 1 and sweeps the tape in reverse. `loss` must be
    // 1x1. Every entry of every node is checked finite on the way down when
    // check_finite was set (used by tests).
    void backward(Var loss);

    Var matmul(Var a, Var b);
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var cmul(Var a, Var b);
    Var scale(Var a, double s);
    // m + bias broadcast over rows; bias is 1 x cols.
    Var add_rowvec(Var m, Var bias);
    Var add_const(Var a, const Eigen::MatrixXd& c);
    Var gelu(Var a);
    Var sigmoid(Var a);
    Var transpose(Var a);
    Var rows(Var a, int r0, int n);
    Var cols(Var a, int c0, int n);
    Var concat_rows(const std::vector<Var>& parts);
    Var concat_cols(const std::vector<Var>& parts);

    // Row-wise softmax restricted to entries with allow != 0. Masked entries
    // are exactly zero in the output and receive no probability mass, so
    // changing a masked score cannot change the row (bitwise). A row with no
    // allowed entry becomes all zeros.
    Var masked_softmax_rows(Var scores, Eigen::MatrixXi allow);

    // Per-row layer normalization with learned gain/shift (1 x cols each).
    Var layer_norm(Var x, Var gamma, Var beta, double eps = 1e-5);

    // blocks is (D*t_len) x d, w is D x 1; returns sum_j w(j) * blocks[j] where
    // blocks[j] is the j-th t_len x d block. The adapter aggregation step.
    Var weighted_block_sum(Var blocks, Var w, int t_len);

    // Column means as a 1 x d row.
    Var mean_pool_rows(Var a);

    // Identity value; gradient does not flow to the argument.
    //
    // Finite-difference support: the gradient that backward() reports treats
    // every stop_gradient output as a constant, so a numeric check must hold
    // those values fixed while it perturbs parameters. When record_detached
    // is set, each stop_gradient output is appended to it in call order; when
    // replay_detached is set, outputs are substituted from it instead of
    // recomputed. Graph construction must be deterministic between the
    // recording and replaying passes (it is: the model builds its loss in a
    // fixed order).
    Var stop_gradient(Var a);

    std::vector<Eigen::MatrixXd>* record_detached = nullptr;
    const std::vector<Eigen::MatrixXd>* replay_detached = nullptr;

    // Mean squared error against a constant target of the same shape. Scalar.
    Var mse_to(Var pred, const Eigen::MatrixXd& target);

    // Mean over off-diagonal entries of the binary cross-entropy between
    // sigmoid(logits) and the 0/1 mask, with probabilities clamped to
    // [eps, 1-eps]. Scalar. Clamped entries contribute zero gradient.
    Var bce_offdiag(Var logits, Eigen::MatrixXi mask, double eps = 1e-7);

    bool check_finite = false;

private:
    struct Node {
        Eigen::MatrixXd val;
        Eigen::MatrixXd grad;  // empty until touched
        bool needs_grad = false;
        std::function<void(Tape&)> back;
    };

    int check(Var v) const;
    Var push(Eigen::MatrixXd value, bool needs_grad, std::function<void(Tape&)> back);
    Eigen::MatrixXd& grad_ref(int i);
    bool wants(Var v) const { return nodes_[static_cast<std::size_t>(v.i)].needs_grad; }

    std::vector<Node> nodes_;
    std::size_t replay_cursor_ = 0;
};

}  // namespace causalts

#endif
