#include "causalts/tape.hpp"

#include <cmath>
#include <numbers>

#include "causalts/errors.hpp"

namespace causalts {

int Tape::check(Var v) const {
    if (!v.valid() || v.i >= static_cast<int>(nodes_.size())) {
        throw NumericError("invalid tape handle");
    }
    return v.i;
}

Var Tape::push(Eigen::MatrixXd value, bool needs_grad, std::function<void(Tape&)> back) {
    Node node;
    node.val = std::move(value);
    node.needs_grad = needs_grad;
    if (needs_grad) node.back = std::move(back);
    nodes_.push_back(std::move(node));
    return Var{static_cast<int>(nodes_.size()) - 1};
}

Eigen::MatrixXd& Tape::grad_ref(int i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.grad.size() == 0) n.grad = Eigen::MatrixXd::Zero(n.val.rows(), n.val.cols());
    return n.grad;
}

const Eigen::MatrixXd& Tape::grad(Var v) { return grad_ref(check(v)); }

Var Tape::leaf(Eigen::MatrixXd value, bool needs_grad) {
    return push(std::move(value), needs_grad, nullptr);
}

void Tape::backward(Var loss) {
    int root = check(loss);
    const Node& ln = nodes_[static_cast<std::size_t>(root)];
    if (ln.val.rows() != 1 || ln.val.cols() != 1) {
        throw NumericError("backward() root must be a scalar node");
    }
    grad_ref(root)(0, 0) = 1.0;
    for (int i = root; i >= 0; --i) {
        Node& n = nodes_[static_cast<std::size_t>(i)];
        if (!n.needs_grad || n.grad.size() == 0 || !n.back) continue;
        if (check_finite && !n.grad.allFinite()) {
            throw NumericError("non-finite gradient at tape node " + std::to_string(i));
        }
        n.back(*this);
    }
}

Var Tape::matmul(Var a, Var b) {
    int ia = check(a);
    int ib = check(b);
    const Eigen::MatrixXd& va = nodes_[static_cast<std::size_t>(ia)].val;
    const Eigen::MatrixXd& vb = nodes_[static_cast<std::size_t>(ib)].val;
    if (va.cols() != vb.rows()) throw NumericError("matmul shape mismatch");
    bool ng = wants(a) || wants(b);
    Var out;
    out = push(va * vb, ng, [ia, ib, out_i = static_cast<int>(nodes_.size())](Tape& t) {
        const Eigen::MatrixXd& g = t.nodes_[static_cast<std::size_t>(out_i)].grad;
        if (t.nodes_[static_cast<std::size_t>(ia)].needs_grad) {
            t.grad_ref(ia) += g * t.nodes_[static_cast<std::size_t>(ib)].val.transpose();
        }
        if (t.nodes_[static_cast<std::size_t>(ib)].needs_grad) {
            t.grad_ref(ib) += t.nodes_[static_cast<std::size_t>(ia)].val.transpose() * g;
        }
    });
    return out;
}

Var Tape::add(Var a, Var b) {
    int ia = check(a);
    int ib = check(b);
    if (nodes_[static_cast<std::size_t>(ia)].val.rows() != nodes_[static_cast<std::size_t>(ib)].val.rows() ||
        nodes_[static_cast<std::size_t>(ia)].val.cols() != nodes_[static_cast<std::size_t>(ib)].val.cols()) {
        throw NumericError("add shape mismatch");
    }
    bool ng = wants(a) || wants(b);
    return push(nodes_[static_cast<std::size_t>(ia)].val + nodes_[static_cast<std::size_t>(ib)].val,
                ng, [ia, ib, out_i = static_cast<int>(nodes_.size())](Tape& t) {
                    const Eigen::MatrixXd& g = t.nodes_[static_cast<std::size_t>(out_i)].grad;
                    if (t.nodes_[static_cast<std::size_t>(ia)].needs_grad) t.grad_ref(ia) += g;
                    if (t.nodes_[static_cast<std::size_t>(ib)].needs_grad) t.grad_ref(ib) += g;
                });
}

Var Tape::sub(Var a, Var b) {
    int ia = check(a);
    int ib = check(b);
    bool ng = wants(a) || wants(b);
    return push(nodes_[static_cast<std::size_t>(ia)].val - nodes_[static_cast<std::size_t>(ib)].val,
                ng, [ia, ib, out_i = static_cast<int>(nodes_.size())](Tape& t) {
                    const Eigen::MatrixXd& g = t.nodes_[static_cast<std::size_t>(out_i)].grad;
                    if (t.nodes_[static_cast<std::size_t>(ia)].needs_grad) t.grad_ref(ia) += g;
                    if (t.nodes_[static_cast<std::size_t>(ib)].needs_grad) t.grad_ref(ib) -= g;
                });
}

Var Tape::cmul(Var a, Var b) {
    int ia = check(a);
    int ib = check(b);
    bool ng = wants(a) || wants(b);
    return push(nodes_[static_cast<std::size_t>(ia)].val.cwiseProduct(
                    nodes_[static_cast<std::size_t>(ib)].val),
                ng, [ia, ib, out_i = static_cast<int>(nodes_.size())](Tape& t) {
                    const Eigen::MatrixXd& g = t.nodes_[static_cast<std::size_t>(out_i)].grad;
                    if (t.nodes_[static_cast<std::size_t>(ia)].needs_grad) {
                        t.grad_ref(ia) += g.cwiseProduct(t.nodes_[static_cast<std::size_t>(ib)].val);
                    }
                    if (t.nodes_[static_cast<std::size_t>(ib)].needs_grad) {
                        t.grad_ref(ib) += g.cwiseProduct(t.nodes_[static_cast<std::size_t>(ia)].val);
                    }
                });
}

Var Tape::scale(Var a, double s) {
    int ia = check(a);
    return push(nodes_[static_cast<std::size_t>(ia)].val * s, wants(a),
                [ia, s, out_i = static_cast<int>(nodes_.size())](Tape& t) {
                    t.grad_ref(ia) += s * t.nodes_[static_cast<std::size_t>(out_i)].grad;
                });
}

Var Tape::add_rowvec(Var m, Var bias) {
    int im = check(m);
    int ib = check(bias);
    const Eigen::MatrixXd& vb = nodes_[static_cast<std::size_t>(ib)].val;
    if (vb.rows() != 1 || vb.cols() != nodes_[static_cast<std::size_t>(im)].val.cols()) {
        throw NumericError("add_rowvec bias must be 1 x cols");
    }
    bool ng = wants(m) || wants(bias);
    Eigen::MatrixXd out = nodes_[static_cast<std::size_t>(im)].val;
    out.rowwise() += vb.row(0);
    return push(std::move(out), ng, [im, ib, out_i = static_cast<int>(nodes_.size())](Tape& t) {
        const Eigen::MatrixXd& g = t.nodes_[static_cast<std::size_t>(out_i)].grad;
        if (t.nodes_[static_cast<std::size_t>(im)].needs_grad) t.grad_ref(im) += g;
        if (t.nodes_[static_cast<std::size_t>(ib)].needs_grad) {
            t.grad_ref(ib) += g.colwise().sum();
        }
    });
}

Var Tape::add_const(Var a, const Eigen::MatrixXd& c) {
    int ia = check(a);
    if (c.rows() != nodes_[static_cast<std::size_t>(ia)].val.rows() ||
        c.cols() != nodes_[static_cast<std::size_t>(ia)].val.cols()) {
        throw NumericError("add_const shape mismatch");
    }
    return push(nodes_[static_cast<std::size_t>(ia)].val + c, wants(a),
                [ia, out_i = static_cast<int>(nodes_.size())](Tape& t) {
                    t.grad_ref(ia) += t.nodes_[static_cast<std::size_t>(out_i)].grad;
                });
}

namespace {

inline double gelu_val(double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); }

inline double gelu_grad(double x) {
    double phi_cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
    double phi_pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    return phi_cdf + x * phi_pdf;
}

}  // namespace

Var Tape::gelu(Var a) {
    int ia = check(a);
    Eigen::MatrixXd out = nodes_[static_cast<std::size_t>(ia)].val.unaryExpr(
        [](double x) { return gelu_val(x); });
    return push(std::move(out), wants(a), [ia, out_i = static_cast<int>(nodes_.size())](Tape& t) {
        const Eigen::MatrixXd& g = t.nodes_[static_cast<std::size_t>(out_i)].grad;
        const Eigen::MatrixXd& x = t.nodes_[static_cast<std::size_t>(ia)].val;
        t.grad_ref(ia) += g.cwiseProduct(x.unaryExpr([](double v) { return gelu_grad(v); }));
    });
}

Var Tape::sigmoid(Var a) {
    int ia = check(a);
    Eigen::MatrixXd out = nodes_[static_cast<std::size_t>(ia)].val.unaryExpr(
        [](double x) { return 1.0 / (1.0 + std::exp(-x)); });
    return push(std::move(out), wants(a), [ia, out_i = static_cast<int>(nodes_.size())](Tape& t) {
        const Eigen::MatrixXd& g = t.nodes_[static_cast<std::size_t>(out_i)].grad;
        const Eigen::MatrixXd& s = t.nodes_[static_cast<std::size_t>(out_i)].val;
        t.grad_ref(ia) += g.cwiseProduct(s.cwiseProduct((1.0 - s.array()).matrix()));
    });
}

Var Tape::transpose(Var a) {
    int ia = check(a);
    return push(nodes_[static_cast<std::size_t>(ia)].val.transpose(), wants(a),
                [ia, out_i = static_cast<int>(nodes_.size())](Tape& t) {
                    t.grad_ref(ia) += t.nodes_[static_cast<std::size_t>(out_i)].grad.transpose();
                });
}

Var Tape::rows(Var a, int r0, int n) {
    int ia = check(a);
    const Eigen::MatrixXd& va = nodes_[static_cast<std::size_t>(ia)].val;
    if (r0 < 0 || n < 1 || r0 + n > va.rows()) throw NumericError("rows slice out of range");
    return push(va.middleRows(r0, n), wants(a),
                [ia, r0, n, out_i = static_cast<int>(nodes_.size())](Tape& t) {
                    t.grad_ref(ia).middleRows(r0, n) +=
                        t.nodes_[static_cast<std::size_t>(out_i)].grad;
                });
}

Var Tape::cols(Var a, int c0, int n) {
    int ia = check(a);
    const Eigen::MatrixXd& va = nodes_[static_cast<std::size_t>(ia)].val;
    if (c0 < 0 || n < 1 || c0 + n > va.cols()) throw NumericError("cols slice out of range");
    return push(va.middleCols(c0, n), wants(a),
                [ia, c0, n, out_i = static_cast<int>(nodes_.size())](Tape& t) {
                    t.grad_ref(ia).middleCols(c0, n) +=
                        t.nodes_[static_cast<std::size_t>(out_i)].grad;
                });
}

Var Tape::concat_rows(const std::vector<Var>& parts) {
    if (parts.empty()) throw NumericError("concat_rows needs at least one part");
    Eigen::Index total = 0;
    Eigen::Index cols_n = val(parts[0]).cols();
    bool ng = false;
    std::vector<int> idx;
    for (Var p : parts) {
        int ip = check(p);
        if (nodes_[static_cast<std::size_t>(ip)].val.cols() != cols_n) {
            throw NumericError("concat_rows column mismatch");
        }
        total += nodes_[static_cast<std::size_t>(ip)].val.rows();
        ng = ng || wants(p);
        idx.push_back(ip);
    }
    Eigen::MatrixXd out(total, cols_n);
    Eigen::Index r = 0;
    for (int ip : idx) {
        const Eigen::MatrixXd& v = nodes_[static_cast<std::size_t>(ip)].val;
        out.middleRows(r, v.rows()) = v;
        r += v.rows();
    }
    return push(std::move(out), ng, [idx, out_i = static_cast<int>(nodes_.size())](Tape& t) {
        const Eigen::MatrixXd& g = t.nodes_[static_cast<std::size_t>(out_i)].grad;
        Eigen::Index r0 = 0;
        for (int ip : idx) {
            Eigen::Index nr = t.nodes_[static_cast<std::size_t>(ip)].val.rows();
            if (t.nodes_[static_cast<std::size_t>(ip)].needs_grad) {
                t.grad_ref(ip) += g.middleRows(r0, nr);
            }
            r0 += nr;
        }
    });
}

Var Tape::concat_cols(const std::vector<Var>& parts) {
    if (parts.empty()) throw NumericError("concat_cols needs at least one part");
    Eigen::Index total = 0;
    Eigen::Index rows_n = val(parts[0]).rows();
    bool ng = false;
    std::vector<int> idx;
    for (Var p : parts) {
        int ip = check(p);
        if (nodes_[static_cast<std::size_t>(ip)].val.rows() != rows_n) {
            throw NumericError("concat_cols row mismatch");
        }
        total += nodes_[static_cast<std::size_t>(ip)].val.cols();
        ng = ng || wants(p);
        idx.push_back(ip);
    }
    Eigen::MatrixXd out(rows_n, total);
    Eigen::Index c = 0;
    for (int ip : idx) {
        const Eigen::MatrixXd& v = nodes_[static_cast<std::size_t>(ip)].val;
        out.middleCols(c, v.cols()) = v;
        c += v.cols();
    }
    return push(std::move(out), ng, [idx, out_i = static_cast<int>(nodes_.size())](Tape& t) {
        const Eigen::MatrixXd& g = t.nodes_[static_cast<std::size_t>(out_i)].grad;
        Eigen::Index c0 = 0;
        for (int ip : idx) {
            Eigen::Index nc = t.nodes_[static_cast<std::size_t>(ip)].val.cols();
            if (t.nodes_[static_cast<std::size_t>(ip)].needs_grad) {
                t.grad_ref(ip) += g.middleCols(c0, nc);
            }
            c0 += nc;
        }
    });
}

Var Tape::masked_softmax_rows(Var scores, Eigen::MatrixXi allow) {
    int is = check(scores);
    const Eigen::MatrixXd& s = nodes_[static_cast<std::size_t>(is)].val;
    if (allow.rows() != s.rows() || allow.cols() != s.cols()) {
        throw NumericError("softmax mask shape mismatch");
    }
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(s.rows(), s.cols());
    for (Eigen::Index r = 0; r < s.rows(); ++r) {
        double m = -std::numeric_limits<double>::infinity();
        for (Eigen::Index c = 0; c < s.cols(); ++c) {
            if (allow(r, c) != 0 && s(r, c) > m) m = s(r, c);
        }
        if (!std::isfinite(m)) continue;  // fully masked row stays zero
        double denom = 0.0;
        for (Eigen::Index c = 0; c < s.cols(); ++c) {
            if (allow(r, c) != 0) denom += std::exp(s(r, c) - m);
        }
        for (Eigen::Index c = 0; c < s.cols(); ++c) {
            if (allow(r, c) != 0) p(r, c) = std::exp(s(r, c) - m) / denom;
        }
    }
    return push(std::move(p), wants(scores),
                [is, out_i = static_cast<int>(nodes_.size())](Tape& t) {
                    const Eigen::MatrixXd& g = t.nodes_[static_cast<std::size_t>(out_i)].grad;
                    const Eigen::MatrixXd& p = t.nodes_[static_cast<std::size_t>(out_i)].val;
                    // dS = P o (dP - rowsum(dP o P)); masked entries have P = 0.
                    Eigen::VectorXd row_dot = g.cwiseProduct(p).rowwise().sum();
                    Eigen::MatrixXd adjusted = g.colwise() - row_dot;
                    t.grad_ref(is) += p.cwiseProduct(adjusted);
                });
}

Var Tape::layer_norm(Var x, Var gamma, Var beta, double eps) {
    int ix = check(x);
    int ig = check(gamma);
    int ib = check(beta);
    const Eigen::MatrixXd& v = nodes_[static_cast<std::size_t>(ix)].val;
    const Eigen::Index d = v.cols();
    if (nodes_[static_cast<std::size_t>(ig)].val.cols() != d ||
        nodes_[static_cast<std::size_t>(ib)].val.cols() != d) {
        throw NumericError("layer_norm gain/shift must be 1 x cols");
    }
    Eigen::VectorXd mean = v.rowwise().mean();
    Eigen::MatrixXd centered = v.colwise() - mean;
    Eigen::ArrayXd var = centered.array().square().rowwise().sum() / static_cast<double>(d);
    Eigen::VectorXd inv_std = (var + eps).sqrt().inverse().matrix();
    Eigen::MatrixXd xhat = (centered.array().colwise() * inv_std.array()).matrix();
    Eigen::RowVectorXd gam_row = nodes_[static_cast<std::size_t>(ig)].val.row(0);
    Eigen::RowVectorXd bet_row = nodes_[static_cast<std::size_t>(ib)].val.row(0);
    Eigen::MatrixXd out =
        ((xhat.array().rowwise() * gam_row.array()).rowwise() + bet_row.array()).matrix();
    bool ng = wants(x) || wants(gamma) || wants(beta);
    return push(std::move(out), ng,
                [ix, ig, ib, xhat = std::move(xhat), inv_std = std::move(inv_std),
                 out_i = static_cast<int>(nodes_.size())](Tape& t) {
                    const Eigen::MatrixXd& g = t.nodes_[static_cast<std::size_t>(out_i)].grad;
                    const Eigen::RowVectorXd gam =
                        t.nodes_[static_cast<std::size_t>(ig)].val.row(0);
                    if (t.nodes_[static_cast<std::size_t>(ig)].needs_grad) {
                        t.grad_ref(ig) += g.cwiseProduct(xhat).colwise().sum();
                    }
                    if (t.nodes_[static_cast<std::size_t>(ib)].needs_grad) {
                        t.grad_ref(ib) += g.colwise().sum();
                    }
                    if (t.nodes_[static_cast<std::size_t>(ix)].needs_grad) {
                        Eigen::MatrixXd dxhat = (g.array().rowwise() * gam.array()).matrix();
                        Eigen::VectorXd m1 = dxhat.rowwise().mean();
                        Eigen::VectorXd m2 = dxhat.cwiseProduct(xhat).rowwise().mean();
                        Eigen::MatrixXd scaled_xhat =
                            (xhat.array().colwise() * m2.array()).matrix();
                        Eigen::MatrixXd tmp = (dxhat.colwise() - m1) - scaled_xhat;
                        t.grad_ref(ix) +=
                            (tmp.array().colwise() * inv_std.array()).matrix();
                    }
                });
}

Var Tape::weighted_block_sum(Var blocks, Var w, int t_len) {
    int ib = check(blocks);
    int iw = check(w);
    const Eigen::MatrixXd& b = nodes_[static_cast<std::size_t>(ib)].val;
    const Eigen::MatrixXd& wv = nodes_[static_cast<std::size_t>(iw)].val;
    if (wv.cols() != 1 || b.rows() != wv.rows() * t_len) {
        throw NumericError("weighted_block_sum shape mismatch");
    }
    const int d_vars = static_cast<int>(wv.rows());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(t_len, b.cols());
    for (int j = 0; j < d_vars; ++j) {
        out += wv(j, 0) * b.middleRows(static_cast<Eigen::Index>(j) * t_len, t_len);
    }
    bool ng = wants(blocks) || wants(w);
    return push(std::move(out), ng,
                [ib, iw, t_len, d_vars, out_i = static_cast<int>(nodes_.size())](Tape& t) {
                    const Eigen::MatrixXd& g = t.nodes_[static_cast<std::size_t>(out_i)].grad;
                    const Eigen::MatrixXd& b = t.nodes_[static_cast<std::size_t>(ib)].val;
                    const Eigen::MatrixXd& wv = t.nodes_[static_cast<std::size_t>(iw)].val;
                    if (t.nodes_[static_cast<std::size_t>(ib)].needs_grad) {
                        Eigen::MatrixXd& gb = t.grad_ref(ib);
                        for (int j = 0; j < d_vars; ++j) {
                            gb.middleRows(static_cast<Eigen::Index>(j) * t_len, t_len) +=
                                wv(j, 0) * g;
                        }
                    }
                    if (t.nodes_[static_cast<std::size_t>(iw)].needs_grad) {
                        Eigen::MatrixXd& gw = t.grad_ref(iw);
                        for (int j = 0; j < d_vars; ++j) {
                            gw(j, 0) += b.middleRows(static_cast<Eigen::Index>(j) * t_len, t_len)
                                            .cwiseProduct(g)
                                            .sum();
                        }
                    }
                });
}

Var Tape::mean_pool_rows(Var a) {
    int ia = check(a);
    const Eigen::MatrixXd& v = nodes_[static_cast<std::size_t>(ia)].val;
    Eigen::MatrixXd out = v.colwise().mean();
    const double inv_n = 1.0 / static_cast<double>(v.rows());
    return push(std::move(out), wants(a),
                [ia, inv_n, out_i = static_cast<int>(nodes_.size())](Tape& t) {
                    const Eigen::MatrixXd& g = t.nodes_[static_cast<std::size_t>(out_i)].grad;
                    Eigen::MatrixXd& ga = t.grad_ref(ia);
                    ga += inv_n * g.row(0).replicate(ga.rows(), 1);
                });
}

Var Tape::stop_gradient(Var a) {
    int ia = check(a);
    Eigen::MatrixXd v = nodes_[static_cast<std::size_t>(ia)].val;
    if (replay_detached != nullptr) {
        if (replay_cursor_ >= replay_detached->size()) {
            throw NumericError("stop_gradient replay exhausted its recorded values");
        }
        const Eigen::MatrixXd& pinned = (*replay_detached)[replay_cursor_++];
        if (pinned.rows() != v.rows() || pinned.cols() != v.cols()) {
            throw NumericError("stop_gradient replay shape mismatch");
        }
        v = pinned;
    }
    if (record_detached != nullptr) {
        record_detached->push_back(v);
    }
    return push(std::move(v), false, nullptr);
}

Var Tape::mse_to(Var pred, const Eigen::MatrixXd& target) {
    int ip = check(pred);
    const Eigen::MatrixXd& v = nodes_[static_cast<std::size_t>(ip)].val;
    if (v.rows() != target.rows() || v.cols() != target.cols()) {
        throw NumericError("mse_to shape mismatch");
    }
    const double inv_n = 1.0 / static_cast<double>(v.size());
    Eigen::MatrixXd diff = v - target;
    Eigen::MatrixXd out(1, 1);
    out(0, 0) = diff.squaredNorm() * inv_n;
    return push(std::move(out), wants(pred),
                [ip, target, inv_n, out_i = static_cast<int>(nodes_.size())](Tape& t) {
                    double g = t.nodes_[static_cast<std::size_t>(out_i)].grad(0, 0);
                    t.grad_ref(ip) +=
                        (2.0 * inv_n * g) * (t.nodes_[static_cast<std::size_t>(ip)].val - target);
                });
}

Var Tape::bce_offdiag(Var logits, Eigen::MatrixXi mask, double eps) {
    int il = check(logits);
    const Eigen::MatrixXd& w = nodes_[static_cast<std::size_t>(il)].val;
    if (w.rows() != w.cols() || mask.rows() != w.rows() || mask.cols() != w.cols()) {
        throw NumericError("bce_offdiag needs square logits matching the mask");
    }
    const auto n = w.rows();
    const double cnt = static_cast<double>(n * (n - 1));
    if (cnt <= 0.0) throw NumericError("bce_offdiag needs at least 2 variables");
    double total = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            if (r == c) continue;
            double p = 1.0 / (1.0 + std::exp(-w(r, c)));
            p = std::min(std::max(p, eps), 1.0 - eps);
            double a = mask(r, c) != 0 ? 1.0 : 0.0;
            total += -(a * std::log(p) + (1.0 - a) * std::log(1.0 - p));
        }
    }
    Eigen::MatrixXd out(1, 1);
    out(0, 0) = total / cnt;
    return push(std::move(out), wants(logits),
                [il, mask = std::move(mask), eps, cnt,
                 out_i = static_cast<int>(nodes_.size())](Tape& t) {
                    double g = t.nodes_[static_cast<std::size_t>(out_i)].grad(0, 0);
                    const Eigen::MatrixXd& w = t.nodes_[static_cast<std::size_t>(il)].val;
                    Eigen::MatrixXd& gw = t.grad_ref(il);
                    for (Eigen::Index r = 0; r < w.rows(); ++r) {
                        for (Eigen::Index c = 0; c < w.cols(); ++c) {
                            if (r == c) continue;
                            double p = 1.0 / (1.0 + std::exp(-w(r, c)));
                            if (p <= eps || p >= 1.0 - eps) continue;  // clamped: no grad
                            double a = mask(r, c) != 0 ? 1.0 : 0.0;
                            gw(r, c) += g * (p - a) / cnt;
                        }
                    }
                });
}

}  // namespace causalts
