#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "defcon/rng.hpp"

namespace defcon::nn {

inline constexpr double kProbClamp = 1e-7;

struct Tensor {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Tensor() = default;
    Tensor(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
    std::size_t size() const { return v.size(); }
    void zero() { std::fill(v.begin(), v.end(), 0.0); }
};

// Named parameter arrays with matching gradient buffers. std::map keeps the
// iteration order deterministic for checkpointing and reductions.
struct ParamStore {
    std::map<std::string, Tensor> params;
    std::map<std::string, Tensor> grads;

    Tensor& add(const std::string& name, int rows, int cols) {
        auto [it, inserted] = params.emplace(name, Tensor(rows, cols));
        if (!inserted) throw std::runtime_error("duplicate parameter: " + name);
        grads.emplace(name, Tensor(rows, cols));
        return it->second;
    }

    Tensor& get(const std::string& name) {
        auto it = params.find(name);
        if (it == params.end()) throw std::runtime_error("unknown parameter: " + name);
        return it->second;
    }

    Tensor& grad(const std::string& name) { return grads.at(name); }

    void zero_grads() {
        for (auto& [k, g] : grads) g.zero();
    }

    void glorot_init(Rng& rng) {
        for (auto& [k, t] : params) {
            const double scale = std::sqrt(6.0 / static_cast<double>(t.rows + t.cols));
            const bool is_bias = t.rows == 1 && k.find("bias") != std::string::npos;
            for (double& x : t.v) x = is_bias ? 0.0 : rng.uniform(-scale, scale);
        }
    }
};

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

class AdamOptimizer {
public:
    explicit AdamOptimizer(AdamConfig cfg = {}) : cfg_(cfg) {}

    void set_learning_rate(double lr) { cfg_.learning_rate = lr; }
    double learning_rate() const { return cfg_.learning_rate; }

    void step(ParamStore& store) {
        ++t_;
        const double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
        const double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
        for (auto& [name, p] : store.params) {
            const Tensor& g = store.grads.at(name);
            for (double x : g.v)
                if (!std::isfinite(x))
                    throw std::runtime_error("NaN/Inf gradient in parameter " + name);
            Tensor& m = m_[name].rows ? m_[name] : (m_[name] = Tensor(p.rows, p.cols));
            Tensor& v = v_[name].rows ? v_[name] : (v_[name] = Tensor(p.rows, p.cols));
            for (std::size_t i = 0; i < p.size(); ++i) {
                m.v[i] = cfg_.beta1 * m.v[i] + (1.0 - cfg_.beta1) * g.v[i];
                v.v[i] = cfg_.beta2 * v.v[i] + (1.0 - cfg_.beta2) * g.v[i] * g.v[i];
                const double mhat = m.v[i] / bc1;
                const double vhat = v.v[i] / bc2;
                p.v[i] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.epsilon);
            }
        }
    }

private:
    AdamConfig cfg_;
    long t_ = 0;
    std::map<std::string, Tensor> m_, v_;
};

// Reverse-mode tape over matrix operations.
class Tape {
public:
    using Var = int;

    Var input(Tensor t) { return push(std::move(t), nullptr, {}); }

    // Leaf tied to a parameter; backward accumulates into the store's grad.
    Var param(ParamStore& store, const std::string& name) {
        Tensor* g = &store.grad(name);
        Var id = push(store.get(name), nullptr, {});
        nodes_[id].external_grad = g;
        return id;
    }

    const Tensor& value(Var x) const { return nodes_[x].value; }
    const Tensor& grad(Var x) const { return nodes_[x].grad; }

    Var matmul(Var a, Var b) {
        const Tensor& A = val(a);
        const Tensor& B = val(b);
        if (A.cols != B.rows) throw std::runtime_error("matmul: dimension mismatch");
        Tensor Y(A.rows, B.cols);
        for (int i = 0; i < A.rows; ++i) {
            const double* arow = &A.v[static_cast<std::size_t>(i) * A.cols];
            double* yrow = &Y.v[static_cast<std::size_t>(i) * B.cols];
            for (int k = 0; k < A.cols; ++k) {
                const double aik = arow[k];
                if (aik == 0.0) continue;
                const double* brow = &B.v[static_cast<std::size_t>(k) * B.cols];
                for (int j = 0; j < B.cols; ++j) yrow[j] += aik * brow[j];
            }
        }
        return push(std::move(Y), [a, b](Tape& t, const Node& n) {
            const Tensor& A = t.val(a);
            const Tensor& B = t.val(b);
            Tensor& dA = t.nodes_[a].grad;
            Tensor& dB = t.nodes_[b].grad;
            // dA += dY B^T
            for (int i = 0; i < A.rows; ++i)
                for (int k = 0; k < A.cols; ++k) {
                    double s = 0.0;
                    const double* dyrow = &n.grad.v[static_cast<std::size_t>(i) * B.cols];
                    const double* brow = &B.v[static_cast<std::size_t>(k) * B.cols];
                    for (int j = 0; j < B.cols; ++j) s += dyrow[j] * brow[j];
                    dA.at(i, k) += s;
                }
            // dB += A^T dY
            for (int k = 0; k < B.rows; ++k)
                for (int i = 0; i < A.rows; ++i) {
                    const double aik = A.at(i, k);
                    if (aik == 0.0) continue;
                    const double* dyrow = &n.grad.v[static_cast<std::size_t>(i) * B.cols];
                    double* dbrow = &dB.v[static_cast<std::size_t>(k) * B.cols];
                    for (int j = 0; j < B.cols; ++j) dbrow[j] += aik * dyrow[j];
                }
        });
    }

    Var add(Var a, Var b) {
        const Tensor& A = val(a);
        const Tensor& B = val(b);
        if (A.rows != B.rows || A.cols != B.cols) throw std::runtime_error("add: shape mismatch");
        Tensor Y = A;
        for (std::size_t i = 0; i < Y.size(); ++i) Y.v[i] += B.v[i];
        return push(std::move(Y), [a, b](Tape& t, const Node& n) {
            for (std::size_t i = 0; i < n.grad.size(); ++i) {
                t.nodes_[a].grad.v[i] += n.grad.v[i];
                t.nodes_[b].grad.v[i] += n.grad.v[i];
            }
        });
    }

    // Broadcast a 1 x C bias over the rows of X.
    Var add_bias(Var x, Var bias) {
        const Tensor& X = val(x);
        const Tensor& B = val(bias);
        if (B.rows != 1 || B.cols != X.cols) throw std::runtime_error("add_bias: shape mismatch");
        Tensor Y = X;
        for (int i = 0; i < X.rows; ++i)
            for (int j = 0; j < X.cols; ++j) Y.at(i, j) += B.at(0, j);
        return push(std::move(Y), [x, bias](Tape& t, const Node& n) {
            Tensor& dX = t.nodes_[x].grad;
            Tensor& dB = t.nodes_[bias].grad;
            for (int i = 0; i < n.grad.rows; ++i)
                for (int j = 0; j < n.grad.cols; ++j) {
                    dX.at(i, j) += n.grad.at(i, j);
                    dB.at(0, j) += n.grad.at(i, j);
                }
        });
    }

    Var scale(Var x, double s) {
        Tensor Y = val(x);
        for (double& v : Y.v) v *= s;
        return push(std::move(Y), [x, s](Tape& t, const Node& n) {
            for (std::size_t i = 0; i < n.grad.size(); ++i)
                t.nodes_[x].grad.v[i] += s * n.grad.v[i];
        });
    }

    Var leaky_relu(Var x, double slope) {
        const Tensor& X = val(x);
        Tensor Y = X;
        for (double& v : Y.v) v = v > 0.0 ? v : slope * v;
        return push(std::move(Y), [x, slope](Tape& t, const Node& n) {
            const Tensor& X = t.val(x);
            for (std::size_t i = 0; i < n.grad.size(); ++i)
                t.nodes_[x].grad.v[i] += (X.v[i] > 0.0 ? 1.0 : slope) * n.grad.v[i];
        });
    }

    Var elu(Var x) {
        const Tensor& X = val(x);
        Tensor Y = X;
        for (double& v : Y.v) v = v > 0.0 ? v : std::expm1(v);
        return push(std::move(Y), [x](Tape& t, const Node& n) {
            const Tensor& X = t.val(x);
            for (std::size_t i = 0; i < n.grad.size(); ++i) {
                const double d = X.v[i] > 0.0 ? 1.0 : std::exp(X.v[i]);
                t.nodes_[x].grad.v[i] += d * n.grad.v[i];
            }
        });
    }

    Var sigmoid(Var x) {
        const Tensor& X = val(x);
        Tensor Y = X;
        for (double& v : Y.v) v = 1.0 / (1.0 + std::exp(-v));
        const Tensor cached = Y;
        return push(std::move(Y), [x, cached](Tape& t, const Node& n) {
            for (std::size_t i = 0; i < n.grad.size(); ++i) {
                const double s = cached.v[i];
                t.nodes_[x].grad.v[i] += s * (1.0 - s) * n.grad.v[i];
            }
        });
    }

    Var concat_cols(const std::vector<Var>& xs) {
        if (xs.empty()) throw std::runtime_error("concat_cols: empty");
        int rows = val(xs[0]).rows;
        int cols = 0;
        for (Var x : xs) {
            if (val(x).rows != rows) throw std::runtime_error("concat_cols: row mismatch");
            cols += val(x).cols;
        }
        Tensor Y(rows, cols);
        int off = 0;
        for (Var x : xs) {
            const Tensor& X = val(x);
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < X.cols; ++j) Y.at(i, off + j) = X.at(i, j);
            off += X.cols;
        }
        return push(std::move(Y), [xs](Tape& t, const Node& n) {
            int off = 0;
            for (Var x : xs) {
                Tensor& dX = t.nodes_[x].grad;
                for (int i = 0; i < dX.rows; ++i)
                    for (int j = 0; j < dX.cols; ++j) dX.at(i, j) += n.grad.at(i, off + j);
                off += dX.cols;
            }
        });
    }

    Var gather_rows(Var x, std::vector<int> idx) {
        const Tensor& X = val(x);
        Tensor Y(static_cast<int>(idx.size()), X.cols);
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (int j = 0; j < X.cols; ++j) Y.at(static_cast<int>(i), j) = X.at(idx[i], j);
        return push(std::move(Y), [x, idx = std::move(idx)](Tape& t, const Node& n) {
            Tensor& dX = t.nodes_[x].grad;
            for (std::size_t i = 0; i < idx.size(); ++i)
                for (int j = 0; j < dX.cols; ++j)
                    dX.at(idx[i], j) += n.grad.at(static_cast<int>(i), j);
        });
    }

    // Softmax of a column vector of scores over segments (e.g. incoming edges
    // grouped by destination node). Scores must be |E| x 1.
    Var segment_softmax(Var scores, std::vector<int> segment, int num_segments) {
        const Tensor& S = val(scores);
        if (S.cols != 1) throw std::runtime_error("segment_softmax: expected column vector");
        Tensor Y(S.rows, 1);
        std::vector<double> maxv(num_segments, -1e300), sum(num_segments, 0.0);
        for (int i = 0; i < S.rows; ++i) maxv[segment[i]] = std::max(maxv[segment[i]], S.v[i]);
        for (int i = 0; i < S.rows; ++i) {
            Y.v[i] = std::exp(S.v[i] - maxv[segment[i]]);
            sum[segment[i]] += Y.v[i];
        }
        for (int i = 0; i < S.rows; ++i) Y.v[i] /= sum[segment[i]];
        const Tensor cached = Y;
        return push(std::move(Y),
                    [scores, segment = std::move(segment), num_segments, cached](Tape& t,
                                                                                 const Node& n) {
                        std::vector<double> dot(num_segments, 0.0);
                        for (int i = 0; i < n.grad.rows; ++i)
                            dot[segment[i]] += n.grad.v[i] * cached.v[i];
                        Tensor& dS = t.nodes_[scores].grad;
                        for (int i = 0; i < n.grad.rows; ++i)
                            dS.v[i] += cached.v[i] * (n.grad.v[i] - dot[segment[i]]);
                    });
    }

    // out[v] = sum over edges e with dst[e] == v of alpha[e] * Z[src[e]].
    Var attention_aggregate(Var alpha, Var z, std::vector<int> src, std::vector<int> dst,
                            int num_nodes) {
        const Tensor& A = val(alpha);
        const Tensor& Z = val(z);
        if (A.cols != 1 || A.rows != static_cast<int>(src.size()))
            throw std::runtime_error("attention_aggregate: bad alpha shape");
        Tensor Y(num_nodes, Z.cols);
        for (std::size_t e = 0; e < src.size(); ++e) {
            const double a = A.v[e];
            const double* zrow = &Z.v[static_cast<std::size_t>(src[e]) * Z.cols];
            double* yrow = &Y.v[static_cast<std::size_t>(dst[e]) * Z.cols];
            for (int j = 0; j < Z.cols; ++j) yrow[j] += a * zrow[j];
        }
        return push(std::move(Y), [alpha, z, src = std::move(src), dst = std::move(dst)](
                                      Tape& t, const Node& n) {
            const Tensor& A = t.val(alpha);
            const Tensor& Z = t.val(z);
            Tensor& dA = t.nodes_[alpha].grad;
            Tensor& dZ = t.nodes_[z].grad;
            for (std::size_t e = 0; e < src.size(); ++e) {
                const double* dyrow = &n.grad.v[static_cast<std::size_t>(dst[e]) * Z.cols];
                const double* zrow = &Z.v[static_cast<std::size_t>(src[e]) * Z.cols];
                double* dzrow = &dZ.v[static_cast<std::size_t>(src[e]) * Z.cols];
                double s = 0.0;
                for (int j = 0; j < Z.cols; ++j) {
                    s += dyrow[j] * zrow[j];
                    dzrow[j] += A.v[e] * dyrow[j];
                }
                dA.v[e] += s;
            }
        });
    }

    Var mean_rows(Var x) {
        const Tensor& X = val(x);
        Tensor Y(1, X.cols);
        for (int i = 0; i < X.rows; ++i)
            for (int j = 0; j < X.cols; ++j) Y.at(0, j) += X.at(i, j);
        for (double& v : Y.v) v /= X.rows;
        const int rows = X.rows;
        return push(std::move(Y), [x, rows](Tape& t, const Node& n) {
            Tensor& dX = t.nodes_[x].grad;
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < dX.cols; ++j) dX.at(i, j) += n.grad.at(0, j) / rows;
        });
    }

    // Softmax of logits (|V| x 1) restricted to the rows where mask is true;
    // other rows get probability exactly 0.
    Var masked_softmax(Var logits, const std::vector<char>& mask) {
        const Tensor& L = val(logits);
        if (L.cols != 1) throw std::runtime_error("masked_softmax: expected column vector");
        Tensor Y(L.rows, 1);
        double maxv = -1e300;
        bool any = false;
        for (int i = 0; i < L.rows; ++i)
            if (mask[i]) {
                maxv = std::max(maxv, L.v[i]);
                any = true;
            }
        if (!any) throw std::runtime_error("masked_softmax: empty mask");
        double sum = 0.0;
        for (int i = 0; i < L.rows; ++i) {
            if (!mask[i]) continue;
            Y.v[i] = std::exp(L.v[i] - maxv);
            sum += Y.v[i];
        }
        for (int i = 0; i < L.rows; ++i) Y.v[i] /= sum;
        const Tensor cached = Y;
        return push(std::move(Y), [logits, mask, cached](Tape& t, const Node& n) {
            double dot = 0.0;
            for (int i = 0; i < n.grad.rows; ++i)
                if (mask[i]) dot += n.grad.v[i] * cached.v[i];
            Tensor& dL = t.nodes_[logits].grad;
            for (int i = 0; i < n.grad.rows; ++i)
                if (mask[i]) dL.v[i] += cached.v[i] * (n.grad.v[i] - dot);
        });
    }

    // -log(probs[row, col]) with floor clamping.
    Var neg_log_pick(Var probs, int row, int col) {
        const Tensor& P = val(probs);
        const double p = std::max(P.at(row, col), kProbClamp);
        Tensor Y(1, 1);
        Y.v[0] = -std::log(p);
        return push(std::move(Y), [probs, row, col](Tape& t, const Node& n) {
            const double p = std::max(t.val(probs).at(row, col), kProbClamp);
            if (t.val(probs).at(row, col) > kProbClamp)
                t.nodes_[probs].grad.at(row, col) += -n.grad.v[0] / p;
        });
    }

    // Binary cross-entropy of a single probability entry against label y.
    Var bce_pick(Var probs, int row, int col, double y) {
        const Tensor& P = val(probs);
        const double p = std::clamp(P.at(row, col), kProbClamp, 1.0 - kProbClamp);
        Tensor Y(1, 1);
        Y.v[0] = -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
        return push(std::move(Y), [probs, row, col, y](Tape& t, const Node& n) {
            const double raw = t.val(probs).at(row, col);
            const double p = std::clamp(raw, kProbClamp, 1.0 - kProbClamp);
            if (raw > kProbClamp && raw < 1.0 - kProbClamp)
                t.nodes_[probs].grad.at(row, col) += (-y / p + (1.0 - y) / (1.0 - p)) * n.grad.v[0];
        });
    }

    Var add_scalars(const std::vector<Var>& xs) {
        Tensor Y(1, 1);
        for (Var x : xs) Y.v[0] += val(x).v[0];
        return push(std::move(Y), [xs](Tape& t, const Node& n) {
            for (Var x : xs) t.nodes_[x].grad.v[0] += n.grad.v[0];
        });
    }

    Var sum_all(Var x) {
        const Tensor& X = val(x);
        Tensor Y(1, 1);
        for (double v : X.v) Y.v[0] += v;
        return push(std::move(Y), [x](Tape& t, const Node& n) {
            for (double& g : t.nodes_[x].grad.v) g += n.grad.v[0];
        });
    }

    // Reverse pass from a scalar loss. Accumulates into any parameter leaves.
    void backward(Var loss) {
        const Tensor& L = val(loss);
        if (L.rows != 1 || L.cols != 1) throw std::runtime_error("backward: loss must be scalar");
        for (auto& n : nodes_) n.grad = Tensor(n.value.rows, n.value.cols);
        nodes_[loss].grad.v[0] = 1.0;
        for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
            Node& n = nodes_[i];
            if (n.backward) n.backward(*this, n);
            if (n.external_grad)
                for (std::size_t k = 0; k < n.grad.size(); ++k)
                    n.external_grad->v[k] += n.grad.v[k];
        }
    }

private:
    struct Node {
        Tensor value;
        Tensor grad;
        std::function<void(Tape&, const Node&)> backward;
        Tensor* external_grad = nullptr;
    };

    const Tensor& val(Var x) const { return nodes_[x].value; }

    Var push(Tensor t, std::function<void(Tape&, const Node&)> bwd,
             std::initializer_list<int> = {}) {
        Node n;
        n.value = std::move(t);
        n.backward = std::move(bwd);
        nodes_.push_back(std::move(n));
        return static_cast<Var>(nodes_.size() - 1);
    }

    std::vector<Node> nodes_;
};

// Plain-loss helpers used by evaluation code (mean over batch elsewhere).
inline double cross_entropy(std::span<const double> probs, int target) {
    return -std::log(std::max(probs[target], kProbClamp));
}

inline double binary_cross_entropy(double p, double y) {
    p = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
    return -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
}

}  // namespace defcon::nn
