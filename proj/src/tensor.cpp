#include "cigmatch/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace cigmatch::tensor {

namespace {

std::size_t shape_numel(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int d : shape) n *= static_cast<std::size_t>(d);
    return n;
}

[[noreturn]] void shape_error(const std::string& op, const TensorPtr& a, const TensorPtr& b) {
    auto fmt = [](const TensorPtr& t) {
        std::string s = "[";
        for (std::size_t i = 0; i < t->shape.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(t->shape[i]);
        }
        return s + "]";
    };
    throw std::invalid_argument("shape mismatch in " + op + ": " + fmt(a) + " vs " + fmt(b));
}

void require_same_shape(const std::string& op, const TensorPtr& a, const TensorPtr& b) {
    if (a->shape != b->shape) shape_error(op, a, b);
}

TensorPtr op_result(std::vector<int> shape, std::vector<double> values,
                    std::vector<TensorPtr> parents) {
    auto out = make_tensor(std::move(shape), std::move(values));
    for (const auto& p : parents) {
        if (p->requires_grad) {
            out->requires_grad = true;
            break;
        }
    }
    out->parents = std::move(parents);
    if (out->requires_grad) out->ensure_grad();
    return out;
}

}  // namespace

TensorPtr make_tensor(std::vector<int> shape, std::vector<double> values, bool requires_grad) {
    if (shape_numel(shape) != values.size()) {
        throw std::invalid_argument("tensor values do not match shape");
    }
    auto t = std::make_shared<Tensor>();
    t->shape = std::move(shape);
    t->values = std::move(values);
    t->requires_grad = requires_grad;
    if (requires_grad) t->ensure_grad();
    return t;
}

TensorPtr zeros(std::vector<int> shape, bool requires_grad) {
    std::vector<double> v(shape_numel(shape), 0.0);
    return make_tensor(std::move(shape), std::move(v), requires_grad);
}

TensorPtr scalar_tensor(double v, bool requires_grad) {
    return make_tensor({1}, {v}, requires_grad);
}

TensorPtr param(std::vector<int> shape, std::mt19937_64& rng, double limit) {
    std::uniform_real_distribution<double> uni(-limit, limit);
    std::vector<double> v(shape_numel(shape));
    for (double& x : v) x = uni(rng);
    return make_tensor(std::move(shape), std::move(v), true);
}

TensorPtr matmul(const TensorPtr& a, const TensorPtr& b) {
    if (a->shape.size() != 2 || b->shape.size() != 2 || a->shape[1] != b->shape[0]) {
        shape_error("matmul", a, b);
    }
    const int n = a->shape[0], m = a->shape[1], p = b->shape[1];
    std::vector<double> out(static_cast<std::size_t>(n) * p, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < m; ++k) {
            const double av = a->values[i * m + k];
            if (av == 0.0) continue;
            for (int j = 0; j < p; ++j) {
                out[i * p + j] += av * b->values[k * p + j];
            }
        }
    }
    auto r = op_result({n, p}, std::move(out), {a, b});
    if (r->requires_grad) {
        TensorPtr ra = a, rb = b, rr = r;
        r->backprop = [ra, rb, rr, n, m, p]() {
            if (ra->requires_grad) {
                ra->ensure_grad();
                for (int i = 0; i < n; ++i)
                    for (int k = 0; k < m; ++k) {
                        double g = 0.0;
                        for (int j = 0; j < p; ++j)
                            g += rr->grad[i * p + j] * rb->values[k * p + j];
                        ra->grad[i * m + k] += g;
                    }
            }
            if (rb->requires_grad) {
                rb->ensure_grad();
                for (int k = 0; k < m; ++k)
                    for (int j = 0; j < p; ++j) {
                        double g = 0.0;
                        for (int i = 0; i < n; ++i)
                            g += ra->values[i * m + k] * rr->grad[i * p + j];
                        rb->grad[k * p + j] += g;
                    }
            }
        };
    }
    return r;
}

TensorPtr add(const TensorPtr& a, const TensorPtr& b) {
    require_same_shape("add", a, b);
    std::vector<double> out(a->numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a->values[i] + b->values[i];
    auto r = op_result(a->shape, std::move(out), {a, b});
    if (r->requires_grad) {
        TensorPtr ra = a, rb = b, rr = r;
        r->backprop = [ra, rb, rr]() {
            if (ra->requires_grad) {
                ra->ensure_grad();
                for (std::size_t i = 0; i < rr->grad.size(); ++i) ra->grad[i] += rr->grad[i];
            }
            if (rb->requires_grad) {
                rb->ensure_grad();
                for (std::size_t i = 0; i < rr->grad.size(); ++i) rb->grad[i] += rr->grad[i];
            }
        };
    }
    return r;
}

TensorPtr add_rowwise(const TensorPtr& m, const TensorPtr& v) {
    if (m->shape.size() != 2 || v->shape.size() != 1 || m->shape[1] != v->shape[0]) {
        shape_error("add_rowwise", m, v);
    }
    const int n = m->shape[0], k = m->shape[1];
    std::vector<double> out(m->numel());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) out[i * k + j] = m->values[i * k + j] + v->values[j];
    auto r = op_result(m->shape, std::move(out), {m, v});
    if (r->requires_grad) {
        TensorPtr rm = m, rv = v, rr = r;
        r->backprop = [rm, rv, rr, n, k]() {
            if (rm->requires_grad) {
                rm->ensure_grad();
                for (std::size_t i = 0; i < rr->grad.size(); ++i) rm->grad[i] += rr->grad[i];
            }
            if (rv->requires_grad) {
                rv->ensure_grad();
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < k; ++j) rv->grad[j] += rr->grad[i * k + j];
            }
        };
    }
    return r;
}

TensorPtr hadamard(const TensorPtr& a, const TensorPtr& b) {
    require_same_shape("hadamard", a, b);
    std::vector<double> out(a->numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a->values[i] * b->values[i];
    auto r = op_result(a->shape, std::move(out), {a, b});
    if (r->requires_grad) {
        TensorPtr ra = a, rb = b, rr = r;
        r->backprop = [ra, rb, rr]() {
            if (ra->requires_grad) {
                ra->ensure_grad();
                for (std::size_t i = 0; i < rr->grad.size(); ++i)
                    ra->grad[i] += rr->grad[i] * rb->values[i];
            }
            if (rb->requires_grad) {
                rb->ensure_grad();
                for (std::size_t i = 0; i < rr->grad.size(); ++i)
                    rb->grad[i] += rr->grad[i] * ra->values[i];
            }
        };
    }
    return r;
}

TensorPtr abs_diff(const TensorPtr& a, const TensorPtr& b) {
    require_same_shape("abs_diff", a, b);
    std::vector<double> out(a->numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::abs(a->values[i] - b->values[i]);
    auto r = op_result(a->shape, std::move(out), {a, b});
    if (r->requires_grad) {
        TensorPtr ra = a, rb = b, rr = r;
        r->backprop = [ra, rb, rr]() {
            for (std::size_t i = 0; i < rr->grad.size(); ++i) {
                const double s = ra->values[i] >= rb->values[i] ? 1.0 : -1.0;
                if (ra->requires_grad) {
                    ra->ensure_grad();
                    ra->grad[i] += rr->grad[i] * s;
                }
                if (rb->requires_grad) {
                    rb->ensure_grad();
                    rb->grad[i] -= rr->grad[i] * s;
                }
            }
        };
    }
    return r;
}

TensorPtr relu(const TensorPtr& x) {
    std::vector<double> out(x->numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x->values[i] > 0.0 ? x->values[i] : 0.0;
    auto r = op_result(x->shape, std::move(out), {x});
    if (r->requires_grad) {
        TensorPtr rx = x, rr = r;
        r->backprop = [rx, rr]() {
            rx->ensure_grad();
            for (std::size_t i = 0; i < rr->grad.size(); ++i) {
                if (rx->values[i] > 0.0) rx->grad[i] += rr->grad[i];
            }
        };
    }
    return r;
}

TensorPtr sigmoid(const TensorPtr& x) {
    std::vector<double> out(x->numel());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double v = x->values[i];
        out[i] = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v))
                          : std::exp(v) / (1.0 + std::exp(v));
    }
    auto r = op_result(x->shape, std::move(out), {x});
    if (r->requires_grad) {
        TensorPtr rx = x, rr = r;
        r->backprop = [rx, rr]() {
            rx->ensure_grad();
            for (std::size_t i = 0; i < rr->grad.size(); ++i) {
                const double s = rr->values[i];
                rx->grad[i] += rr->grad[i] * s * (1.0 - s);
            }
        };
    }
    return r;
}

TensorPtr scale(const TensorPtr& x, double c) {
    std::vector<double> out(x->numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x->values[i] * c;
    auto r = op_result(x->shape, std::move(out), {x});
    if (r->requires_grad) {
        TensorPtr rx = x, rr = r;
        r->backprop = [rx, rr, c]() {
            rx->ensure_grad();
            for (std::size_t i = 0; i < rr->grad.size(); ++i) rx->grad[i] += rr->grad[i] * c;
        };
    }
    return r;
}

TensorPtr concat(const std::vector<TensorPtr>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat of zero tensors");
    std::vector<double> out;
    for (const auto& p : parts) {
        if (p->shape.size() != 1) throw std::invalid_argument("concat expects 1-D tensors");
        out.insert(out.end(), p->values.begin(), p->values.end());
    }
    const int total = static_cast<int>(out.size());
    auto r = op_result({total}, std::move(out), parts);
    if (r->requires_grad) {
        std::vector<TensorPtr> rp = parts;
        TensorPtr rr = r;
        r->backprop = [rp, rr]() {
            std::size_t off = 0;
            for (const auto& p : rp) {
                if (p->requires_grad) {
                    p->ensure_grad();
                    for (std::size_t i = 0; i < p->numel(); ++i) p->grad[i] += rr->grad[off + i];
                }
                off += p->numel();
            }
        };
    }
    return r;
}

TensorPtr stack_rows(const std::vector<TensorPtr>& rows) {
    if (rows.empty()) throw std::invalid_argument("stack_rows of zero tensors");
    const int k = static_cast<int>(rows[0]->numel());
    std::vector<double> out;
    out.reserve(rows.size() * static_cast<std::size_t>(k));
    for (const auto& row : rows) {
        if (row->shape.size() != 1 || static_cast<int>(row->numel()) != k) {
            throw std::invalid_argument("stack_rows expects equal-length 1-D tensors");
        }
        out.insert(out.end(), row->values.begin(), row->values.end());
    }
    auto r = op_result({static_cast<int>(rows.size()), k}, std::move(out), rows);
    if (r->requires_grad) {
        std::vector<TensorPtr> rp = rows;
        TensorPtr rr = r;
        r->backprop = [rp, rr, k]() {
            for (std::size_t i = 0; i < rp.size(); ++i) {
                if (!rp[i]->requires_grad) continue;
                rp[i]->ensure_grad();
                for (int j = 0; j < k; ++j) rp[i]->grad[j] += rr->grad[i * k + j];
            }
        };
    }
    return r;
}

TensorPtr as_row(const TensorPtr& v) {
    if (v->shape.size() != 1) throw std::invalid_argument("as_row expects a 1-D tensor");
    auto r = op_result({1, static_cast<int>(v->numel())}, v->values, {v});
    if (r->requires_grad) {
        TensorPtr rv = v, rr = r;
        r->backprop = [rv, rr]() {
            rv->ensure_grad();
            for (std::size_t i = 0; i < rr->grad.size(); ++i) rv->grad[i] += rr->grad[i];
        };
    }
    return r;
}

TensorPtr mean_rows(const TensorPtr& m) {
    if (m->shape.size() != 2) throw std::invalid_argument("mean_rows expects a matrix");
    const int n = m->shape[0], k = m->shape[1];
    std::vector<double> out(k, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) out[j] += m->values[i * k + j];
    for (double& v : out) v /= n;
    auto r = op_result({k}, std::move(out), {m});
    if (r->requires_grad) {
        TensorPtr rm = m, rr = r;
        r->backprop = [rm, rr, n, k]() {
            rm->ensure_grad();
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < k; ++j) rm->grad[i * k + j] += rr->grad[j] / n;
        };
    }
    return r;
}

TensorPtr sum(const TensorPtr& x) {
    double s = 0.0;
    for (double v : x->values) s += v;
    auto r = op_result({1}, {s}, {x});
    if (r->requires_grad) {
        TensorPtr rx = x, rr = r;
        r->backprop = [rx, rr]() {
            rx->ensure_grad();
            for (std::size_t i = 0; i < rx->numel(); ++i) rx->grad[i] += rr->grad[0];
        };
    }
    return r;
}

TensorPtr conv1d(const TensorPtr& seq, const TensorPtr& weights, const TensorPtr& bias,
                 int kernel) {
    if (seq->shape.size() != 2 || weights->shape.size() != 2) {
        shape_error("conv1d", seq, weights);
    }
    const int len = seq->shape[0], emb = seq->shape[1];
    const int filters = weights->shape[1];
    if (weights->shape[0] != kernel * emb || bias->shape != std::vector<int>{filters}) {
        shape_error("conv1d", weights, bias);
    }
    const int half = kernel / 2;
    std::vector<double> out(static_cast<std::size_t>(len) * filters, 0.0);
    for (int t = 0; t < len; ++t) {
        for (int f = 0; f < filters; ++f) {
            double acc = bias->values[f];
            for (int dk = 0; dk < kernel; ++dk) {
                const int src = t + dk - half;
                if (src < 0 || src >= len) continue;  // zero padding
                for (int e = 0; e < emb; ++e) {
                    acc += seq->values[src * emb + e] * weights->values[(dk * emb + e) * filters + f];
                }
            }
            out[t * filters + f] = acc;
        }
    }
    auto r = op_result({len, filters}, std::move(out), {seq, weights, bias});
    if (r->requires_grad) {
        TensorPtr rs = seq, rw = weights, rb = bias, rr = r;
        r->backprop = [rs, rw, rb, rr, len, emb, filters, kernel, half]() {
            for (int t = 0; t < len; ++t) {
                for (int f = 0; f < filters; ++f) {
                    const double g = rr->grad[t * filters + f];
                    if (g == 0.0) continue;
                    if (rb->requires_grad) {
                        rb->ensure_grad();
                        rb->grad[f] += g;
                    }
                    for (int dk = 0; dk < kernel; ++dk) {
                        const int src = t + dk - half;
                        if (src < 0 || src >= len) continue;
                        for (int e = 0; e < emb; ++e) {
                            if (rw->requires_grad) {
                                rw->ensure_grad();
                                rw->grad[(dk * emb + e) * filters + f] += g * rs->values[src * emb + e];
                            }
                            if (rs->requires_grad) {
                                rs->ensure_grad();
                                rs->grad[src * emb + e] += g * rw->values[(dk * emb + e) * filters + f];
                            }
                        }
                    }
                }
            }
        };
    }
    return r;
}

TensorPtr maxpool_time(const TensorPtr& m) {
    if (m->shape.size() != 2) throw std::invalid_argument("maxpool_time expects a matrix");
    const int len = m->shape[0], filters = m->shape[1];
    std::vector<double> out(filters);
    std::vector<int> argmax(filters, 0);
    for (int f = 0; f < filters; ++f) {
        double best = m->values[f];
        int bi = 0;
        for (int t = 1; t < len; ++t) {
            if (m->values[t * filters + f] > best) {
                best = m->values[t * filters + f];
                bi = t;
            }
        }
        out[f] = best;
        argmax[f] = bi;
    }
    auto r = op_result({filters}, std::move(out), {m});
    if (r->requires_grad) {
        TensorPtr rm = m, rr = r;
        r->backprop = [rm, rr, argmax, filters]() {
            rm->ensure_grad();
            for (int f = 0; f < filters; ++f) {
                rm->grad[argmax[f] * filters + f] += rr->grad[f];
            }
        };
    }
    return r;
}

TensorPtr dropout(const TensorPtr& x, double p, bool train_mode, std::mt19937_64& rng) {
    if (!train_mode || p <= 0.0) return x;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<double> mask(x->numel());
    const double inv_keep = 1.0 / (1.0 - p);
    for (double& m : mask) m = uni(rng) < p ? 0.0 : inv_keep;
    std::vector<double> out(x->numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x->values[i] * mask[i];
    auto r = op_result(x->shape, std::move(out), {x});
    if (r->requires_grad) {
        TensorPtr rx = x, rr = r;
        r->backprop = [rx, rr, mask]() {
            rx->ensure_grad();
            for (std::size_t i = 0; i < rr->grad.size(); ++i) rx->grad[i] += rr->grad[i] * mask[i];
        };
    }
    return r;
}

TensorPtr bce_loss(const TensorPtr& prob, double label) {
    if (prob->numel() != 1) throw std::invalid_argument("bce_loss expects a scalar probability");
    const double eps = 1e-12;
    const double p = std::min(1.0 - eps, std::max(eps, prob->scalar()));
    const double loss = -(label * std::log(p) + (1.0 - label) * std::log(1.0 - p));
    auto r = op_result({1}, {loss}, {prob});
    if (r->requires_grad) {
        TensorPtr rp = prob, rr = r;
        r->backprop = [rp, rr, p, label]() {
            rp->ensure_grad();
            rp->grad[0] += rr->grad[0] * (-(label / p) + (1.0 - label) / (1.0 - p));
        };
    }
    return r;
}

void backward(const TensorPtr& loss) {
    if (loss->numel() != 1) throw std::invalid_argument("backward expects a scalar loss");
    if (loss->graph_consumed) {
        throw std::logic_error("backward called twice without a new forward pass");
    }
    loss->graph_consumed = true;

    // Reverse topological order over the recorded graph.
    std::vector<TensorPtr> order;
    std::unordered_set<Tensor*> visited;
    std::vector<std::pair<TensorPtr, std::size_t>> stack;
    stack.emplace_back(loss, 0);
    visited.insert(loss.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            TensorPtr child = node->parents[next++];
            if (visited.insert(child.get()).second) {
                stack.emplace_back(child, 0);
            }
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    loss->ensure_grad();
    loss->grad[0] = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if ((*it)->backprop) (*it)->backprop();
    }
    // Release the graph so intermediates can be freed.
    for (const auto& node : order) {
        if (node != loss) node->graph_consumed = true;
        node->backprop = nullptr;
        node->parents.clear();
    }
}

std::vector<double> normalize_adjacency(const std::vector<double>& a, int n) {
    std::vector<double> a_tilde(a);
    for (int i = 0; i < n; ++i) a_tilde[i * n + i] += 1.0;
    std::vector<double> inv_sqrt_deg(n);
    for (int i = 0; i < n; ++i) {
        double deg = 0.0;
        for (int j = 0; j < n; ++j) deg += a_tilde[i * n + j];
        inv_sqrt_deg[i] = 1.0 / std::sqrt(deg);
    }
    std::vector<double> out(a_tilde.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out[i * n + j] = inv_sqrt_deg[i] * a_tilde[i * n + j] * inv_sqrt_deg[j];
    return out;
}

TensorPtr gcn_layer(const TensorPtr& h, const TensorPtr& a_norm, const TensorPtr& w,
                    Activation act) {
    TensorPtr z = matmul(matmul(a_norm, h), w);
    switch (act) {
        case Activation::Relu: return relu(z);
        case Activation::Sigmoid: return sigmoid(z);
        case Activation::Identity: return z;
    }
    return z;
}

AdamState::AdamState(const std::vector<TensorPtr>& params, AdamConfig cfg) : config(cfg) {
    for (const auto& p : params) {
        m.emplace_back(p->numel(), 0.0);
        v.emplace_back(p->numel(), 0.0);
    }
}

double lr_schedule(long step) {
    const double peak = 0.001;
    if (step >= 1000) return peak;
    return peak * (1.0 - std::exp(-7.0 * static_cast<double>(step) / 1000.0));
}

void clip_global_norm(const std::vector<TensorPtr>& params, double max_norm) {
    double total = 0.0;
    for (const auto& p : params) {
        p->ensure_grad();
        for (double g : p->grad) total += g * g;
    }
    total = std::sqrt(total);
    if (total <= max_norm || total == 0.0) return;
    const double factor = max_norm / total;
    for (const auto& p : params) {
        for (double& g : p->grad) g *= factor;
    }
}

void l2_decay(const std::vector<TensorPtr>& params, double lambda) {
    for (const auto& p : params) {
        p->ensure_grad();
        for (std::size_t i = 0; i < p->numel(); ++i) p->grad[i] += lambda * p->values[i];
    }
}

void adam_step(const std::vector<TensorPtr>& params, AdamState& state, double lr) {
    ++state.step;
    const double b1 = state.config.beta1, b2 = state.config.beta2, eps = state.config.epsilon;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        auto& p = params[pi];
        p->ensure_grad();
        auto& m = state.m[pi];
        auto& v = state.v[pi];
        for (std::size_t i = 0; i < p->numel(); ++i) {
            const double g = p->grad[i];
            m[i] = b1 * m[i] + (1.0 - b1) * g;
            v[i] = b2 * v[i] + (1.0 - b2) * g * g;
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            p->values[i] -= lr * mhat / (std::sqrt(vhat) + eps);
        }
    }
}

void zero_grads(const std::vector<TensorPtr>& params) {
    for (const auto& p : params) {
        p->grad.assign(p->numel(), 0.0);
        p->graph_consumed = false;
    }
}

}  // namespace cigmatch::tensor
