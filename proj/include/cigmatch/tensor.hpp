#pragma once

#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace cigmatch::tensor {

class Tensor;
using TensorPtr = std::shared_ptr<Tensor>;

// Dense double tensor (1-D or 2-D) with reverse-mode gradient bookkeeping.
// Each op records a backprop closure; backward() replays them in reverse
// topological order and accumulates into .grad.
class Tensor {
public:
    std::vector<int> shape;
    std::vector<double> values;
    std::vector<double> grad;
    bool requires_grad = false;

    // autodiff graph
    std::vector<TensorPtr> parents;
    std::function<void()> backprop;
    bool graph_consumed = false;

    std::size_t numel() const { return values.size(); }
    int rows() const { return shape.empty() ? 1 : shape[0]; }
    int cols() const { return shape.size() < 2 ? 1 : shape[1]; }
    double scalar() const { return values.at(0); }

    void ensure_grad() {
        if (grad.size() != values.size()) grad.assign(values.size(), 0.0);
    }
};

TensorPtr make_tensor(std::vector<int> shape, std::vector<double> values,
                      bool requires_grad = false);
TensorPtr zeros(std::vector<int> shape, bool requires_grad = false);
TensorPtr scalar_tensor(double v, bool requires_grad = false);

// Trainable parameter with uniform(-limit, limit) init.
TensorPtr param(std::vector<int> shape, std::mt19937_64& rng, double limit);

// ---- forward ops (all record gradients) --------------------------------

TensorPtr matmul(const TensorPtr& a, const TensorPtr& b);
TensorPtr add(const TensorPtr& a, const TensorPtr& b);          // same shape
TensorPtr add_rowwise(const TensorPtr& m, const TensorPtr& v);  // [n,k] + [k]
TensorPtr hadamard(const TensorPtr& a, const TensorPtr& b);
TensorPtr abs_diff(const TensorPtr& a, const TensorPtr& b);
TensorPtr relu(const TensorPtr& x);
TensorPtr sigmoid(const TensorPtr& x);
TensorPtr scale(const TensorPtr& x, double c);
TensorPtr concat(const std::vector<TensorPtr>& parts);      // 1-D concat
TensorPtr stack_rows(const std::vector<TensorPtr>& rows);   // n x [k] -> [n,k]
TensorPtr as_row(const TensorPtr& v);                       // [k] -> [1,k]
TensorPtr mean_rows(const TensorPtr& m);                    // [n,k] -> [k]
TensorPtr sum(const TensorPtr& x);                      // -> scalar

// Same-padding 1-D convolution over a [L,E] sequence.
// weights: [kernel*E, F], bias: [F]; output [L,F].
TensorPtr conv1d(const TensorPtr& seq, const TensorPtr& weights, const TensorPtr& bias,
                 int kernel);
TensorPtr maxpool_time(const TensorPtr& m);  // [L,F] -> [F]

// Inverted dropout; identity in eval mode and at p=0.
TensorPtr dropout(const TensorPtr& x, double p, bool train_mode, std::mt19937_64& rng);

// Binary cross-entropy of a scalar probability against a 0/1 label.
TensorPtr bce_loss(const TensorPtr& prob, double label);

// Accumulates gradients of `loss` (scalar) into every reachable tensor with
// requires_grad, then releases the recorded graph. Calling twice on the same
// recorded graph throws std::logic_error.
void backward(const TensorPtr& loss);

// ---- GCN support --------------------------------------------------------

// D^{-1/2} (A + I) D^{-1/2} for a symmetric zero-diagonal adjacency.
std::vector<double> normalize_adjacency(const std::vector<double>& a, int n);

enum class Activation { Identity, Relu, Sigmoid };

// sigma(A_norm * H * W); A_norm is a constant [N,N] tensor.
TensorPtr gcn_layer(const TensorPtr& h, const TensorPtr& a_norm, const TensorPtr& w,
                    Activation act);

// ---- optimizer -----------------------------------------------------------

struct AdamConfig {
    double beta1 = 0.8;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
    long step = 0;
    AdamConfig config;

    explicit AdamState(const std::vector<TensorPtr>& params, AdamConfig cfg = {});
};

// Warm-up: 0.001 * (1 - e^{-7t/1000}) for t <= 1000, then constant 0.001.
double lr_schedule(long step);

// Rescales all gradients jointly when their global L2 norm exceeds max_norm.
void clip_global_norm(const std::vector<TensorPtr>& params, double max_norm);

// grad += lambda * value, applied before the Adam update.
void l2_decay(const std::vector<TensorPtr>& params, double lambda);

void adam_step(const std::vector<TensorPtr>& params, AdamState& state, double lr);
void zero_grads(const std::vector<TensorPtr>& params);

}  // namespace cigmatch::tensor
