#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "dpl/common.hpp"

namespace dpl {

namespace autodiff {
/// Reverse-mode recording is thread-local: independent tapes may run on
/// separate threads with no shared state.
bool grad_enabled();
void set_grad_enabled(bool on);
uint64_t next_seq();

struct NoGradGuard {
    NoGradGuard() : prev_(grad_enabled()) { set_grad_enabled(false); }
    ~NoGradGuard() { set_grad_enabled(prev_); }
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

  private:
    bool prev_;
};
}  // namespace autodiff

/// One recorded value in the computation tape. `backward_fn` pulls this
/// node's grad into its parents' grads; nodes are ordered by `seq` so that
/// replaying in reverse sequence order applies the chain rule with correct
/// fan-out accumulation.
template <typename S>
struct TensorNode {
    Shape shape;
    std::vector<S> value;
    std::vector<S> grad;  // empty until first needed; same length as value afterwards
    bool requires_grad = false;
    uint64_t seq = 0;
    std::vector<std::shared_ptr<TensorNode<S>>> parents;
    std::function<void(TensorNode<S>&)> backward_fn;

    void ensure_grad() {
        if (grad.empty()) grad.assign(value.size(), S(0));
    }
};

/// Dense row-major N-d tensor with optional gradient tracking. Copies are
/// shallow (shared node); values are immutable after creation except through
/// `mutable_value` which is reserved for leaf parameters.
template <typename S>
class Tensor {
  public:
    using Node = TensorNode<S>;

    Tensor() = default;

    static Tensor zeros(const Shape& shape);
    static Tensor full(const Shape& shape, S v);
    static Tensor scalar(S v) { return full({}, v); }
    static Tensor from_data(const Shape& shape, std::vector<S> data);
    static Tensor randn(const Shape& shape, Rng& rng, S stddev = S(1), S mean = S(0));

    bool defined() const { return static_cast<bool>(n_); }
    const Shape& shape() const { return n_->shape; }
    int rank() const { return static_cast<int>(n_->shape.size()); }
    int64_t numel() const { return static_cast<int64_t>(n_->value.size()); }
    int64_t extent(int axis) const;

    const std::vector<S>& value() const { return n_->value; }
    /// Direct mutation is for leaf parameters (optimizer updates, loading).
    std::vector<S>& mutable_value() { return n_->value; }
    S item() const;

    bool requires_grad() const { return n_->requires_grad; }
    Tensor& set_requires_grad(bool on) {
        n_->requires_grad = on;
        return *this;
    }

    const std::vector<S>& grad() const;
    std::vector<S>& mutable_grad() {
        n_->ensure_grad();
        return n_->grad;
    }
    void zero_grad() {
        if (!n_->grad.empty()) std::fill(n_->grad.begin(), n_->grad.end(), S(0));
    }

    /// Reverse-mode sweep from a scalar. Gradients accumulate (no implicit
    /// zeroing), so separate forward passes may sum their gradients. The
    /// tape reachable from this node is freed afterwards.
    void backward();

    std::shared_ptr<Node> node() const { return n_; }
    explicit Tensor(std::shared_ptr<Node> n) : n_(std::move(n)) {}

  private:
    std::shared_ptr<Node> n_;
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

namespace detail {
/// Attach parents and a backward rule to `out` if recording is active.
template <typename S>
void record(Tensor<S>& out, std::vector<std::shared_ptr<TensorNode<S>>> parents,
            std::function<void(TensorNode<S>&)> fn);
}  // namespace detail

// ---- elementwise ----
template <typename S> Tensor<S> add(const Tensor<S>& a, const Tensor<S>& b);
template <typename S> Tensor<S> sub(const Tensor<S>& a, const Tensor<S>& b);
template <typename S> Tensor<S> mul(const Tensor<S>& a, const Tensor<S>& b);
template <typename S> Tensor<S> neg(const Tensor<S>& a);
template <typename S> Tensor<S> scale(const Tensor<S>& a, S c);
template <typename S> Tensor<S> add_scalar(const Tensor<S>& a, S c);
template <typename S> Tensor<S> relu(const Tensor<S>& a);
template <typename S> Tensor<S> tanh_op(const Tensor<S>& a);
/// Exact GELU: x * Phi(x) with Phi the standard normal CDF.
template <typename S> Tensor<S> gelu(const Tensor<S>& a);
template <typename S>
Tensor<S> dropout(const Tensor<S>& a, double p, Rng& rng, bool training);

// ---- linear algebra ----
/// Batched matrix product [.., m, k] x [.., k, n]. Leading batch dims must
/// match, or either operand may be rank-2 (shared across batches).
template <typename S> Tensor<S> matmul(const Tensor<S>& a, const Tensor<S>& b);
/// x[.., C] + bias[C].
template <typename S> Tensor<S> add_bias(const Tensor<S>& x, const Tensor<S>& bias);
/// matmul(x, w) + bias over the last axis.
template <typename S>
Tensor<S> linear(const Tensor<S>& x, const Tensor<S>& w, const Tensor<S>& bias);

// ---- normalization / activations over axes ----
template <typename S> Tensor<S> softmax(const Tensor<S>& x, int axis);
template <typename S> Tensor<S> log_softmax(const Tensor<S>& x, int axis);
template <typename S>
Tensor<S> layernorm(const Tensor<S>& x, const Tensor<S>& gamma, const Tensor<S>& beta,
                    double eps = 1e-5);

// ---- convolution ----
/// Cross-correlation of x[Ci,D,H,W] with weight[Co,Ci,kd,kh,kw]; bias may be
/// undefined. Output extents are floor((ext + 2*pad - k)/stride) + 1.
template <typename S>
Tensor<S> conv3d(const Tensor<S>& x, const Tensor<S>& weight, const Tensor<S>& bias,
                 const std::array<int, 3>& stride, const std::array<int, 3>& pad);

// ---- reductions ----
template <typename S> Tensor<S> sum_all(const Tensor<S>& x);
template <typename S> Tensor<S> mean_all(const Tensor<S>& x);
template <typename S> Tensor<S> sum_axis(const Tensor<S>& x, int axis);
template <typename S> Tensor<S> mean_axis(const Tensor<S>& x, int axis);

// ---- shape manipulation ----
template <typename S> Tensor<S> reshape(const Tensor<S>& x, const Shape& shape);
template <typename S> Tensor<S> permute(const Tensor<S>& x, const std::vector<int>& perm);
template <typename S> Tensor<S> concat(const std::vector<Tensor<S>>& xs, int axis);
/// Cyclic shift along every axis by the given amounts (python-roll semantics).
template <typename S> Tensor<S> roll(const Tensor<S>& x, const std::vector<int64_t>& shifts);
/// Repeat an extent-1 axis n times; backward sums over the axis.
template <typename S> Tensor<S> expand(const Tensor<S>& x, int axis, int64_t n);
/// Row i along axis 0.
template <typename S> Tensor<S> select0(const Tensor<S>& x, int64_t i);
template <typename S> Tensor<S> take_scalar(const Tensor<S>& x, int64_t flat_index);
/// rows[m] = table[indices[m]] for table[R, C]; backward scatter-adds.
template <typename S>
Tensor<S> gather_rows(const Tensor<S>& table, const std::vector<int64_t>& indices);

template <typename S> Tensor<S> operator+(const Tensor<S>& a, const Tensor<S>& b) { return add(a, b); }
template <typename S> Tensor<S> operator-(const Tensor<S>& a, const Tensor<S>& b) { return sub(a, b); }
template <typename S> Tensor<S> operator*(const Tensor<S>& a, const Tensor<S>& b) { return mul(a, b); }
template <typename S> Tensor<S> operator*(const Tensor<S>& a, S c) { return scale(a, c); }
template <typename S> Tensor<S> operator*(S c, const Tensor<S>& a) { return scale(a, c); }

}  // namespace dpl
