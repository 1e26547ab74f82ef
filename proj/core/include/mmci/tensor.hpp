#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <vector>

#include "mmci/errors.hpp"
#include "mmci/rng.hpp"

namespace mmci {

// Dense row-major 64-bit tensor. Handle semantics: copies share storage,
// which is what the tape needs to route gradients back to parameters.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(std::vector<std::size_t> shape, bool requires_grad = false);
    static Tensor from(std::vector<std::size_t> shape, std::vector<double> values,
                       bool requires_grad = false);
    static Tensor scalar(double v, bool requires_grad = false);

    bool defined() const { return node_ != nullptr; }
    const std::vector<std::size_t>& shape() const { return node_->shape; }
    std::size_t size() const { return node_->data.size(); }
    std::size_t rows() const;
    std::size_t cols() const;
    bool is_scalar() const { return size() == 1; }
    double value() const;  // scalar tensors only

    // handle semantics: storage is shared and mutable through const handles
    std::vector<double>& data() const { return node_->data; }
    std::vector<double>& grad() const { return node_->grad; }

    double& at(std::size_t i, std::size_t j) const;

    bool requires_grad() const { return node_->requires_grad; }
    void zero_grad();

    // identity of the underlying storage, for detecting aliasing
    const void* id() const { return node_.get(); }

private:
    struct Node {
        std::vector<std::size_t> shape;
        std::vector<double> data;
        std::vector<double> grad;
        bool requires_grad = false;
    };
    std::shared_ptr<Node> node_;
};

// Records the forward pass; backward() replays it in reverse. One tape per
// forward/backward episode; not shared across threads.
class Tape {
public:
    // --- 2-D linear algebra ---
    Tensor matmul(const Tensor& a, const Tensor& b);
    Tensor transpose(const Tensor& a);

    // --- elementwise ---
    Tensor add(const Tensor& a, const Tensor& b);
    Tensor sub(const Tensor& a, const Tensor& b);
    Tensor mul(const Tensor& a, const Tensor& b);
    Tensor scale(const Tensor& a, double c);
    Tensor activation(const Tensor& a);  // ELU
    Tensor log(const Tensor& a);

    // add a row vector b[d] to every row of a[N x d]
    Tensor add_rowvec(const Tensor& a, const Tensor& b);

    // --- shape ---
    Tensor concat_cols(const Tensor& a, const Tensor& b);
    Tensor concat_rows(const Tensor& a, const Tensor& b);
    Tensor gather_rows(const Tensor& a, const std::vector<std::size_t>& idx);
    Tensor select_col(const Tensor& a, std::size_t j);

    // --- reductions / losses ---
    Tensor mean_rows(const Tensor& a);  // [N x d] -> [1 x d], column means
    Tensor mean(const Tensor& a);       // scalar mean of all entries
    Tensor sum(const Tensor& a);        // scalar sum of all entries
    Tensor softmax(const Tensor& a);    // along last axis
    Tensor mse(const Tensor& pred, const Tensor& target);
    // rows of `probs` are probability vectors over C classes;
    // returns mean over rows of KL(uniform || row)
    Tensor kl_uniform(const Tensor& probs, std::size_t classes);

    // sparse weighted aggregation: out[dst[e]] += w[e] * msg[src[e]]
    Tensor edge_weighted_sum(const Tensor& messages,
                             const std::vector<std::size_t>& dst,
                             const std::vector<std::size_t>& src,
                             const Tensor& weights, std::size_t n_out);

    // inverted dropout; identity when rate == 0
    Tensor dropout(const Tensor& a, double rate, Rng& rng);

    // severs gradient flow
    Tensor detach(const Tensor& a);

    void backward(const Tensor& loss);
    void clear() { ops_.clear(); }
    std::size_t num_ops() const { return ops_.size(); }

private:
    std::vector<std::function<void()>> ops_;
    Tensor make_result(std::vector<std::size_t> shape, std::vector<double> values);
};

// 1e-12 floor applied before logs in kl_uniform
inline constexpr double kProbClamp = 1e-12;

}  // namespace mmci
