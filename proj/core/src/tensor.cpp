#include "mmci/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mmci {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (auto s : shape) n *= s;
    return n;
}

void check_finite(const Tensor& t, const char* op) {
    for (double v : t.data()) {
        if (!std::isfinite(v)) {
            throw numeric_error(std::string("non-finite value produced by ") + op);
        }
    }
}

}  // namespace

Tensor Tensor::zeros(std::vector<std::size_t> shape, bool requires_grad) {
    Tensor t;
    t.node_ = std::make_shared<Node>();
    t.node_->shape = std::move(shape);
    std::size_t n = shape_product(t.node_->shape);
    t.node_->data.assign(n, 0.0);
    t.node_->grad.assign(n, 0.0);
    t.node_->requires_grad = requires_grad;
    return t;
}

Tensor Tensor::from(std::vector<std::size_t> shape, std::vector<double> values,
                    bool requires_grad) {
    if (shape_product(shape) != values.size()) {
        throw dimension_error("Tensor::from: shape does not match value count");
    }
    Tensor t = zeros(std::move(shape), requires_grad);
    t.node_->data = std::move(values);
    return t;
}

Tensor Tensor::scalar(double v, bool requires_grad) {
    return from({1}, {v}, requires_grad);
}

std::size_t Tensor::rows() const {
    if (node_->shape.size() != 2) throw dimension_error("rows(): tensor is not 2-D");
    return node_->shape[0];
}

std::size_t Tensor::cols() const {
    if (node_->shape.size() != 2) throw dimension_error("cols(): tensor is not 2-D");
    return node_->shape[1];
}

double Tensor::value() const {
    if (size() != 1) throw dimension_error("value(): tensor is not scalar");
    return node_->data[0];
}

double& Tensor::at(std::size_t i, std::size_t j) const {
    return node_->data[i * cols() + j];
}

void Tensor::zero_grad() {
    std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

Tensor Tape::make_result(std::vector<std::size_t> shape, std::vector<double> values) {
    return Tensor::from(std::move(shape), std::move(values));
}

Tensor Tape::matmul(const Tensor& a, const Tensor& b) {
    if (a.shape().size() != 2 || b.shape().size() != 2 || a.cols() != b.rows()) {
        throw dimension_error("matmul: inner dimensions disagree");
    }
    std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    std::vector<double> out(m * n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
            double av = a.data()[i * k + p];
            if (av == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j)
                out[i * n + j] += av * b.data()[p * n + j];
        }
    Tensor r = make_result({m, n}, std::move(out));
    check_finite(r, "matmul");
    ops_.push_back([a, b, r, m, k, n]() mutable {
        // a.grad += g * b^T ; b.grad += a^T * g
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double g = r.grad()[i * n + j];
                if (g == 0.0) continue;
                for (std::size_t p = 0; p < k; ++p) {
                    a.grad()[i * k + p] += g * b.data()[p * n + j];
                    b.grad()[p * n + j] += g * a.data()[i * k + p];
                }
            }
    });
    return r;
}

Tensor Tape::transpose(const Tensor& a) {
    std::size_t m = a.rows(), n = a.cols();
    std::vector<double> out(m * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out[j * m + i] = a.data()[i * n + j];
    Tensor r = make_result({n, m}, std::move(out));
    ops_.push_back([a, r, m, n]() mutable {
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                a.grad()[i * n + j] += r.grad()[j * m + i];
    });
    return r;
}

Tensor Tape::add(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) throw dimension_error("add: shape mismatch");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
    Tensor r = make_result(a.shape(), std::move(out));
    check_finite(r, "add");
    ops_.push_back([a, b, r]() mutable {
        for (std::size_t i = 0; i < r.size(); ++i) {
            a.grad()[i] += r.grad()[i];
            b.grad()[i] += r.grad()[i];
        }
    });
    return r;
}

Tensor Tape::sub(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) throw dimension_error("sub: shape mismatch");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] - b.data()[i];
    Tensor r = make_result(a.shape(), std::move(out));
    check_finite(r, "sub");
    ops_.push_back([a, b, r]() mutable {
        for (std::size_t i = 0; i < r.size(); ++i) {
            a.grad()[i] += r.grad()[i];
            b.grad()[i] -= r.grad()[i];
        }
    });
    return r;
}

Tensor Tape::mul(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) throw dimension_error("mul: shape mismatch");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
    Tensor r = make_result(a.shape(), std::move(out));
    check_finite(r, "mul");
    ops_.push_back([a, b, r]() mutable {
        for (std::size_t i = 0; i < r.size(); ++i) {
            a.grad()[i] += r.grad()[i] * b.data()[i];
            b.grad()[i] += r.grad()[i] * a.data()[i];
        }
    });
    return r;
}

Tensor Tape::scale(const Tensor& a, double c) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * c;
    Tensor r = make_result(a.shape(), std::move(out));
    check_finite(r, "scale");
    ops_.push_back([a, r, c]() mutable {
        for (std::size_t i = 0; i < r.size(); ++i) a.grad()[i] += r.grad()[i] * c;
    });
    return r;
}

Tensor Tape::activation(const Tensor& a) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double x = a.data()[i];
        out[i] = x > 0.0 ? x : std::expm1(x);
    }
    Tensor r = make_result(a.shape(), std::move(out));
    check_finite(r, "activation");
    ops_.push_back([a, r]() mutable {
        for (std::size_t i = 0; i < r.size(); ++i) {
            double x = a.data()[i];
            double d = x > 0.0 ? 1.0 : std::exp(x);
            a.grad()[i] += r.grad()[i] * d;
        }
    });
    return r;
}

Tensor Tape::log(const Tensor& a) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double x = std::max(a.data()[i], kProbClamp);
        out[i] = std::log(x);
    }
    Tensor r = make_result(a.shape(), std::move(out));
    check_finite(r, "log");
    ops_.push_back([a, r]() mutable {
        for (std::size_t i = 0; i < r.size(); ++i) {
            double x = std::max(a.data()[i], kProbClamp);
            if (a.data()[i] > kProbClamp) a.grad()[i] += r.grad()[i] / x;
        }
    });
    return r;
}

Tensor Tape::add_rowvec(const Tensor& a, const Tensor& b) {
    std::size_t n = a.rows(), d = a.cols();
    if (b.size() != d) throw dimension_error("add_rowvec: width mismatch");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j)
            out[i * d + j] = a.data()[i * d + j] + b.data()[j];
    Tensor r = make_result(a.shape(), std::move(out));
    check_finite(r, "add_rowvec");
    ops_.push_back([a, b, r, n, d]() mutable {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                a.grad()[i * d + j] += r.grad()[i * d + j];
                b.grad()[j] += r.grad()[i * d + j];
            }
    });
    return r;
}

Tensor Tape::concat_cols(const Tensor& a, const Tensor& b) {
    if (a.rows() != b.rows()) throw dimension_error("concat_cols: row mismatch");
    std::size_t n = a.rows(), da = a.cols(), db = b.cols();
    std::vector<double> out(n * (da + db));
    for (std::size_t i = 0; i < n; ++i) {
        std::copy_n(a.data().begin() + i * da, da, out.begin() + i * (da + db));
        std::copy_n(b.data().begin() + i * db, db, out.begin() + i * (da + db) + da);
    }
    Tensor r = make_result({n, da + db}, std::move(out));
    ops_.push_back([a, b, r, n, da, db]() mutable {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < da; ++j)
                a.grad()[i * da + j] += r.grad()[i * (da + db) + j];
            for (std::size_t j = 0; j < db; ++j)
                b.grad()[i * db + j] += r.grad()[i * (da + db) + da + j];
        }
    });
    return r;
}

Tensor Tape::concat_rows(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.cols()) throw dimension_error("concat_rows: column mismatch");
    std::size_t na = a.rows(), nb = b.rows(), d = a.cols();
    std::vector<double> out;
    out.reserve((na + nb) * d);
    out.insert(out.end(), a.data().begin(), a.data().end());
    out.insert(out.end(), b.data().begin(), b.data().end());
    Tensor r = make_result({na + nb, d}, std::move(out));
    ops_.push_back([a, b, r, na, nb, d]() mutable {
        for (std::size_t i = 0; i < na * d; ++i) a.grad()[i] += r.grad()[i];
        for (std::size_t i = 0; i < nb * d; ++i) b.grad()[i] += r.grad()[na * d + i];
    });
    return r;
}

Tensor Tape::gather_rows(const Tensor& a, const std::vector<std::size_t>& idx) {
    std::size_t d = a.cols();
    std::vector<double> out(idx.size() * d);
    for (std::size_t e = 0; e < idx.size(); ++e) {
        if (idx[e] >= a.rows()) throw dimension_error("gather_rows: index out of range");
        std::copy_n(a.data().begin() + idx[e] * d, d, out.begin() + e * d);
    }
    Tensor r = make_result({idx.size(), d}, std::move(out));
    ops_.push_back([a, r, idx, d]() mutable {
        for (std::size_t e = 0; e < idx.size(); ++e)
            for (std::size_t j = 0; j < d; ++j)
                a.grad()[idx[e] * d + j] += r.grad()[e * d + j];
    });
    return r;
}

Tensor Tape::select_col(const Tensor& a, std::size_t j) {
    std::size_t n = a.rows(), d = a.cols();
    if (j >= d) throw dimension_error("select_col: column out of range");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a.data()[i * d + j];
    Tensor r = make_result({n}, std::move(out));
    ops_.push_back([a, r, n, d, j]() mutable {
        for (std::size_t i = 0; i < n; ++i) a.grad()[i * d + j] += r.grad()[i];
    });
    return r;
}

Tensor Tape::mean_rows(const Tensor& a) {
    std::size_t n = a.rows(), d = a.cols();
    std::vector<double> out(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) out[j] += a.data()[i * d + j];
    for (std::size_t j = 0; j < d; ++j) out[j] /= static_cast<double>(n);
    Tensor r = make_result({1, d}, std::move(out));
    check_finite(r, "mean_rows");
    ops_.push_back([a, r, n, d]() mutable {
        double inv = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j)
                a.grad()[i * d + j] += r.grad()[j] * inv;
    });
    return r;
}

Tensor Tape::mean(const Tensor& a) {
    double s = std::accumulate(a.data().begin(), a.data().end(), 0.0);
    double m = s / static_cast<double>(a.size());
    Tensor r = Tensor::scalar(m);
    check_finite(r, "mean");
    ops_.push_back([a, r]() mutable {
        double inv = 1.0 / static_cast<double>(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) a.grad()[i] += r.grad()[0] * inv;
    });
    return r;
}

Tensor Tape::sum(const Tensor& a) {
    double s = std::accumulate(a.data().begin(), a.data().end(), 0.0);
    Tensor r = Tensor::scalar(s);
    check_finite(r, "sum");
    ops_.push_back([a, r]() mutable {
        for (std::size_t i = 0; i < a.size(); ++i) a.grad()[i] += r.grad()[0];
    });
    return r;
}

Tensor Tape::softmax(const Tensor& a) {
    if (a.shape().empty()) throw dimension_error("softmax: empty tensor");
    std::size_t w = a.shape().back();
    if (w == 0) throw dimension_error("softmax: empty axis");
    std::size_t rows = a.size() / w;
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < rows; ++i) {
        const double* src = a.data().data() + i * w;
        double mx = *std::max_element(src, src + w);
        double z = 0.0;
        for (std::size_t j = 0; j < w; ++j) {
            out[i * w + j] = std::exp(src[j] - mx);
            z += out[i * w + j];
        }
        for (std::size_t j = 0; j < w; ++j) out[i * w + j] /= z;
    }
    Tensor r = make_result(a.shape(), std::move(out));
    check_finite(r, "softmax");
    ops_.push_back([a, r, rows, w]() mutable {
        for (std::size_t i = 0; i < rows; ++i) {
            double dot = 0.0;
            for (std::size_t j = 0; j < w; ++j)
                dot += r.grad()[i * w + j] * r.data()[i * w + j];
            for (std::size_t j = 0; j < w; ++j) {
                double y = r.data()[i * w + j];
                a.grad()[i * w + j] += y * (r.grad()[i * w + j] - dot);
            }
        }
    });
    return r;
}

Tensor Tape::mse(const Tensor& pred, const Tensor& target) {
    if (pred.size() != target.size()) throw dimension_error("mse: size mismatch");
    if (pred.size() == 0) throw dimension_error("mse: empty input");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        double d = pred.data()[i] - target.data()[i];
        s += d * d;
    }
    Tensor r = Tensor::scalar(s / static_cast<double>(pred.size()));
    check_finite(r, "mse");
    ops_.push_back([pred, target, r]() mutable {
        double inv = 2.0 / static_cast<double>(pred.size());
        for (std::size_t i = 0; i < pred.size(); ++i) {
            double d = pred.data()[i] - target.data()[i];
            pred.grad()[i] += r.grad()[0] * inv * d;
            target.grad()[i] -= r.grad()[0] * inv * d;
        }
    });
    return r;
}

Tensor Tape::kl_uniform(const Tensor& probs, std::size_t classes) {
    if (probs.shape().back() != classes)
        throw dimension_error("kl_uniform: row width != class count");
    std::size_t rows = probs.size() / classes;
    double invC = 1.0 / static_cast<double>(classes);
    double total = 0.0;
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t c = 0; c < classes; ++c) {
            double p = std::max(probs.data()[i * classes + c], kProbClamp);
            total += invC * (std::log(invC) - std::log(p));
        }
    Tensor r = Tensor::scalar(total / static_cast<double>(rows));
    check_finite(r, "kl_uniform");
    ops_.push_back([probs, r, rows, classes, invC]() mutable {
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t c = 0; c < classes; ++c) {
                double p = probs.data()[i * classes + c];
                if (p > kProbClamp) {
                    probs.grad()[i * classes + c] +=
                        r.grad()[0] * (-invC / p) / static_cast<double>(rows);
                }
            }
    });
    return r;
}

Tensor Tape::edge_weighted_sum(const Tensor& messages,
                               const std::vector<std::size_t>& dst,
                               const std::vector<std::size_t>& src,
                               const Tensor& weights, std::size_t n_out) {
    if (dst.size() != src.size() || weights.size() != dst.size())
        throw dimension_error("edge_weighted_sum: edge list size mismatch");
    std::size_t d = messages.cols();
    std::vector<double> out(n_out * d, 0.0);
    for (std::size_t e = 0; e < dst.size(); ++e) {
        if (dst[e] >= n_out || src[e] >= messages.rows())
            throw dimension_error("edge_weighted_sum: index out of range");
        double w = weights.data()[e];
        for (std::size_t j = 0; j < d; ++j)
            out[dst[e] * d + j] += w * messages.data()[src[e] * d + j];
    }
    Tensor r = make_result({n_out, d}, std::move(out));
    check_finite(r, "edge_weighted_sum");
    ops_.push_back([messages, weights, r, dst, src, d]() mutable {
        for (std::size_t e = 0; e < dst.size(); ++e) {
            double w = weights.data()[e];
            double wg = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                double g = r.grad()[dst[e] * d + j];
                messages.grad()[src[e] * d + j] += w * g;
                wg += g * messages.data()[src[e] * d + j];
            }
            weights.grad()[e] += wg;
        }
    });
    return r;
}

Tensor Tape::dropout(const Tensor& a, double rate, Rng& rng) {
    if (rate < 0.0 || rate >= 1.0) throw config_error("dropout rate must be in [0, 1)");
    if (rate == 0.0) return a;
    double keep = 1.0 - rate;
    auto mask = std::make_shared<std::vector<double>>(a.size());
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        (*mask)[i] = rng.uniform() < keep ? 1.0 / keep : 0.0;
        out[i] = a.data()[i] * (*mask)[i];
    }
    Tensor r = make_result(a.shape(), std::move(out));
    ops_.push_back([a, r, mask]() mutable {
        for (std::size_t i = 0; i < r.size(); ++i)
            a.grad()[i] += r.grad()[i] * (*mask)[i];
    });
    return r;
}

Tensor Tape::detach(const Tensor& a) {
    return Tensor::from(a.shape(), a.data());
}

void Tape::backward(const Tensor& loss) {
    if (!loss.is_scalar()) throw dimension_error("backward: loss must be scalar");
    if (ops_.empty()) throw dimension_error("backward: empty tape");
    loss.grad()[0] = 1.0;
    for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) (*it)();
    ops_.clear();
}

}  // namespace mmci
