#include <cmath>

#include <doctest.h>

#include "mmci/rng.hpp"
#include "mmci/tensor.hpp"

using namespace mmci;

namespace {

// central finite differences of a scalar-valued function of one tensor entry
template <typename F>
double numeric_grad(Tensor& x, std::size_t i, F f, double h = 1e-5) {
    double keep = x.data()[i];
    x.data()[i] = keep + h;
    double up = f();
    x.data()[i] = keep - h;
    double down = f();
    x.data()[i] = keep;
    return (up - down) / (2.0 * h);
}

}  // namespace

TEST_CASE("matmul matches a direct triple-loop evaluation") {
    Rng rng(1);
    std::vector<double> av(12), bv(8);
    for (auto& v : av) v = rng.gaussian();
    for (auto& v : bv) v = rng.gaussian();
    Tensor a = Tensor::from({3, 4}, av);
    Tensor b = Tensor::from({4, 2}, bv);
    Tape tape;
    Tensor c = tape.matmul(a, b);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < 4; ++k) s += av[i * 4 + k] * bv[k * 2 + j];
            CHECK(c.at(i, j) == doctest::Approx(s).epsilon(1e-12));
        }
}

TEST_CASE("matmul backward matches central finite differences") {
    Rng rng(7);
    std::vector<double> av(12), bv(8);
    for (auto& v : av) v = rng.gaussian();
    for (auto& v : bv) v = rng.gaussian();
    Tensor a = Tensor::from({3, 4}, av, true);
    Tensor b = Tensor::from({4, 2}, bv, true);

    auto loss_value = [&]() {
        Tape t;
        double v = t.sum(t.matmul(a, b)).value();
        t.clear();
        return v;
    };

    Tape tape;
    Tensor loss = tape.sum(tape.matmul(a, b));
    a.zero_grad();
    b.zero_grad();
    tape.backward(loss);

    for (std::size_t i = 0; i < a.size(); ++i) {
        double n = numeric_grad(a, i, loss_value);
        CHECK(std::abs(a.grad()[i] - n) / std::max(1.0, std::abs(n)) < 1e-6);
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
        double n = numeric_grad(b, i, loss_value);
        CHECK(std::abs(b.grad()[i] - n) / std::max(1.0, std::abs(n)) < 1e-6);
    }
}

TEST_CASE("softmax of [1,2,3] matches direct exp/sum evaluation") {
    Tensor x = Tensor::from({1, 3}, {1.0, 2.0, 3.0});
    Tape tape;
    Tensor p = tape.softmax(x);
    double z = std::exp(1.0) + std::exp(2.0) + std::exp(3.0);
    CHECK(p.data()[0] == doctest::Approx(std::exp(1.0) / z).epsilon(1e-14));
    CHECK(p.data()[1] == doctest::Approx(std::exp(2.0) / z).epsilon(1e-14));
    CHECK(p.data()[2] == doctest::Approx(std::exp(3.0) / z).epsilon(1e-14));
    CHECK(std::abs(p.data()[0] + p.data()[1] + p.data()[2] - 1.0) <= 1e-12);
}

TEST_CASE("mse of identical inputs is zero") {
    Tensor a = Tensor::from({1, 2}, {1.0, 2.0});
    Tensor b = Tensor::from({1, 2}, {1.0, 2.0});
    Tape tape;
    CHECK(tape.mse(a, b).value() == 0.0);
}

TEST_CASE("kl_uniform([0.7, 0.3]) matches the closed form") {
    Tensor p = Tensor::from({1, 2}, {0.7, 0.3});
    Tape tape;
    double expected = 0.5 * std::log(0.5 / 0.7) + 0.5 * std::log(0.5 / 0.3);
    CHECK(tape.kl_uniform(p, 2).value() == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("constant loss leaves all gradients zero") {
    Tensor x = Tensor::from({2, 2}, {1.0, 2.0, 3.0, 4.0}, true);
    Tape tape;
    Tensor c = tape.scale(tape.sum(x), 0.0);
    x.zero_grad();
    tape.backward(c);
    for (double g : x.grad()) CHECK(g == 0.0);
}

TEST_CASE("sum(x) backward is all-ones") {
    Tensor x = Tensor::from({2, 3}, {1, 2, 3, 4, 5, 6}, true);
    Tape tape;
    Tensor s = tape.sum(x);
    x.zero_grad();
    tape.backward(s);
    for (double g : x.grad()) CHECK(g == 1.0);
}

TEST_CASE("edge_weighted_sum equals an explicit scatter loop") {
    Rng rng(3);
    std::vector<double> mv(4 * 3), wv(5);
    for (auto& v : mv) v = rng.gaussian();
    for (auto& v : wv) v = rng.gaussian();
    Tensor msg = Tensor::from({4, 3}, mv);
    Tensor w = Tensor::from({5, 1}, wv);
    std::vector<std::size_t> dst = {0, 1, 1, 2, 0};
    std::vector<std::size_t> src = {1, 0, 2, 3, 3};
    Tape tape;
    Tensor out = tape.edge_weighted_sum(msg, dst, src, w, 3);
    std::vector<double> ref(3 * 3, 0.0);
    for (std::size_t e = 0; e < 5; ++e)
        for (std::size_t j = 0; j < 3; ++j)
            ref[dst[e] * 3 + j] += wv[e] * mv[src[e] * 3 + j];
    for (std::size_t i = 0; i < ref.size(); ++i)
        CHECK(out.data()[i] == doctest::Approx(ref[i]).epsilon(1e-12));
}

TEST_CASE("ELU activation: identity for positives, expm1 for negatives") {
    Tensor x = Tensor::from({1, 3}, {2.0, 0.0, -1.5});
    Tape tape;
    Tensor y = tape.activation(x);
    CHECK(y.data()[0] == 2.0);
    CHECK(y.data()[1] == 0.0);
    CHECK(y.data()[2] == doctest::Approx(std::expm1(-1.5)).epsilon(1e-14));
}

TEST_CASE("dropout with rate zero is the identity") {
    Tensor x = Tensor::from({2, 2}, {1, 2, 3, 4});
    Rng rng(1);
    Tape tape;
    Tensor y = tape.dropout(x, 0.0, rng);
    for (std::size_t i = 0; i < 4; ++i) CHECK(y.data()[i] == x.data()[i]);
}

TEST_CASE("non-finite forward values raise numeric errors") {
    Tensor x = Tensor::from({1, 1}, {1e308});
    Tape tape;
    CHECK_THROWS_AS((void)tape.mul(x, x), numeric_error);
}

TEST_CASE("detach blocks gradient flow") {
    Tensor x = Tensor::from({1, 2}, {1.0, 2.0}, true);
    Tape tape;
    Tensor s = tape.sum(tape.detach(x));
    x.zero_grad();
    tape.backward(s);
    for (double g : x.grad()) CHECK(g == 0.0);
}
