#include <doctest.h>

#include "mmci/gradcheck.hpp"
#include "mmci/rng.hpp"

using namespace mmci;

namespace {

ModelParams toy_params(std::uint64_t seed) {
    ModelConfig mc;
    mc.d = 5;
    mc.d_text = 4;
    mc.d_audio = 3;
    mc.d_visual = 3;
    mc.classes = 7;
    mc.dropout = 0.0;
    return ModelParams::init(mc, Ablation::None, seed);
}

InterventionBank toy_bank(std::size_t entries, std::size_t d, std::uint64_t seed) {
    InterventionBank bank(64);
    Rng rng(seed);
    for (std::size_t e = 0; e < entries; ++e) {
        std::vector<double> v(d);
        for (auto& x : v) x = rng.gaussian();
        bank.insert(std::move(v), "bank-" + std::to_string(e));
    }
    return bank;
}

}  // namespace

TEST_CASE("analytic gradients of the full loss match finite differences") {
    Sample s = make_toy_sample(4, 3, 3, 4, 3, 3, 11);
    ModelParams params = toy_params(2);
    InterventionBank bank = toy_bank(4, 5, 17);
    GradCheckReport rep = gradient_check(s, params, 0.2, 0.6, 3, bank, 23);
    CHECK(rep.n_checked > 0);
    CHECK(rep.max_rel_err < 1e-4);
}

TEST_CASE("gradient check also passes with an empty bank (warm-up path)") {
    Sample s = make_toy_sample(3, 3, 3, 4, 3, 3, 5);
    ModelParams params = toy_params(3);
    InterventionBank bank(64);
    GradCheckReport rep = gradient_check(s, params, 0.2, 0.6, 3, bank, 29);
    CHECK(rep.max_rel_err < 1e-4);
}

TEST_CASE("gradient check covers the ablated variants") {
    Sample s = make_toy_sample(4, 3, 3, 4, 3, 3, 11);
    InterventionBank bank = toy_bank(4, 5, 17);
    for (Ablation ab : {Ablation::NoIntra, Ablation::NoInter, Ablation::NoKL}) {
        ModelConfig mc;
        mc.d = 5;
        mc.d_text = 4;
        mc.d_audio = 3;
        mc.d_visual = 3;
        mc.classes = 7;
        mc.dropout = 0.0;
        ModelParams params = ModelParams::init(mc, ab, 7);
        GradCheckReport rep = gradient_check(s, params, 0.2, 0.6, 3, bank, 31);
        CHECK(rep.max_rel_err < 1e-4);
    }
}
