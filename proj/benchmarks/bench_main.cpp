#include <benchmark/benchmark.h>

#include "mmci/gradcheck.hpp"
#include "mmci/graph.hpp"
#include "mmci/model.hpp"
#include "mmci/objective.hpp"
#include "mmci/scm.hpp"

using namespace mmci;

namespace {

ModelParams bench_params(std::size_t d, const Sample& s) {
    ModelConfig mc;
    mc.d = d;
    mc.d_text = s.d_text;
    mc.d_audio = s.d_audio;
    mc.d_visual = s.d_visual;
    mc.dropout = 0.0;
    return ModelParams::init(mc, Ablation::None, 1);
}

void BM_BuildGraph(benchmark::State& state) {
    Sample s = make_toy_sample(16, 16, 16, 8, 6, 6, 1);
    for (auto _ : state) benchmark::DoNotOptimize(build_graph(s));
}
BENCHMARK(BM_BuildGraph);

void BM_Forward(benchmark::State& state) {
    Sample s = make_toy_sample(8, 8, 8, 8, 6, 6, 1);
    ModelParams p = bench_params(static_cast<std::size_t>(state.range(0)), s);
    for (auto _ : state) {
        Tape tape;
        benchmark::DoNotOptimize(forward(tape, s, p, Mode::Eval));
        tape.clear();
    }
}
BENCHMARK(BM_Forward)->Arg(16)->Arg(32);

void BM_ForwardBackward(benchmark::State& state) {
    Sample s = make_toy_sample(8, 8, 8, 8, 6, 6, 1);
    ModelParams p = bench_params(16, s);
    InterventionBank bank(64);
    Rng rng(2);
    for (int e = 0; e < 8; ++e) {
        std::vector<double> v(16);
        for (auto& x : v) x = rng.gaussian();
        bank.insert(std::move(v), "b");
    }
    for (auto _ : state) {
        Tape tape;
        ForwardResult fr = forward(tape, s, p, Mode::Eval);
        Rng draw(3);
        LossBundle bundle;
        Tensor total = total_loss(tape, {fr.y_causal}, {fr.y_shortcut},
                                  {fr.pooled_causal}, {s.label}, bank, 0.2, 0.6, 4,
                                  draw, p, bundle);
        for (auto& t : p.all_tensors()) t.zero_grad();
        tape.backward(total);
        tape.clear();
    }
}
BENCHMARK(BM_ForwardBackward);

void BM_BackdoorAdjust(benchmark::State& state) {
    DiscreteScm m = DiscreteScm::random(5, 4);
    for (auto _ : state)
        for (std::size_t c = 0; c < m.card_c; ++c)
            benchmark::DoNotOptimize(backdoor_adjust(m, c));
}
BENCHMARK(BM_BackdoorAdjust);

}  // namespace

BENCHMARK_MAIN();
