#include "mmci/gradcheck.hpp"

#include <cmath>

namespace mmci {

Sample make_toy_sample(std::size_t n_text, std::size_t n_audio, std::size_t n_visual,
                       std::size_t d_text, std::size_t d_audio, std::size_t d_visual,
                       std::uint64_t seed) {
    Rng rng(seed);
    Sample s;
    s.id = "toy-" + std::to_string(seed);
    s.n_text = n_text;
    s.n_audio = n_audio;
    s.n_visual = n_visual;
    s.d_text = d_text;
    s.d_audio = d_audio;
    s.d_visual = d_visual;
    auto fill = [&](std::vector<double>& m, std::size_t n, std::size_t d) {
        m.resize(n * d);
        for (double& v : m) v = rng.gaussian();
    };
    fill(s.text_feats, n_text, d_text);
    fill(s.audio_feats, n_audio, d_audio);
    fill(s.visual_feats, n_visual, d_visual);
    for (std::size_t i = 0; i + 1 < n_text; ++i) s.dep_edges.emplace_back(i, i + 1);
    if (n_text >= 3) s.dep_edges.emplace_back(0, n_text - 1);
    s.label = rng.uniform(-3.0, 3.0);
    return s;
}

GradCheckReport gradient_check(const Sample& s, ModelParams& params, double lambda,
                               double beta, std::size_t k,
                               const InterventionBank& bank, std::uint64_t draw_seed,
                               double h) {
    auto eval_loss = [&]() {
        Tape tape;
        ForwardResult fr = forward(tape, s, params, Mode::Eval);
        Rng draw_rng(draw_seed);
        LossBundle bundle;
        Tensor total = total_loss(tape, {fr.y_causal}, {fr.y_shortcut},
                                  {fr.pooled_causal}, {s.label}, bank, lambda, beta,
                                  k, draw_rng, params, bundle);
        double v = total.value();
        tape.clear();
        return v;
    };

    // analytic gradients
    auto tensors = params.all_tensors();
    auto names = params.tensor_names();
    for (auto& t : tensors) t.zero_grad();
    {
        Tape tape;
        ForwardResult fr = forward(tape, s, params, Mode::Eval);
        Rng draw_rng(draw_seed);
        LossBundle bundle;
        Tensor total = total_loss(tape, {fr.y_causal}, {fr.y_shortcut},
                                  {fr.pooled_causal}, {s.label}, bank, lambda, beta,
                                  k, draw_rng, params, bundle);
        tape.backward(total);
    }

    GradCheckReport rep;
    for (std::size_t p = 0; p < tensors.size(); ++p) {
        auto& data = tensors[p].data();
        auto& grad = tensors[p].grad();
        for (std::size_t i = 0; i < data.size(); ++i) {
            double keep = data[i];
            data[i] = keep + h;
            double up = eval_loss();
            data[i] = keep - h;
            double down = eval_loss();
            data[i] = keep;
            double numeric = (up - down) / (2.0 * h);
            double err = std::abs(grad[i] - numeric) /
                         std::max(1.0, std::abs(numeric));
            if (err > rep.max_rel_err) {
                rep.max_rel_err = err;
                rep.worst_param = names[p] + "[" + std::to_string(i) + "]";
            }
            ++rep.n_checked;
        }
    }
    return rep;
}

}  // namespace mmci
