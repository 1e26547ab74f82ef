#include "mmci/model.hpp"

#include <cmath>

namespace mmci {

std::string ablation_name(Ablation a) {
    switch (a) {
        case Ablation::None: return "none";
        case Ablation::NoIntra: return "no-intra";
        case Ablation::NoInter: return "no-inter";
        case Ablation::NoDisentangle: return "no-disentangle";
        case Ablation::NoIntervention: return "no-intervention";
        case Ablation::NoKL: return "no-kl";
    }
    return "none";
}

Ablation ablation_from_name(const std::string& name) {
    if (name == "none") return Ablation::None;
    if (name == "no-intra") return Ablation::NoIntra;
    if (name == "no-inter") return Ablation::NoInter;
    if (name == "no-disentangle") return Ablation::NoDisentangle;
    if (name == "no-intervention") return Ablation::NoIntervention;
    if (name == "no-kl") return Ablation::NoKL;
    throw config_error("unknown ablation: " + name);
}

bool relation_active(Ablation a, int r) {
    if (a == Ablation::NoInter) return r < 3;  // TT, AA, VV only
    return true;
}

namespace {

Tensor xavier(Rng& rng, std::size_t fan_in, std::size_t fan_out,
              std::vector<std::size_t> shape) {
    double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Tensor t = Tensor::zeros(std::move(shape), true);
    for (double& v : t.data()) v = rng.uniform(-bound, bound);
    return t;
}

Mlp init_mlp(Rng& rng, std::size_t in, std::size_t hidden, std::size_t out) {
    Mlp m;
    m.w1 = xavier(rng, in, hidden, {in, hidden});
    m.b1 = Tensor::zeros({hidden}, true);
    m.w2 = xavier(rng, hidden, out, {hidden, out});
    m.b2 = Tensor::zeros({out}, true);
    return m;
}

void push_mlp(const Mlp& m, const std::string& prefix, std::vector<Tensor>& ts,
              std::vector<std::string>* names) {
    ts.push_back(m.w1);
    ts.push_back(m.b1);
    ts.push_back(m.w2);
    ts.push_back(m.b2);
    if (names) {
        names->push_back(prefix + ".w1");
        names->push_back(prefix + ".b1");
        names->push_back(prefix + ".w2");
        names->push_back(prefix + ".b2");
    }
}

}  // namespace

ModelParams ModelParams::init(const ModelConfig& cfg, Ablation ablation,
                              std::uint64_t seed) {
    ModelParams p;
    p.cfg = cfg;
    p.ablation = ablation;
    p.seed = seed;
    Rng rng(seed);

    p.proj_text = xavier(rng, cfg.d_text, cfg.d, {cfg.d_text, cfg.d});
    p.proj_text_b = Tensor::zeros({cfg.d}, true);
    p.proj_audio = xavier(rng, cfg.d_audio, cfg.d, {cfg.d_audio, cfg.d});
    p.proj_audio_b = Tensor::zeros({cfg.d}, true);
    p.proj_visual = xavier(rng, cfg.d_visual, cfg.d, {cfg.d_visual, cfg.d});
    p.proj_visual_b = Tensor::zeros({cfg.d}, true);

    std::size_t sets = ablation == Ablation::NoIntra ? 1 : kNumRelations;
    for (std::size_t r = 0; r < sets; ++r) {
        RelationParams rp;
        rp.attn = init_mlp(rng, 2 * cfg.d, cfg.attn_hidden(), 2);
        rp.w_causal = xavier(rng, cfg.d, cfg.d, {cfg.d, cfg.d});
        // start the shortcut propagation at the causal weights so both
        // branches share one representation space before they diverge;
        // intervention perturbations then act on the directions the causal
        // readout actually uses
        rp.w_shortcut = Tensor::from({cfg.d, cfg.d}, rp.w_causal.data(), true);
        p.relations.push_back(std::move(rp));
    }

    p.head_causal = init_mlp(rng, cfg.d, cfg.head_hidden(), 1);
    p.head_shortcut = init_mlp(rng, cfg.d, cfg.head_hidden(), cfg.classes);
    return p;
}

std::vector<Tensor> ModelParams::all_tensors() const {
    std::vector<Tensor> ts;
    ts.push_back(proj_text);
    ts.push_back(proj_text_b);
    ts.push_back(proj_audio);
    ts.push_back(proj_audio_b);
    ts.push_back(proj_visual);
    ts.push_back(proj_visual_b);
    for (const auto& rp : relations) {
        push_mlp(rp.attn, "", ts, nullptr);
        ts.push_back(rp.w_causal);
        ts.push_back(rp.w_shortcut);
    }
    push_mlp(head_causal, "", ts, nullptr);
    push_mlp(head_shortcut, "", ts, nullptr);
    return ts;
}

std::vector<std::string> ModelParams::tensor_names() const {
    std::vector<Tensor> ts;
    std::vector<std::string> names;
    auto add = [&](const Tensor& t, const std::string& n) {
        ts.push_back(t);
        names.push_back(n);
    };
    add(proj_text, "proj_text");
    add(proj_text_b, "proj_text_b");
    add(proj_audio, "proj_audio");
    add(proj_audio_b, "proj_audio_b");
    add(proj_visual, "proj_visual");
    add(proj_visual_b, "proj_visual_b");
    for (std::size_t r = 0; r < relations.size(); ++r) {
        std::string pre = "rel" + std::to_string(r);
        push_mlp(relations[r].attn, pre + ".attn", ts, &names);
        add(relations[r].w_causal, pre + ".w_causal");
        add(relations[r].w_shortcut, pre + ".w_shortcut");
    }
    push_mlp(head_causal, "head_causal", ts, &names);
    push_mlp(head_shortcut, "head_shortcut", ts, &names);
    return names;
}

Tensor apply_mlp(Tape& tape, const Mlp& m, const Tensor& x) {
    Tensor hidden = tape.activation(
        tape.add_rowvec(tape.matmul(x, m.w1), m.b1));
    return tape.add_rowvec(tape.matmul(hidden, m.w2), m.b2);
}

Tensor project(Tape& tape, const MultiRelGraph& g, const Sample& s,
               const ModelParams& p) {
    if (s.d_text != p.cfg.d_text || s.d_audio != p.cfg.d_audio ||
        s.d_visual != p.cfg.d_visual) {
        throw config_error("sample feature dims do not match model config");
    }
    Tensor xt = Tensor::from({s.n_text, s.d_text}, s.text_feats);
    Tensor xa = Tensor::from({s.n_audio, s.d_audio}, s.audio_feats);
    Tensor xv = Tensor::from({s.n_visual, s.d_visual}, s.visual_feats);
    Tensor ht = tape.add_rowvec(tape.matmul(xt, p.proj_text), p.proj_text_b);
    Tensor ha = tape.add_rowvec(tape.matmul(xa, p.proj_audio), p.proj_audio_b);
    Tensor hv = tape.add_rowvec(tape.matmul(xv, p.proj_visual), p.proj_visual_b);
    (void)g;
    return tape.concat_rows(tape.concat_rows(ht, ha), hv);
}

AttentionScores attend(Tape& tape, const Tensor& h, const MultiRelGraph& g,
                       const ModelParams& p) {
    AttentionScores sc;
    for (int r = 0; r < kNumRelations; ++r) {
        if (!relation_active(p.ablation, r)) continue;
        const auto& edges = g.edges[r];
        if (edges.empty()) continue;
        for (auto [i, j] : edges) {
            sc.dst[r].push_back(i);
            sc.src[r].push_back(j);
        }
        Tensor hi = tape.gather_rows(h, sc.dst[r]);
        Tensor hj = tape.gather_rows(h, sc.src[r]);
        Tensor logits = apply_mlp(tape, p.relation(r).attn,
                                  tape.concat_cols(hi, hj));
        sc.alpha[r] = tape.softmax(logits);
    }
    return sc;
}

std::array<DualRepresentation, kNumRelations> propagate(
    Tape& tape, const Tensor& h, const AttentionScores& scores,
    const MultiRelGraph& g, const ModelParams& p) {
    std::size_t n = g.total_nodes();
    std::array<DualRepresentation, kNumRelations> out;
    for (int r = 0; r < kNumRelations; ++r) {
        if (!scores.alpha[r].defined()) continue;
        Tensor alpha_c = tape.select_col(scores.alpha[r], 0);
        Tensor alpha_s = tape.select_col(scores.alpha[r], 1);
        Tensor msg_c = tape.matmul(h, p.relation(r).w_causal);
        Tensor msg_s = tape.matmul(h, p.relation(r).w_shortcut);
        out[r].causal = tape.activation(tape.edge_weighted_sum(
            msg_c, scores.dst[r], scores.src[r], alpha_c, n));
        out[r].shortcut = tape.activation(tape.edge_weighted_sum(
            msg_s, scores.dst[r], scores.src[r], alpha_s, n));
    }
    return out;
}

DualRepresentation aggregate(
    Tape& tape, const std::array<DualRepresentation, kNumRelations>& per_rel) {
    DualRepresentation agg;
    for (const auto& dr : per_rel) {
        if (!dr.causal.defined()) continue;
        agg.causal = agg.causal.defined() ? tape.add(agg.causal, dr.causal)
                                          : dr.causal;
        agg.shortcut = agg.shortcut.defined() ? tape.add(agg.shortcut, dr.shortcut)
                                              : dr.shortcut;
    }
    if (!agg.causal.defined())
        throw dimension_error("aggregate: no active relations");
    return agg;
}

Tensor readout(Tape& tape, const Tensor& h) { return tape.mean_rows(h); }

Tensor predict_causal(Tape& tape, const Tensor& pooled, const ModelParams& p) {
    return apply_mlp(tape, p.head_causal, pooled);
}

Tensor predict_shortcut(Tape& tape, const Tensor& pooled, const ModelParams& p) {
    return tape.softmax(apply_mlp(tape, p.head_shortcut, pooled));
}

ForwardResult forward(Tape& tape, const Sample& s, const ModelParams& p,
                      Mode mode, Rng* dropout_rng) {
    MultiRelGraph g = build_graph(s);
    Tensor h = project(tape, g, s, p);
    bool use_dropout = mode == Mode::Train && p.cfg.dropout > 0.0;
    if (use_dropout) {
        if (!dropout_rng) throw config_error("train-mode dropout needs an rng");
        h = tape.dropout(h, p.cfg.dropout, *dropout_rng);
    }
    ForwardResult out;
    out.scores = attend(tape, h, g, p);
    auto per_rel = propagate(tape, h, out.scores, g, p);
    out.nodes = aggregate(tape, per_rel);
    if (use_dropout) {
        out.nodes.causal = tape.dropout(out.nodes.causal, p.cfg.dropout, *dropout_rng);
        out.nodes.shortcut = tape.dropout(out.nodes.shortcut, p.cfg.dropout, *dropout_rng);
    }
    out.pooled_causal = readout(tape, out.nodes.causal);
    out.pooled_shortcut = readout(tape, out.nodes.shortcut);
    out.y_causal = predict_causal(tape, out.pooled_causal, p);
    out.y_shortcut = predict_shortcut(tape, out.pooled_shortcut, p);
    return out;
}

}  // namespace mmci
