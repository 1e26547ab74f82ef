#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mmci/graph.hpp"
#include "mmci/tensor.hpp"

namespace mmci {

enum class Ablation {
    None,
    NoIntra,         // one parameter set shared by all relations
    NoInter,         // TV/TA/VA edges dropped
    NoDisentangle,   // lambda = 0
    NoIntervention,  // beta = 0
    NoKL,            // uniformity loss replaced by shortcut-regression MSE
};

std::string ablation_name(Ablation a);
Ablation ablation_from_name(const std::string& name);

struct ModelConfig {
    std::size_t d = 32;  // shared latent dimension
    std::size_t d_text = 8, d_audio = 6, d_visual = 6;
    std::size_t classes = 7;  // shortcut-head class count
    double dropout = 0.0;
    double label_lo = -3.0, label_hi = 3.0;

    std::size_t attn_hidden() const { return d >= 2 ? d / 2 : 1; }
    std::size_t head_hidden() const { return d >= 2 ? d / 2 : 1; }
};

struct Mlp {
    Tensor w1, b1, w2, b2;
};

// One relation's parameters: an attention MLP producing the two logits of
// the causal/shortcut split, and the two propagation transforms.
struct RelationParams {
    Mlp attn;            // 2d -> attn_hidden -> 2
    Tensor w_causal;     // [d x d]
    Tensor w_shortcut;   // [d x d]
};

struct ModelParams {
    ModelConfig cfg;
    Ablation ablation = Ablation::None;
    std::uint64_t seed = 0;

    Tensor proj_text, proj_text_b;      // [d_text x d], [d]
    Tensor proj_audio, proj_audio_b;
    Tensor proj_visual, proj_visual_b;
    std::vector<RelationParams> relations;  // 6 sets, or 1 under NoIntra
    Mlp head_causal;    // d -> head_hidden -> 1
    Mlp head_shortcut;  // d -> head_hidden -> classes

    static ModelParams init(const ModelConfig& cfg, Ablation ablation,
                            std::uint64_t seed);

    std::size_t relation_param_sets() const { return relations.size(); }
    const RelationParams& relation(int r) const {
        return relations[relations.size() == 1 ? 0 : std::size_t(r)];
    }

    // every learnable tensor, in the fixed checkpoint/optimizer order
    std::vector<Tensor> all_tensors() const;
    std::vector<std::string> tensor_names() const;
};

// Attention weights per relation; undefined Tensor for relations with no
// edges under the current ablation.
struct AttentionScores {
    std::array<Tensor, kNumRelations> alpha;  // [E x 2]: col 0 causal, col 1 shortcut
    std::array<std::vector<std::size_t>, kNumRelations> dst, src;
};

struct DualRepresentation {
    Tensor causal;    // [N x d]
    Tensor shortcut;  // [N x d]
};

enum class Mode { Train, Eval };

struct ForwardResult {
    Tensor y_causal;          // [1 x 1] regression output
    Tensor y_shortcut;        // [1 x classes], softmax-normalized
    Tensor pooled_causal;     // [1 x d] readout(H_c)
    Tensor pooled_shortcut;   // [1 x d] readout(H_s)
    DualRepresentation nodes;
    AttentionScores scores;
};

// --- stages of the pipeline (composed by forward) ---
Tensor project(Tape& tape, const MultiRelGraph& g, const Sample& s,
               const ModelParams& p);
AttentionScores attend(Tape& tape, const Tensor& h, const MultiRelGraph& g,
                       const ModelParams& p);
std::array<DualRepresentation, kNumRelations> propagate(
    Tape& tape, const Tensor& h, const AttentionScores& scores,
    const MultiRelGraph& g, const ModelParams& p);
DualRepresentation aggregate(
    Tape& tape, const std::array<DualRepresentation, kNumRelations>& per_rel);
Tensor readout(Tape& tape, const Tensor& h);
Tensor predict_causal(Tape& tape, const Tensor& pooled, const ModelParams& p);
Tensor predict_shortcut(Tape& tape, const Tensor& pooled, const ModelParams& p);

Tensor apply_mlp(Tape& tape, const Mlp& m, const Tensor& x);

// Full pipeline. `dropout_rng` is consumed only in Train mode with a
// nonzero dropout rate.
ForwardResult forward(Tape& tape, const Sample& s, const ModelParams& p,
                      Mode mode, Rng* dropout_rng = nullptr);

// relations participating under the ablation (NoInter drops the last three)
bool relation_active(Ablation a, int r);

}  // namespace mmci
