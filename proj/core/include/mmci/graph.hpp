#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "mmci/errors.hpp"

namespace mmci {

// Six relation types: three intra-modal, three inter-modal. Order is fixed;
// the index doubles as the relation id everywhere.
enum class RelationKind : int { TT = 0, AA = 1, VV = 2, TV = 3, TA = 4, VA = 5 };

inline constexpr int kNumRelations = 6;
inline constexpr std::array<const char*, kNumRelations> kRelationNames = {
    "TT", "AA", "VV", "TV", "TA", "VA"};

using Edge = std::pair<std::size_t, std::size_t>;

// One multimodal instance: per-modality node features, text dependency
// edges, and a scalar label.
struct Sample {
    std::string id;
    // row-major [rows x dim]
    std::vector<double> text_feats;
    std::vector<double> audio_feats;
    std::vector<double> visual_feats;
    std::size_t n_text = 0, n_audio = 0, n_visual = 0;
    std::size_t d_text = 0, d_audio = 0, d_visual = 0;
    std::vector<Edge> dep_edges;  // indices into [0, n_text)
    double label = 0.0;

    void validate() const;
};

// Unified node set with six typed edge lists. Node indices run text block,
// then audio block, then visual block.
struct MultiRelGraph {
    std::size_t n_text = 0, n_audio = 0, n_visual = 0;
    std::size_t total_nodes() const { return n_text + n_audio + n_visual; }
    std::size_t offset_text() const { return 0; }
    std::size_t offset_audio() const { return n_text; }
    std::size_t offset_visual() const { return n_text + n_audio; }
    // directed edge lists; symmetric closure is maintained by construction
    std::array<std::vector<Edge>, kNumRelations> edges;
};

// Eq-style construction: TT from the dependency tree plus self-loops, AA/VV
// temporal chains plus self-loops, inter-modal pairs by proportional
// temporal alignment. All lists symmetrized.
MultiRelGraph build_graph(const Sample& s);

std::size_t edge_count(const MultiRelGraph& g, RelationKind r);

// modality-B index temporally aligned with index i of modality A
std::size_t align_index(std::size_t i, std::size_t n_from, std::size_t n_to);

}  // namespace mmci
