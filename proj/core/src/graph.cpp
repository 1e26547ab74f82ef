#include "mmci/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mmci {

namespace {

void check_matrix(const std::vector<double>& m, std::size_t rows, std::size_t dim,
                  const char* name) {
    if (rows < 1 || dim < 1) throw dimension_error(std::string(name) + ": empty modality");
    if (m.size() != rows * dim)
        throw dimension_error(std::string(name) + ": feature size does not match declared dims");
    for (double v : m)
        if (!std::isfinite(v)) throw numeric_error(std::string(name) + ": non-finite feature");
}

std::vector<Edge> symmetrize(std::set<Edge> s) {
    std::set<Edge> full;
    for (auto [i, j] : s) {
        full.emplace(i, j);
        full.emplace(j, i);
    }
    return {full.begin(), full.end()};
}

}  // namespace

void Sample::validate() const {
    check_matrix(text_feats, n_text, d_text, "text");
    check_matrix(audio_feats, n_audio, d_audio, "audio");
    check_matrix(visual_feats, n_visual, d_visual, "visual");
    for (auto [i, j] : dep_edges) {
        if (i >= n_text || j >= n_text)
            throw dimension_error("dependency edge index out of range");
    }
}

std::size_t align_index(std::size_t i, std::size_t n_from, std::size_t n_to) {
    double pos = static_cast<double>(i) * static_cast<double>(n_to) /
                 static_cast<double>(n_from);
    // ties-to-even, so i*n_to/n_from = 0.5 maps to 0
    auto j = static_cast<std::size_t>(std::rint(pos));
    return std::min(j, n_to - 1);
}

MultiRelGraph build_graph(const Sample& s) {
    s.validate();
    MultiRelGraph g;
    g.n_text = s.n_text;
    g.n_audio = s.n_audio;
    g.n_visual = s.n_visual;

    std::size_t ot = g.offset_text(), oa = g.offset_audio(), ov = g.offset_visual();

    // intra-modal: text dependency tree, audio/visual temporal chains;
    // self-loops keep every node's neighborhood non-empty
    std::set<Edge> tt;
    for (auto [i, j] : s.dep_edges) tt.emplace(ot + i, ot + j);
    for (std::size_t i = 0; i < s.n_text; ++i) tt.emplace(ot + i, ot + i);
    g.edges[int(RelationKind::TT)] = symmetrize(std::move(tt));

    auto chain = [](std::size_t off, std::size_t n) {
        std::set<Edge> e;
        for (std::size_t i = 0; i + 1 < n; ++i) e.emplace(off + i, off + i + 1);
        for (std::size_t i = 0; i < n; ++i) e.emplace(off + i, off + i);
        return symmetrize(std::move(e));
    };
    g.edges[int(RelationKind::AA)] = chain(oa, s.n_audio);
    g.edges[int(RelationKind::VV)] = chain(ov, s.n_visual);

    // inter-modal: proportional temporal alignment, both directions so that
    // every node of either modality has a partner
    auto aligned = [](std::size_t off_a, std::size_t n_a, std::size_t off_b,
                      std::size_t n_b) {
        std::set<Edge> e;
        for (std::size_t i = 0; i < n_a; ++i)
            e.emplace(off_a + i, off_b + align_index(i, n_a, n_b));
        for (std::size_t i = 0; i < n_b; ++i)
            e.emplace(off_b + i, off_a + align_index(i, n_b, n_a));
        return symmetrize(std::move(e));
    };
    g.edges[int(RelationKind::TV)] = aligned(ot, s.n_text, ov, s.n_visual);
    g.edges[int(RelationKind::TA)] = aligned(ot, s.n_text, oa, s.n_audio);
    g.edges[int(RelationKind::VA)] = aligned(ov, s.n_visual, oa, s.n_audio);

    return g;
}

std::size_t edge_count(const MultiRelGraph& g, RelationKind r) {
    return g.edges[int(r)].size();
}

}  // namespace mmci
