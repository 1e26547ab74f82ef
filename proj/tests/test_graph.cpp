#include <algorithm>

#include <doctest.h>

#include "mmci/graph.hpp"
#include "mmci/rng.hpp"

using namespace mmci;

namespace {

Sample tiny_sample(std::size_t nt, std::size_t na, std::size_t nv,
                   std::vector<Edge> deps = {}) {
    Sample s;
    s.id = "tiny";
    s.n_text = nt;
    s.n_audio = na;
    s.n_visual = nv;
    s.d_text = s.d_audio = s.d_visual = 2;
    s.text_feats.assign(nt * 2, 0.5);
    s.audio_feats.assign(na * 2, 0.5);
    s.visual_feats.assign(nv * 2, 0.5);
    s.dep_edges = std::move(deps);
    return s;
}

bool has_edge(const MultiRelGraph& g, RelationKind r, std::size_t i,
              std::size_t j) {
    const auto& es = g.edges[static_cast<int>(r)];
    return std::find(es.begin(), es.end(), Edge{i, j}) != es.end();
}

}  // namespace

TEST_CASE("two-word sentence: TT symmetrized with self-loops, singleton AA/VV") {
    MultiRelGraph g = build_graph(tiny_sample(2, 1, 1, {{0, 1}}));
    CHECK(edge_count(g, RelationKind::TT) == 4);
    CHECK(has_edge(g, RelationKind::TT, 0, 1));
    CHECK(has_edge(g, RelationKind::TT, 1, 0));
    CHECK(has_edge(g, RelationKind::TT, 0, 0));
    CHECK(has_edge(g, RelationKind::TT, 1, 1));
    CHECK(edge_count(g, RelationKind::AA) == 1);
    CHECK(has_edge(g, RelationKind::AA, 2, 2));
    CHECK(edge_count(g, RelationKind::VV) == 1);
    CHECK(has_edge(g, RelationKind::VV, 3, 3));
}

TEST_CASE("no dependency edges: TT falls back to self-loops only") {
    MultiRelGraph g = build_graph(tiny_sample(3, 1, 1));
    CHECK(edge_count(g, RelationKind::TT) == 3);
}

TEST_CASE("temporal chain of five audio nodes has 2*4 + 5 directed edges") {
    MultiRelGraph g = build_graph(tiny_sample(1, 5, 1));
    CHECK(edge_count(g, RelationKind::AA) == 13);
}

TEST_CASE("equal sequence lengths align position to position") {
    MultiRelGraph g = build_graph(tiny_sample(3, 3, 3));
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(has_edge(g, RelationKind::TA, i, i + 3));
        CHECK(has_edge(g, RelationKind::TA, i + 3, i));
        CHECK(has_edge(g, RelationKind::TV, i, i + 6));
        CHECK(has_edge(g, RelationKind::VA, i + 6, i + 3));
    }
}

TEST_CASE("proportional alignment: 4 text nodes onto 2 audio nodes") {
    CHECK(align_index(0, 4, 2) == 0);
    CHECK(align_index(1, 4, 2) == 0);  // round(0.5) resolves to 0, ties-to-even
    CHECK(align_index(2, 4, 2) == 1);
    CHECK(align_index(3, 4, 2) == 1);

    MultiRelGraph g = build_graph(tiny_sample(4, 2, 1));
    // audio block starts at 4
    CHECK(has_edge(g, RelationKind::TA, 0, 4));
    CHECK(has_edge(g, RelationKind::TA, 1, 4));
    CHECK(has_edge(g, RelationKind::TA, 2, 5));
    CHECK(has_edge(g, RelationKind::TA, 3, 5));
}

TEST_CASE("every relation's edge list is symmetric and block-disciplined") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t nt = 1 + rng.bounded(5), na = 1 + rng.bounded(5),
                    nv = 1 + rng.bounded(5);
        std::vector<Edge> deps;
        for (std::size_t e = 0; e + 1 < nt && e < 3; ++e)
            deps.push_back({rng.bounded(nt), rng.bounded(nt)});
        MultiRelGraph g = build_graph(tiny_sample(nt, na, nv, deps));
        auto in_block = [&](std::size_t i, std::size_t lo, std::size_t hi) {
            return i >= lo && i < hi;
        };
        struct Blocks {
            std::size_t alo, ahi, blo, bhi;
        };
        std::size_t T = nt, A = nt + na, V = nt + na + nv;
        const Blocks blocks[kNumRelations] = {
            {0, T, 0, T},  {T, A, T, A}, {A, V, A, V},
            {0, T, A, V},  {0, T, T, A}, {A, V, T, A}};
        for (int r = 0; r < kNumRelations; ++r) {
            for (const auto& [i, j] : g.edges[r]) {
                bool fwd = in_block(i, blocks[r].alo, blocks[r].ahi) &&
                           in_block(j, blocks[r].blo, blocks[r].bhi);
                bool rev = in_block(j, blocks[r].alo, blocks[r].ahi) &&
                           in_block(i, blocks[r].blo, blocks[r].bhi);
                CHECK((fwd || rev));
                CHECK(has_edge(g, static_cast<RelationKind>(r), j, i));
            }
        }
    }
}

TEST_CASE("dependency edge out of range is rejected") {
    Sample s = tiny_sample(2, 1, 1, {{0, 5}});
    CHECK_THROWS_AS((void)build_graph(s), dimension_error);
}
