#pragma once

#include <cstdint>
#include <string>

#include "mmci/objective.hpp"

namespace mmci {

struct GradCheckReport {
    double max_rel_err = 0.0;
    std::string worst_param;
    std::size_t n_checked = 0;
};

// random sample with finite gaussian features and a chain dependency tree
Sample make_toy_sample(std::size_t n_text, std::size_t n_audio, std::size_t n_visual,
                       std::size_t d_text, std::size_t d_audio, std::size_t d_visual,
                       std::uint64_t seed);

// Central finite differences of the full combined loss against the analytic
// backward pass, over every parameter entry. Draws from the bank are
// re-seeded per evaluation so both routes see the same loss function.
GradCheckReport gradient_check(const Sample& s, ModelParams& params, double lambda,
                               double beta, std::size_t k,
                               const InterventionBank& bank, std::uint64_t draw_seed,
                               double h = 1e-5);

}  // namespace mmci
