#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmci/errors.hpp"
#include "mmci/rng.hpp"

namespace mmci {

// Finite structural causal model over the five variables of the bias
// graph: relations feed both the causal feature and the shortcut feature,
// which meet in the fused representation before the prediction.
//
//   relation -> causal_feature, relation -> shortcut_feature,
//   (causal_feature, shortcut_feature) -> fused -> outcome
struct DiscreteScm {
    // cardinalities, each in [1, 16]
    std::size_t card_r = 2, card_c = 2, card_z = 2, card_m = 2, card_y = 2;

    std::vector<double> p_r;             // [card_r]
    std::vector<double> p_c_given_r;     // [card_r][card_c]
    std::vector<double> p_z_given_r;     // [card_r][card_z]
    std::vector<double> p_m_given_cz;    // [card_c][card_z][card_m]
    std::vector<double> p_y_given_m;     // [card_m][card_y]

    void validate() const;  // rows sum to 1, non-negative entries

    static DiscreteScm random(std::uint64_t seed, std::size_t max_card = 4,
                              double floor = 0.05);
    // canned demonstrators
    static DiscreteScm canned(const std::string& name);
};

// full joint P(r, c, z, m, y), index order (r, c, z, m, y) row-major
std::vector<double> joint(const DiscreteScm& scm);

// P(Y | C = c) by conditioning the joint
std::vector<double> observational(const DiscreteScm& scm, std::size_t c);

// P(Y | do(C = c)) on the mutilated graph (relation -> causal edge removed)
std::vector<double> interventional_truth(const DiscreteScm& scm, std::size_t c);

// sum over z of P(Y | C = c, z) P(z); throws std::domain_error naming the
// stratum if positivity fails
std::vector<double> backdoor_adjust(const DiscreteScm& scm, std::size_t c);

double total_variation(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace mmci
