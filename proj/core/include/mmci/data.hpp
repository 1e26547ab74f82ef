#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmci/config.hpp"
#include "mmci/graph.hpp"
#include "mmci/rng.hpp"

namespace mmci {

// Generator spec: labels are uniform in label range; a causal signal is
// written into coordinate 0 of every modality; two shortcut channels (one
// text token row, one shared audio+visual coordinate) carry a signal whose
// correlation with the label is rho_train on train/val/test and rho_ood on
// the shifted split.
struct GenSpec {
    std::size_t n_train = 200, n_val = 100, n_test = 100, n_ood = 200;
    std::size_t n_text = 6, n_audio = 6, n_visual = 6;
    std::size_t d_text = 8, d_audio = 6, d_visual = 6;
    double causal_strength = 1.0;
    double rho_train = 0.9;
    double rho_ood = -0.9;
    double noise_sigma = 0.3;
    double label_lo = -3.0, label_hi = 3.0;
    std::size_t extra_dep_edges = 2;  // random long-range text edges
    std::uint64_t seed = 1;

    void validate() const;
    static GenSpec from_config(const KeyValueConfig& cfg);
    KeyValueConfig to_config() const;
    std::uint64_t hash() const;
};

enum class Split { Train, Val, Test, Ood };
std::string split_name(Split s);

struct Dataset {
    std::vector<Sample> samples;
    Split split = Split::Train;
    double label_lo = -3.0, label_hi = 3.0;
    std::uint64_t spec_hash = 0;
};

struct GeneratedData {
    Dataset train, val, test, ood;
};

GeneratedData generate(const GenSpec& spec);

// versioned binary container; round-trips bit-exactly
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

inline constexpr const char* kDatasetMagic = "MMCI-DATA";
inline constexpr int kDatasetVersion = 1;

// designated feature positions used by the generator and by probes
inline constexpr std::size_t kCausalCoord = 0;
inline constexpr std::size_t kShortcutCoord = 1;
inline constexpr double kShortcutGain = 2.5;
inline constexpr double kNuisanceAmp = 2.0;
std::size_t shortcut_text_row(std::size_t n_text);

}  // namespace mmci
