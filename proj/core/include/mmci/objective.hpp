#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "mmci/model.hpp"
#include "mmci/tensor.hpp"

namespace mmci {

// FIFO bank of detached graph-level shortcut vectors. Stands in for the
// stratification set: entries act as confounder strata and carry no
// gradient.
class InterventionBank {
public:
    explicit InterventionBank(std::size_t capacity = 256) : capacity_(capacity) {}

    void insert(std::vector<double> pooled_shortcut, const std::string& sample_id);
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    std::size_t capacity() const { return capacity_; }

    // k indices drawn uniformly with replacement; seeded and reproducible
    std::vector<std::size_t> draw(std::size_t k, Rng& rng) const;
    const std::vector<double>& entry(std::size_t i) const { return entries_[i].vec; }
    const std::string& entry_id(std::size_t i) const { return entries_[i].id; }

private:
    struct Entry {
        std::vector<double> vec;
        std::string id;
    };
    std::size_t capacity_;
    std::deque<Entry> entries_;
};

struct LossBundle {
    double l_sup = 0.0;
    double l_unif = 0.0;
    double l_intv = 0.0;
    double lambda = 0.0;
    double beta = 0.0;
    double total = 0.0;
    bool intervention_warmup = false;  // bank was empty; l_intv forced to 0
};

// --- loss terms over one batch of forward results ---

// mean squared error between causal predictions and labels
Tensor loss_sup(Tape& tape, const std::vector<Tensor>& preds,
                const std::vector<double>& labels);

// batch mean of KL(uniform || y_shortcut)
Tensor loss_unif(Tape& tape, const std::vector<Tensor>& shortcut_probs,
                 std::size_t classes);

// "no-kl" replacement: regress the shortcut head's expected bucket value
// onto the labels
Tensor loss_shortcut_regression(Tape& tape,
                                const std::vector<Tensor>& shortcut_probs,
                                const std::vector<double>& labels,
                                const ModelConfig& cfg);

// stratified intervention loss: for each sample, k bank entries are added
// to the pooled causal vector before the shared causal head. Returns an
// undefined Tensor when the bank is empty (warm-up).
Tensor loss_intv(Tape& tape, const std::vector<Tensor>& pooled_causal,
                 const std::vector<double>& labels, const InterventionBank& bank,
                 std::size_t k, Rng& draw_rng, const ModelParams& params);

// Combines the three terms per the ablation. Returns the scalar loss tensor
// for backward and fills `out` with the component values; out.total is
// computed as l_sup + lambda*l_unif + beta*l_intv in exactly that order.
Tensor total_loss(Tape& tape, const std::vector<Tensor>& preds,
                  const std::vector<Tensor>& shortcut_probs,
                  const std::vector<Tensor>& pooled_causal,
                  const std::vector<double>& labels, const InterventionBank& bank,
                  double lambda, double beta, std::size_t k, Rng& draw_rng,
                  const ModelParams& params, LossBundle& out);

// Eq-16 combination of already-computed components; the one place the
// weighted sum is spelled out.
LossBundle combine_bundle(double l_sup, double l_unif, double l_intv,
                          double lambda, double beta);

// evenly spaced class-bucket centers over the label range
std::vector<double> bucket_centers(const ModelConfig& cfg);

}  // namespace mmci
