#include "mmci/objective.hpp"

namespace mmci {

void InterventionBank::insert(std::vector<double> pooled_shortcut,
                              const std::string& sample_id) {
    entries_.push_back({std::move(pooled_shortcut), sample_id});
    while (entries_.size() > capacity_) entries_.pop_front();
}

std::vector<std::size_t> InterventionBank::draw(std::size_t k, Rng& rng) const {
    std::vector<std::size_t> idx(k);
    for (auto& i : idx) i = static_cast<std::size_t>(rng.bounded(entries_.size()));
    return idx;
}

Tensor loss_sup(Tape& tape, const std::vector<Tensor>& preds,
                const std::vector<double>& labels) {
    if (preds.empty() || preds.size() != labels.size())
        throw dimension_error("loss_sup: empty batch or size mismatch");
    Tensor acc;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        Tensor term = tape.mse(preds[i], Tensor::scalar(labels[i]));
        acc = acc.defined() ? tape.add(acc, term) : term;
    }
    return tape.scale(acc, 1.0 / static_cast<double>(preds.size()));
}

Tensor loss_unif(Tape& tape, const std::vector<Tensor>& shortcut_probs,
                 std::size_t classes) {
    if (shortcut_probs.empty()) throw dimension_error("loss_unif: empty batch");
    Tensor acc;
    for (const auto& row : shortcut_probs) {
        Tensor term = tape.kl_uniform(row, classes);
        acc = acc.defined() ? tape.add(acc, term) : term;
    }
    return tape.scale(acc, 1.0 / static_cast<double>(shortcut_probs.size()));
}

std::vector<double> bucket_centers(const ModelConfig& cfg) {
    std::vector<double> centers(cfg.classes);
    if (cfg.classes == 1) {
        centers[0] = 0.5 * (cfg.label_lo + cfg.label_hi);
        return centers;
    }
    double step = (cfg.label_hi - cfg.label_lo) /
                  static_cast<double>(cfg.classes - 1);
    for (std::size_t i = 0; i < cfg.classes; ++i)
        centers[i] = cfg.label_lo + step * static_cast<double>(i);
    return centers;
}

Tensor loss_shortcut_regression(Tape& tape,
                                const std::vector<Tensor>& shortcut_probs,
                                const std::vector<double>& labels,
                                const ModelConfig& cfg) {
    if (shortcut_probs.empty() || shortcut_probs.size() != labels.size())
        throw dimension_error("loss_shortcut_regression: batch mismatch");
    Tensor centers = Tensor::from({cfg.classes, 1}, bucket_centers(cfg));
    Tensor acc;
    for (std::size_t i = 0; i < shortcut_probs.size(); ++i) {
        Tensor expected = tape.matmul(shortcut_probs[i], centers);  // [1 x 1]
        Tensor term = tape.mse(expected, Tensor::scalar(labels[i]));
        acc = acc.defined() ? tape.add(acc, term) : term;
    }
    return tape.scale(acc, 1.0 / static_cast<double>(shortcut_probs.size()));
}

Tensor loss_intv(Tape& tape, const std::vector<Tensor>& pooled_causal,
                 const std::vector<double>& labels, const InterventionBank& bank,
                 std::size_t k, Rng& draw_rng, const ModelParams& params) {
    if (pooled_causal.size() != labels.size())
        throw dimension_error("loss_intv: batch mismatch");
    if (bank.empty() || k == 0) return Tensor();  // warm-up
    Tensor acc;
    for (std::size_t g = 0; g < pooled_causal.size(); ++g) {
        auto idx = bank.draw(k, draw_rng);
        for (std::size_t stratum : idx) {
            // bank entry is a constant: no gradient flows into the stratum
            Tensor perturb = Tensor::from({1, params.cfg.d}, bank.entry(stratum));
            Tensor z = predict_causal(tape, tape.add(pooled_causal[g], perturb),
                                      params);
            Tensor term = tape.mse(z, Tensor::scalar(labels[g]));
            acc = acc.defined() ? tape.add(acc, term) : term;
        }
    }
    double norm = static_cast<double>(pooled_causal.size()) *
                  static_cast<double>(k);
    return tape.scale(acc, 1.0 / norm);
}

LossBundle combine_bundle(double l_sup, double l_unif, double l_intv,
                          double lambda, double beta) {
    if (lambda < 0.0 || beta < 0.0)
        throw config_error("loss weights must be non-negative");
    LossBundle b;
    b.l_sup = l_sup;
    b.l_unif = l_unif;
    b.l_intv = l_intv;
    b.lambda = lambda;
    b.beta = beta;
    b.total = l_sup + lambda * l_unif + beta * l_intv;
    return b;
}

Tensor total_loss(Tape& tape, const std::vector<Tensor>& preds,
                  const std::vector<Tensor>& shortcut_probs,
                  const std::vector<Tensor>& pooled_causal,
                  const std::vector<double>& labels, const InterventionBank& bank,
                  double lambda, double beta, std::size_t k, Rng& draw_rng,
                  const ModelParams& params, LossBundle& out) {
    if (lambda < 0.0 || beta < 0.0)
        throw config_error("loss weights must be non-negative");
    double eff_lambda = params.ablation == Ablation::NoDisentangle ? 0.0 : lambda;
    double eff_beta = params.ablation == Ablation::NoIntervention ? 0.0 : beta;

    Tensor sup = loss_sup(tape, preds, labels);
    Tensor unif = params.ablation == Ablation::NoKL
                      ? loss_shortcut_regression(tape, shortcut_probs, labels,
                                                 params.cfg)
                      : loss_unif(tape, shortcut_probs, params.cfg.classes);
    Tensor intv = loss_intv(tape, pooled_causal, labels, bank, k, draw_rng, params);

    double intv_val = intv.defined() ? intv.value() : 0.0;
    out = combine_bundle(sup.value(), unif.value(), intv_val, eff_lambda, eff_beta);
    out.intervention_warmup = !intv.defined();

    Tensor total = sup;
    if (eff_lambda != 0.0) total = tape.add(total, tape.scale(unif, eff_lambda));
    if (eff_beta != 0.0 && intv.defined())
        total = tape.add(total, tape.scale(intv, eff_beta));
    return total;
}

}  // namespace mmci
