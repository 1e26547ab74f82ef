#include "mmci/training.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mmci {

void TrainConfig::validate() const {
    if (d < 2) throw config_error("train: d must be >= 2");
    if (batch_size < 1) throw config_error("train: batch_size must be >= 1");
    if (peak_lr <= 0.0) throw config_error("train: peak_lr must be > 0");
    if (lambda < 0.0 || beta < 0.0)
        throw config_error("train: lambda and beta must be >= 0");
    if (dropout < 0.0 || dropout >= 1.0)
        throw config_error("train: dropout must be in [0, 1)");
    if (patience < 1) throw config_error("train: patience must be >= 1");
    if (classes < 2) throw config_error("train: classes must be >= 2");
}

TrainConfig TrainConfig::from_config(const KeyValueConfig& c) {
    TrainConfig t;
    t.d = c.get_int("d", t.d);
    t.batch_size = c.get_int("batch_size", t.batch_size);
    t.epochs = c.get_int("epochs", t.epochs);
    t.peak_lr = c.get_double("peak_lr", t.peak_lr);
    t.warmup_steps = c.get_int("warmup_steps", t.warmup_steps);
    t.weight_decay = c.get_double("weight_decay", t.weight_decay);
    t.dropout = c.get_double("dropout", t.dropout);
    t.lambda = c.get_double("lambda", t.lambda);
    t.beta = c.get_double("beta", t.beta);
    t.k_draws = c.get_int("k", t.k_draws);
    t.bank_capacity = c.get_int("bank_capacity", t.bank_capacity);
    t.patience = c.get_int("patience", t.patience);
    t.classes = c.get_int("classes", t.classes);
    t.seed = static_cast<std::uint64_t>(c.get_int("seed", static_cast<long long>(t.seed)));
    t.ablation = ablation_from_name(c.get_string("ablation", "none"));
    t.validate();
    return t;
}

KeyValueConfig TrainConfig::to_config() const {
    KeyValueConfig c;
    auto seti = [&](const char* k, long long v) { c.set(k, std::to_string(v)); };
    auto setd = [&](const char* k, double v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        c.set(k, os.str());
    };
    seti("d", d);
    seti("batch_size", batch_size);
    seti("epochs", epochs);
    setd("peak_lr", peak_lr);
    seti("warmup_steps", warmup_steps);
    setd("weight_decay", weight_decay);
    setd("dropout", dropout);
    setd("lambda", lambda);
    setd("beta", beta);
    seti("k", k_draws);
    seti("bank_capacity", bank_capacity);
    seti("patience", patience);
    seti("classes", classes);
    seti("seed", static_cast<long long>(seed));
    c.set("ablation", ablation_name(ablation));
    return c;
}

std::uint64_t TrainConfig::hash() const {
    std::string text = to_config().to_string();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

OptimState OptimState::for_params(const ModelParams& p) {
    OptimState s;
    for (const auto& t : p.all_tensors()) {
        s.m.emplace_back(t.size(), 0.0);
        s.v.emplace_back(t.size(), 0.0);
    }
    return s;
}

double learning_rate(double peak_lr, std::size_t t, std::size_t warmup_steps) {
    if (warmup_steps == 0) return peak_lr;
    double ramp = static_cast<double>(t) / static_cast<double>(warmup_steps);
    return peak_lr * std::min(1.0, ramp);
}

void optimizer_step(ModelParams& params, OptimState& state, const TrainConfig& cfg,
                    std::size_t warmup_steps) {
    auto tensors = params.all_tensors();
    auto names = params.tensor_names();
    if (tensors.size() != state.m.size())
        throw config_error("optimizer state does not match parameter set");
    std::size_t t = ++state.step;
    double lr = learning_rate(cfg.peak_lr, t, warmup_steps);
    double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    for (std::size_t p = 0; p < tensors.size(); ++p) {
        auto& data = tensors[p].data();
        auto& grad = tensors[p].grad();
        for (std::size_t i = 0; i < data.size(); ++i) {
            double g = grad[i];
            if (!std::isfinite(g))
                throw numeric_error("non-finite gradient in parameter " + names[p]);
            state.m[p][i] = cfg.beta1 * state.m[p][i] + (1.0 - cfg.beta1) * g;
            state.v[p][i] = cfg.beta2 * state.v[p][i] + (1.0 - cfg.beta2) * g * g;
            double mhat = state.m[p][i] / bc1;
            double vhat = state.v[p][i] / bc2;
            // decoupled weight decay, scaled by the current lr
            data[i] -= lr * (mhat / (std::sqrt(vhat) + cfg.eps) +
                             cfg.weight_decay * data[i]);
        }
    }
}

ModelConfig model_config_for(const TrainConfig& cfg, const Dataset& ds) {
    if (ds.samples.empty()) throw config_error("train: empty dataset");
    const Sample& s = ds.samples.front();
    ModelConfig mc;
    mc.d = cfg.d;
    mc.d_text = s.d_text;
    mc.d_audio = s.d_audio;
    mc.d_visual = s.d_visual;
    mc.classes = cfg.classes;
    mc.dropout = cfg.dropout;
    mc.label_lo = ds.label_lo;
    mc.label_hi = ds.label_hi;
    return mc;
}

std::vector<double> predict(const Dataset& ds, const ModelParams& params) {
    std::vector<double> preds;
    preds.reserve(ds.samples.size());
    for (const auto& s : ds.samples) {
        Tape tape;
        ForwardResult fr = forward(tape, s, params, Mode::Eval);
        preds.push_back(fr.y_causal.value());
        tape.clear();
    }
    return preds;
}

namespace {

double validation_mae(const Dataset& val, const ModelParams& params) {
    auto preds = predict(val, params);
    std::vector<double> labels;
    labels.reserve(val.samples.size());
    for (const auto& s : val.samples) labels.push_back(s.label);
    return mae(preds, labels);
}

// Fisher-Yates with our own rng so shuffles are platform-stable
void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng) {
    for (std::size_t i = idx.size(); i > 1; --i)
        std::swap(idx[i - 1], idx[rng.bounded(i)]);
}

ModelParams clone_params(const ModelParams& src) {
    ModelParams copy = ModelParams::init(src.cfg, src.ablation, src.seed);
    auto from = src.all_tensors();
    auto to = copy.all_tensors();
    for (std::size_t i = 0; i < from.size(); ++i) to[i].data() = from[i].data();
    return copy;
}

}  // namespace

TrainReport train(const Dataset& train_ds, const Dataset& val_ds,
                  const TrainConfig& cfg) {
    cfg.validate();
    if (train_ds.samples.empty() || val_ds.samples.empty())
        throw config_error("train: train and val splits must be non-empty");

    ModelParams params = ModelParams::init(model_config_for(cfg, train_ds),
                                           cfg.ablation, cfg.seed);
    OptimState opt = OptimState::for_params(params);
    InterventionBank bank(cfg.bank_capacity);
    Rng shuffle_rng(mix64(cfg.seed, 1));
    Rng dropout_rng(mix64(cfg.seed, 2));
    Rng draw_rng(mix64(cfg.seed, 3));

    std::size_t steps_per_epoch =
        (train_ds.samples.size() + cfg.batch_size - 1) / cfg.batch_size;
    std::size_t warmup =
        cfg.warmup_steps > 0 ? cfg.warmup_steps : steps_per_epoch;

    TrainReport report;
    report.best_val_mae = validation_mae(val_ds, params);
    report.best_epoch = 0;
    report.best_params = clone_params(params);
    EpochRecord init_rec;
    init_rec.epoch = 0;
    init_rec.val_mae = report.best_val_mae;
    report.epochs.push_back(init_rec);

    std::vector<std::size_t> order(train_ds.samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::size_t epochs_since_best = 0;
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle_indices(order, shuffle_rng);
        double sum_sup = 0.0, sum_unif = 0.0, sum_intv = 0.0, sum_total = 0.0;
        std::size_t batches = 0;

        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            std::size_t end = std::min(start + cfg.batch_size, order.size());
            Tape tape;
            std::vector<Tensor> preds, probs, pooled_c;
            std::vector<std::vector<double>> pooled_s;
            std::vector<std::string> ids;
            std::vector<double> labels;
            for (std::size_t b = start; b < end; ++b) {
                const Sample& s = train_ds.samples[order[b]];
                ForwardResult fr = forward(tape, s, params, Mode::Train, &dropout_rng);
                preds.push_back(fr.y_causal);
                probs.push_back(fr.y_shortcut);
                pooled_c.push_back(fr.pooled_causal);
                pooled_s.push_back(fr.pooled_shortcut.data());
                ids.push_back(s.id);
                labels.push_back(s.label);
            }
            LossBundle bundle;
            Tensor total = total_loss(tape, preds, probs, pooled_c, labels, bank,
                                      cfg.lambda, cfg.beta, cfg.k_draws, draw_rng,
                                      params, bundle);
            if (!std::isfinite(bundle.total))
                throw numeric_error("training diverged at epoch " +
                                    std::to_string(epoch) + ", batch " +
                                    std::to_string(batches));
            for (auto& t : params.all_tensors()) t.zero_grad();
            tape.backward(total);
            optimizer_step(params, opt, cfg, warmup);
            // bank refresh follows the optimizer step
            for (std::size_t b = 0; b < pooled_s.size(); ++b)
                bank.insert(std::move(pooled_s[b]), ids[b]);

            sum_sup += bundle.l_sup;
            sum_unif += bundle.l_unif;
            sum_intv += bundle.l_intv;
            sum_total += bundle.total;
            ++batches;
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.l_sup = sum_sup / static_cast<double>(batches);
        rec.l_unif = sum_unif / static_cast<double>(batches);
        rec.l_intv = sum_intv / static_cast<double>(batches);
        rec.total = sum_total / static_cast<double>(batches);
        rec.val_mae = validation_mae(val_ds, params);
        report.epochs.push_back(rec);

        if (rec.val_mae < report.best_val_mae) {
            report.best_val_mae = rec.val_mae;
            report.best_epoch = epoch;
            report.best_params = clone_params(params);
            epochs_since_best = 0;
        } else if (++epochs_since_best >= cfg.patience) {
            break;
        }
    }
    return report;
}

std::string TrainReport::csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "epoch,l_sup,l_unif,l_intv,total,val_mae\n";
    for (const auto& r : epochs)
        os << r.epoch << ',' << r.l_sup << ',' << r.l_unif << ',' << r.l_intv << ','
           << r.total << ',' << r.val_mae << '\n';
    return os.str();
}

std::vector<SweepResult> sweep(const std::vector<TrainConfig>& grid,
                               const Dataset& train_ds, const Dataset& val_ds) {
    if (grid.empty()) throw config_error("sweep: empty grid");
    std::vector<SweepResult> out;
    out.reserve(grid.size());
    for (const auto& cfg : grid) {
        TrainReport rep = train(train_ds, val_ds, cfg);
        SweepResult r;
        r.config_hash = cfg.hash();
        r.cfg = cfg;
        r.best_val_mae = rep.best_val_mae;
        r.best_epoch = rep.best_epoch;
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace mmci
