#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmci/data.hpp"
#include "mmci/metrics.hpp"
#include "mmci/model.hpp"
#include "mmci/objective.hpp"

namespace mmci {

struct TrainConfig {
    std::size_t d = 32;
    std::size_t batch_size = 8;
    std::size_t epochs = 50;
    double peak_lr = 1e-3;
    std::size_t warmup_steps = 0;  // 0 = one epoch of steps
    double weight_decay = 0.01;
    double dropout = 0.30;
    double lambda = 0.2;
    double beta = 0.6;
    std::size_t k_draws = 4;
    std::size_t bank_capacity = 256;
    std::size_t patience = 20;
    std::size_t classes = 7;
    std::uint64_t seed = 1;
    Ablation ablation = Ablation::None;

    // AdamW constants
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

    void validate() const;
    static TrainConfig from_config(const KeyValueConfig& cfg);
    KeyValueConfig to_config() const;
    std::uint64_t hash() const;
};

struct EpochRecord {
    std::size_t epoch = 0;
    double l_sup = 0.0, l_unif = 0.0, l_intv = 0.0, total = 0.0;
    double val_mae = 0.0;
};

struct TrainReport {
    std::vector<EpochRecord> epochs;
    std::size_t best_epoch = 0;  // 0 = initialization-only evaluation
    double best_val_mae = 0.0;
    ModelParams best_params;
    std::string checkpoint_path;

    std::string csv() const;  // epoch,l_sup,l_unif,l_intv,total,val_mae
};

// AdamW state: first/second moments per parameter tensor.
struct OptimState {
    std::vector<std::vector<double>> m, v;
    std::size_t step = 0;
    static OptimState for_params(const ModelParams& p);
};

// one decoupled-weight-decay update; t = state.step + 1 after the call
void optimizer_step(ModelParams& params, OptimState& state, const TrainConfig& cfg,
                    std::size_t warmup_steps);

double learning_rate(double peak_lr, std::size_t t, std::size_t warmup_steps);

TrainReport train(const Dataset& train_ds, const Dataset& val_ds,
                  const TrainConfig& cfg);

// eval-mode causal predictions over a dataset
std::vector<double> predict(const Dataset& ds, const ModelParams& params);

struct SweepResult {
    std::uint64_t config_hash = 0;
    TrainConfig cfg;
    double best_val_mae = 0.0;
    std::size_t best_epoch = 0;
};

std::vector<SweepResult> sweep(const std::vector<TrainConfig>& grid,
                               const Dataset& train_ds, const Dataset& val_ds);

// model config consistent with a dataset's feature dims
ModelConfig model_config_for(const TrainConfig& cfg, const Dataset& ds);

}  // namespace mmci
