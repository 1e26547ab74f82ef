#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mmci/errors.hpp"

namespace mmci {

enum class Acc2Mode { IncludeZero, ExcludeZero };

// Acc7 discretization: integer rounding is the field convention; the
// literal seven-equal-intervals reading of the range is kept behind a flag.
enum class Acc7Mode { RoundToInteger, EqualIntervals };

struct MetricsReport {
    double acc7 = 0.0;
    double acc2_nonneg = 0.0, acc2_pos = 0.0;  // include-zero / exclude-zero
    double f1_nonneg = 0.0, f1_pos = 0.0;
    double mae = 0.0;
    std::optional<double> corr;  // undefined when either side has zero variance
    std::size_t n_total = 0, n_nonzero = 0;

    static std::string csv_header();
    std::string csv_row() const;
};

double acc7(const std::vector<double>& pred, const std::vector<double>& labels,
            Acc7Mode mode = Acc7Mode::RoundToInteger);
// returns {acc2, weighted F1}, both percentages
std::pair<double, double> acc2_f1(const std::vector<double>& pred,
                                  const std::vector<double>& labels, Acc2Mode mode);
double mae(const std::vector<double>& pred, const std::vector<double>& labels);
// throws std::domain_error when either vector has zero variance
double corr(const std::vector<double>& pred, const std::vector<double>& labels);

MetricsReport evaluate(const std::vector<double>& pred,
                       const std::vector<double>& labels,
                       Acc7Mode acc7_mode = Acc7Mode::RoundToInteger);

// class index in [0, 6] for a sentiment score
int acc7_class(double v, Acc7Mode mode);

}  // namespace mmci
