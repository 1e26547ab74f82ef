#include "mmci/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mmci {

namespace {

void check_pair(const std::vector<double>& pred, const std::vector<double>& labels,
                const char* op) {
    if (pred.empty() || pred.size() != labels.size())
        throw dimension_error(std::string(op) + ": empty input or size mismatch");
}

}  // namespace

int acc7_class(double v, Acc7Mode mode) {
    double x = std::clamp(v, -3.0, 3.0);
    if (mode == Acc7Mode::RoundToInteger) {
        // half away from zero, classes -3..3 mapped to 0..6
        return static_cast<int>(std::round(x)) + 3;
    }
    // seven equal intervals of width 6/7 over [-3, 3]
    int k = static_cast<int>(std::floor((x + 3.0) / (6.0 / 7.0)));
    return std::min(k, 6);
}

double acc7(const std::vector<double>& pred, const std::vector<double>& labels,
            Acc7Mode mode) {
    check_pair(pred, labels, "acc7");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        if (acc7_class(pred[i], mode) == acc7_class(labels[i], mode)) ++hits;
    return 100.0 * static_cast<double>(hits) / static_cast<double>(pred.size());
}

std::pair<double, double> acc2_f1(const std::vector<double>& pred,
                                  const std::vector<double>& labels,
                                  Acc2Mode mode) {
    check_pair(pred, labels, "acc2_f1");
    // binary confusion counts; class 0 = negative, class 1 = non-negative/positive
    std::size_t n = 0;
    std::size_t conf[2][2] = {{0, 0}, {0, 0}};  // [true][pred]
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (mode == Acc2Mode::ExcludeZero && labels[i] == 0.0) continue;
        int t = labels[i] < 0.0 ? 0 : 1;
        int p = pred[i] < 0.0 ? 0 : 1;
        ++conf[t][p];
        ++n;
    }
    if (n == 0) throw dimension_error("acc2_f1: no samples left after exclude-zero");

    double acc = 100.0 * static_cast<double>(conf[0][0] + conf[1][1]) /
                 static_cast<double>(n);
    double f1_weighted = 0.0;
    for (int c = 0; c < 2; ++c) {
        double tp = static_cast<double>(conf[c][c]);
        double support = static_cast<double>(conf[c][0] + conf[c][1]);
        double predicted = static_cast<double>(conf[0][c] + conf[1][c]);
        double precision = predicted > 0.0 ? tp / predicted : 0.0;
        double recall = support > 0.0 ? tp / support : 0.0;
        double f1 = (precision + recall) > 0.0
                        ? 2.0 * precision * recall / (precision + recall)
                        : 0.0;
        f1_weighted += f1 * support / static_cast<double>(n);
    }
    return {acc, 100.0 * f1_weighted};
}

double mae(const std::vector<double>& pred, const std::vector<double>& labels) {
    check_pair(pred, labels, "mae");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - labels[i]);
    return s / static_cast<double>(pred.size());
}

double corr(const std::vector<double>& pred, const std::vector<double>& labels) {
    check_pair(pred, labels, "corr");
    double n = static_cast<double>(pred.size());
    double mp = 0.0, ml = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        mp += pred[i];
        ml += labels[i];
    }
    mp /= n;
    ml /= n;
    double spl = 0.0, sp = 0.0, sl = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        double a = pred[i] - mp, b = labels[i] - ml;
        spl += a * b;
        sp += a * a;
        sl += b * b;
    }
    if (sp == 0.0 || sl == 0.0)
        throw std::domain_error("corr: undefined for zero-variance input");
    return spl / std::sqrt(sp * sl);
}

MetricsReport evaluate(const std::vector<double>& pred,
                       const std::vector<double>& labels, Acc7Mode acc7_mode) {
    MetricsReport r;
    r.n_total = pred.size();
    r.acc7 = acc7(pred, labels, acc7_mode);
    auto [a_nn, f_nn] = acc2_f1(pred, labels, Acc2Mode::IncludeZero);
    r.acc2_nonneg = a_nn;
    r.f1_nonneg = f_nn;
    std::size_t nonzero = 0;
    for (double y : labels)
        if (y != 0.0) ++nonzero;
    r.n_nonzero = nonzero;
    if (nonzero > 0) {
        auto [a_p, f_p] = acc2_f1(pred, labels, Acc2Mode::ExcludeZero);
        r.acc2_pos = a_p;
        r.f1_pos = f_p;
    }
    r.mae = mae(pred, labels);
    try {
        r.corr = corr(pred, labels);
    } catch (const std::domain_error&) {
        r.corr.reset();
    }
    return r;
}

std::string MetricsReport::csv_header() {
    return "acc7,acc2_nonneg,acc2_pos,f1_nonneg,f1_pos,mae,corr,n_total,n_nonzero";
}

std::string MetricsReport::csv_row() const {
    std::ostringstream os;
    os.precision(17);
    os << acc7 << ',' << acc2_nonneg << ',' << acc2_pos << ',' << f1_nonneg << ','
       << f1_pos << ',' << mae << ',';
    if (corr)
        os << *corr;
    else
        os << "NA";
    os << ',' << n_total << ',' << n_nonzero;
    return os.str();
}

}  // namespace mmci
