#include "mmci/scm.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mmci {

namespace {

void check_rows(const std::vector<double>& table, std::size_t rows,
                std::size_t width, const char* name) {
    if (table.size() != rows * width)
        throw dimension_error(std::string(name) + ": table size mismatch");
    for (std::size_t r = 0; r < rows; ++r) {
        double s = 0.0;
        for (std::size_t j = 0; j < width; ++j) {
            double v = table[r * width + j];
            if (v < 0.0) throw std::domain_error(std::string(name) + ": negative entry");
            s += v;
        }
        if (std::abs(s - 1.0) > 1e-12)
            throw std::domain_error(std::string(name) + ": row does not sum to 1");
    }
}

std::vector<double> random_rows(Rng& rng, std::size_t rows, std::size_t width,
                                double floor) {
    std::vector<double> t(rows * width);
    for (std::size_t r = 0; r < rows; ++r) {
        double s = 0.0;
        for (std::size_t j = 0; j < width; ++j) {
            t[r * width + j] = floor + rng.uniform();
            s += t[r * width + j];
        }
        for (std::size_t j = 0; j < width; ++j) t[r * width + j] /= s;
    }
    return t;
}

}  // namespace

void DiscreteScm::validate() const {
    for (std::size_t c : {card_r, card_c, card_z, card_m, card_y}) {
        if (c < 1 || c > 16)
            throw config_error("variable cardinality must be in [1, 16]");
    }
    check_rows(p_r, 1, card_r, "p_r");
    check_rows(p_c_given_r, card_r, card_c, "p_c_given_r");
    check_rows(p_z_given_r, card_r, card_z, "p_z_given_r");
    check_rows(p_m_given_cz, card_c * card_z, card_m, "p_m_given_cz");
    check_rows(p_y_given_m, card_m, card_y, "p_y_given_m");
}

DiscreteScm DiscreteScm::random(std::uint64_t seed, std::size_t max_card,
                                double floor) {
    Rng rng(seed);
    DiscreteScm s;
    s.card_r = 2 + rng.bounded(max_card - 1);
    s.card_c = 2 + rng.bounded(max_card - 1);
    s.card_z = 2 + rng.bounded(max_card - 1);
    s.card_m = 2 + rng.bounded(max_card - 1);
    s.card_y = 2 + rng.bounded(max_card - 1);
    s.p_r = random_rows(rng, 1, s.card_r, floor);
    s.p_c_given_r = random_rows(rng, s.card_r, s.card_c, floor);
    s.p_z_given_r = random_rows(rng, s.card_r, s.card_z, floor);
    s.p_m_given_cz = random_rows(rng, s.card_c * s.card_z, s.card_m, floor);
    s.p_y_given_m = random_rows(rng, s.card_m, s.card_y, floor);
    s.validate();
    return s;
}

DiscreteScm DiscreteScm::canned(const std::string& name) {
    DiscreteScm s;
    if (name == "unconfounded") {
        // relation does not influence the causal feature: no active backdoor
        s.card_r = 2; s.card_c = 2; s.card_z = 2; s.card_m = 4; s.card_y = 3;
        s.p_r = {0.6, 0.4};
        s.p_c_given_r = {0.5, 0.5, 0.5, 0.5};
        s.p_z_given_r = {0.8, 0.2, 0.3, 0.7};
        s.p_m_given_cz = {
            0.70, 0.10, 0.10, 0.10,
            0.10, 0.70, 0.10, 0.10,
            0.10, 0.10, 0.70, 0.10,
            0.10, 0.10, 0.10, 0.70,
        };
        s.p_y_given_m = {
            0.8, 0.1, 0.1,
            0.1, 0.8, 0.1,
            0.1, 0.1, 0.8,
            0.3, 0.3, 0.4,
        };
    } else if (name == "confounded") {
        // strong relation -> causal and relation -> shortcut dependence:
        // observational and interventional distributions split visibly
        s.card_r = 2; s.card_c = 2; s.card_z = 2; s.card_m = 4; s.card_y = 3;
        s.p_r = {0.5, 0.5};
        s.p_c_given_r = {0.9, 0.1, 0.1, 0.9};
        s.p_z_given_r = {0.9, 0.1, 0.1, 0.9};
        s.p_m_given_cz = {
            0.85, 0.05, 0.05, 0.05,
            0.05, 0.85, 0.05, 0.05,
            0.05, 0.05, 0.85, 0.05,
            0.05, 0.05, 0.05, 0.85,
        };
        s.p_y_given_m = {
            0.80, 0.15, 0.05,
            0.10, 0.80, 0.10,
            0.15, 0.15, 0.70,
            0.05, 0.15, 0.80,
        };
    } else if (name == "shortcut") {
        // outcome driven almost entirely through the shortcut stratum
        s.card_r = 2; s.card_c = 2; s.card_z = 2; s.card_m = 2; s.card_y = 2;
        s.p_r = {0.5, 0.5};
        s.p_c_given_r = {0.8, 0.2, 0.2, 0.8};
        s.p_z_given_r = {0.95, 0.05, 0.05, 0.95};
        s.p_m_given_cz = {
            // m tracks z, barely reacts to c
            0.90, 0.10,
            0.15, 0.85,
            0.85, 0.15,
            0.10, 0.90,
        };
        s.p_y_given_m = {0.9, 0.1, 0.1, 0.9};
    } else {
        throw config_error("unknown canned SCM: " + name +
                           " (expected unconfounded | confounded | shortcut)");
    }
    s.validate();
    return s;
}

std::vector<double> joint(const DiscreteScm& s) {
    s.validate();
    std::vector<double> j(s.card_r * s.card_c * s.card_z * s.card_m * s.card_y);
    std::size_t idx = 0;
    for (std::size_t r = 0; r < s.card_r; ++r)
        for (std::size_t c = 0; c < s.card_c; ++c)
            for (std::size_t z = 0; z < s.card_z; ++z)
                for (std::size_t m = 0; m < s.card_m; ++m)
                    for (std::size_t y = 0; y < s.card_y; ++y, ++idx)
                        j[idx] = s.p_r[r] *
                                 s.p_c_given_r[r * s.card_c + c] *
                                 s.p_z_given_r[r * s.card_z + z] *
                                 s.p_m_given_cz[(c * s.card_z + z) * s.card_m + m] *
                                 s.p_y_given_m[m * s.card_y + y];
    return j;
}

namespace {

// iterate the joint with a callback receiving (r, c, z, m, y, p)
template <typename F>
void for_each_state(const DiscreteScm& s, const std::vector<double>& j, F&& f) {
    std::size_t idx = 0;
    for (std::size_t r = 0; r < s.card_r; ++r)
        for (std::size_t c = 0; c < s.card_c; ++c)
            for (std::size_t z = 0; z < s.card_z; ++z)
                for (std::size_t m = 0; m < s.card_m; ++m)
                    for (std::size_t y = 0; y < s.card_y; ++y, ++idx)
                        f(r, c, z, m, y, j[idx]);
}

}  // namespace

std::vector<double> observational(const DiscreteScm& s, std::size_t c_val) {
    if (c_val >= s.card_c) throw std::domain_error("observational: c out of range");
    auto j = joint(s);
    std::vector<double> py(s.card_y, 0.0);
    double pc = 0.0;
    for_each_state(s, j, [&](std::size_t, std::size_t c, std::size_t, std::size_t,
                             std::size_t y, double p) {
        if (c == c_val) {
            py[y] += p;
            pc += p;
        }
    });
    if (pc <= 0.0)
        throw std::domain_error("observational: conditioning on zero-probability C");
    for (double& v : py) v /= pc;
    return py;
}

std::vector<double> interventional_truth(const DiscreteScm& s, std::size_t c_val) {
    if (c_val >= s.card_c) throw std::domain_error("interventional: c out of range");
    s.validate();
    // mutilated graph: drop the relation -> causal factor, clamp c
    std::vector<double> py(s.card_y, 0.0);
    for (std::size_t r = 0; r < s.card_r; ++r)
        for (std::size_t z = 0; z < s.card_z; ++z)
            for (std::size_t m = 0; m < s.card_m; ++m)
                for (std::size_t y = 0; y < s.card_y; ++y)
                    py[y] += s.p_r[r] * s.p_z_given_r[r * s.card_z + z] *
                             s.p_m_given_cz[(c_val * s.card_z + z) * s.card_m + m] *
                             s.p_y_given_m[m * s.card_y + y];
    return py;
}

std::vector<double> backdoor_adjust(const DiscreteScm& s, std::size_t c_val) {
    if (c_val >= s.card_c) throw std::domain_error("backdoor: c out of range");
    auto j = joint(s);

    std::vector<double> pz(s.card_z, 0.0);            // P(z)
    std::vector<double> pcz(s.card_z, 0.0);           // P(C=c, z)
    std::vector<double> pycz(s.card_z * s.card_y, 0.0);  // P(y, C=c, z)
    for_each_state(s, j, [&](std::size_t, std::size_t c, std::size_t z, std::size_t,
                             std::size_t y, double p) {
        pz[z] += p;
        if (c == c_val) {
            pcz[z] += p;
            pycz[z * s.card_y + y] += p;
        }
    });

    std::vector<double> py(s.card_y, 0.0);
    for (std::size_t z = 0; z < s.card_z; ++z) {
        if (pz[z] <= 0.0) continue;  // stratum outside Z's support
        if (pcz[z] <= 0.0)
            throw std::domain_error(
                "backdoor: positivity violated at stratum z=" + std::to_string(z) +
                " (P(C=" + std::to_string(c_val) + ", z) = 0)");
        for (std::size_t y = 0; y < s.card_y; ++y)
            py[y] += (pycz[z * s.card_y + y] / pcz[z]) * pz[z];
    }
    return py;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw dimension_error("total_variation: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return 0.5 * s;
}

}  // namespace mmci
