#include "mmci/data.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mmci {

void GenSpec::validate() const {
    if (n_train < 1 || n_val < 1 || n_test < 1 || n_ood < 1)
        throw config_error("gen: split counts must be >= 1");
    if (n_text < 1 || n_audio < 1 || n_visual < 1)
        throw config_error("gen: sequence lengths must be >= 1");
    if (d_text < 2 || d_audio < 2 || d_visual < 2)
        throw config_error("gen: feature dims must be >= 2 (causal + shortcut coords)");
    if (std::abs(rho_train) > 1.0 || std::abs(rho_ood) > 1.0)
        throw config_error("gen: rho must be in [-1, 1]");
    if (noise_sigma <= 0.0) throw config_error("gen: noise_sigma must be > 0");
    if (label_lo >= label_hi) throw config_error("gen: empty label range");
}

GenSpec GenSpec::from_config(const KeyValueConfig& c) {
    GenSpec s;
    s.n_train = c.get_int("n_train", s.n_train);
    s.n_val = c.get_int("n_val", s.n_val);
    s.n_test = c.get_int("n_test", s.n_test);
    s.n_ood = c.get_int("n_ood", s.n_ood);
    s.n_text = c.get_int("n_text", s.n_text);
    s.n_audio = c.get_int("n_audio", s.n_audio);
    s.n_visual = c.get_int("n_visual", s.n_visual);
    s.d_text = c.get_int("d_text", s.d_text);
    s.d_audio = c.get_int("d_audio", s.d_audio);
    s.d_visual = c.get_int("d_visual", s.d_visual);
    s.causal_strength = c.get_double("causal_strength", s.causal_strength);
    s.rho_train = c.get_double("rho_train", s.rho_train);
    s.rho_ood = c.get_double("rho_ood", s.rho_ood);
    s.noise_sigma = c.get_double("noise_sigma", s.noise_sigma);
    s.label_lo = c.get_double("label_lo", s.label_lo);
    s.label_hi = c.get_double("label_hi", s.label_hi);
    s.extra_dep_edges = c.get_int("extra_dep_edges", s.extra_dep_edges);
    s.seed = static_cast<std::uint64_t>(c.get_int("seed", static_cast<long long>(s.seed)));
    s.validate();
    return s;
}

KeyValueConfig GenSpec::to_config() const {
    KeyValueConfig c;
    auto seti = [&](const char* k, long long v) { c.set(k, std::to_string(v)); };
    auto setd = [&](const char* k, double v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        c.set(k, os.str());
    };
    seti("n_train", n_train);
    seti("n_val", n_val);
    seti("n_test", n_test);
    seti("n_ood", n_ood);
    seti("n_text", n_text);
    seti("n_audio", n_audio);
    seti("n_visual", n_visual);
    seti("d_text", d_text);
    seti("d_audio", d_audio);
    seti("d_visual", d_visual);
    setd("causal_strength", causal_strength);
    setd("rho_train", rho_train);
    setd("rho_ood", rho_ood);
    setd("noise_sigma", noise_sigma);
    setd("label_lo", label_lo);
    setd("label_hi", label_hi);
    seti("extra_dep_edges", extra_dep_edges);
    seti("seed", static_cast<long long>(seed));
    return c;
}

std::uint64_t GenSpec::hash() const {
    // FNV-1a over the canonical config text
    std::string text = to_config().to_string();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
        case Split::Ood: return "ood";
    }
    return "train";
}

std::size_t shortcut_text_row(std::size_t n_text) { return n_text / 2; }

namespace {

// per-sample stream of counter-based values; independent of generation order
class SampleStream {
public:
    SampleStream(std::uint64_t seed, std::uint64_t sample_index)
        : seed_(seed), stream_(sample_index), counter_(0) {}

    double gaussian() { return counter_gaussian(seed_, stream_, counter_++); }

    double uniform() {
        std::uint64_t s = mix64(mix64(seed_, stream_), counter_++);
        return static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53;
    }

    std::size_t bounded(std::size_t n) {
        std::uint64_t s = mix64(mix64(seed_, stream_), counter_++);
        return static_cast<std::size_t>(splitmix64(s) % n);
    }

private:
    std::uint64_t seed_, stream_, counter_;
};

Sample make_sample(const GenSpec& spec, std::uint64_t global_index, double rho,
                   const std::string& id) {
    SampleStream rs(spec.seed, global_index);

    double y = spec.label_lo + (spec.label_hi - spec.label_lo) * rs.uniform();
    double mid = 0.5 * (spec.label_lo + spec.label_hi);
    double sigma_y = (spec.label_hi - spec.label_lo) / std::sqrt(12.0);
    double y_std = (y - mid) / sigma_y;

    // shortcut channels: corr(s, y) = rho in expectation; the gain makes the
    // shortcut coordinate salient without changing its correlation
    double comp = std::sqrt(1.0 - rho * rho);
    double shortcut_text = kShortcutGain * (rho * y_std + comp * rs.gaussian());
    double shortcut_av = kShortcutGain * (rho * y_std + comp * rs.gaussian());

    Sample s;
    s.id = id;
    s.label = y;
    s.n_text = spec.n_text;
    s.n_audio = spec.n_audio;
    s.n_visual = spec.n_visual;
    s.d_text = spec.d_text;
    s.d_audio = spec.d_audio;
    s.d_visual = spec.d_visual;

    auto fill = [&](std::vector<double>& m, std::size_t rows, std::size_t dim) {
        m.assign(rows * dim, 0.0);
        // per-sample nuisance attributes (background analogs): constant down
        // the sequence, independent of the label
        std::vector<double> nuisance(dim, 0.0);
        for (std::size_t j = 0; j < dim; ++j)
            if (j != kCausalCoord && j != kShortcutCoord)
                nuisance[j] = kNuisanceAmp * rs.gaussian();
        for (std::size_t i = 0; i < rows; ++i) {
            // causal coordinate, modulated along the sequence
            double w = 0.75 + 0.25 * std::sin(2.0 * static_cast<double>(i));
            m[i * dim + kCausalCoord] = spec.causal_strength * y_std * w +
                                        spec.noise_sigma * rs.gaussian();
            for (std::size_t j = 0; j < dim; ++j) {
                if (j == kCausalCoord || j == kShortcutCoord) continue;
                m[i * dim + j] = nuisance[j] + spec.noise_sigma * rs.gaussian();
            }
        }
    };
    fill(s.text_feats, spec.n_text, spec.d_text);
    fill(s.audio_feats, spec.n_audio, spec.d_audio);
    fill(s.visual_feats, spec.n_visual, spec.d_visual);

    // intra-modal shortcut: one text token row
    for (std::size_t i = 0; i < spec.n_text; ++i)
        s.text_feats[i * spec.d_text + kShortcutCoord] =
            spec.noise_sigma * rs.gaussian();
    s.text_feats[shortcut_text_row(spec.n_text) * spec.d_text + kShortcutCoord] =
        shortcut_text;

    // inter-modal shortcut: shared nuisance coordinate across audio and visual
    for (std::size_t i = 0; i < spec.n_audio; ++i)
        s.audio_feats[i * spec.d_audio + kShortcutCoord] = shortcut_av;
    for (std::size_t i = 0; i < spec.n_visual; ++i)
        s.visual_feats[i * spec.d_visual + kShortcutCoord] = shortcut_av;

    // dependency tree: chain plus seeded random long-range edges
    for (std::size_t i = 0; i + 1 < spec.n_text; ++i) s.dep_edges.emplace_back(i, i + 1);
    if (spec.n_text >= 3) {
        for (std::size_t e = 0; e < spec.extra_dep_edges; ++e) {
            std::size_t a = rs.bounded(spec.n_text);
            std::size_t b = rs.bounded(spec.n_text);
            if (a != b) s.dep_edges.emplace_back(a, b);
        }
    }
    return s;
}

}  // namespace

GeneratedData generate(const GenSpec& spec) {
    spec.validate();
    GeneratedData out;
    auto make_split = [&](Dataset& ds, Split split, std::size_t count, double rho,
                          std::uint64_t base) {
        ds.split = split;
        ds.label_lo = spec.label_lo;
        ds.label_hi = spec.label_hi;
        ds.spec_hash = spec.hash();
        ds.samples.reserve(count);
        for (std::size_t i = 0; i < count; ++i)
            ds.samples.push_back(make_sample(
                spec, base + i, rho,
                split_name(split) + "-" + std::to_string(i)));
    };
    std::uint64_t base = 0;
    make_split(out.train, Split::Train, spec.n_train, spec.rho_train, base);
    base += spec.n_train;
    make_split(out.val, Split::Val, spec.n_val, spec.rho_train, base);
    base += spec.n_val;
    make_split(out.test, Split::Test, spec.n_test, spec.rho_train, base);
    base += spec.n_test;
    make_split(out.ood, Split::Ood, spec.n_ood, spec.rho_ood, base);
    return out;
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "dataset format assumes a little-endian host");

class Reader {
public:
    Reader(std::istream& is, const std::string& path) : is_(is), path_(path) {}

    template <typename T>
    T read() {
        T v{};
        is_.read(reinterpret_cast<char*>(&v), sizeof(T));
        if (!is_)
            throw io_error("dataset parse error in " + path_ + " at byte offset " +
                           std::to_string(offset_) + ": truncated");
        offset_ += sizeof(T);
        return v;
    }

    void read_doubles(std::vector<double>& out, std::size_t n) {
        out.resize(n);
        is_.read(reinterpret_cast<char*>(out.data()),
                 static_cast<std::streamsize>(n * sizeof(double)));
        if (!is_)
            throw io_error("dataset parse error in " + path_ + " at byte offset " +
                           std::to_string(offset_) + ": truncated matrix");
        offset_ += n * sizeof(double);
    }

    std::string read_string(std::size_t n) {
        std::string s(n, '\0');
        is_.read(s.data(), static_cast<std::streamsize>(n));
        if (!is_)
            throw io_error("dataset parse error in " + path_ + " at byte offset " +
                           std::to_string(offset_) + ": truncated string");
        offset_ += n;
        return s;
    }

    std::size_t offset() const { return offset_; }
    void advance(std::size_t n) { offset_ += n; }

private:
    std::istream& is_;
    std::string path_;
    std::size_t offset_ = 0;
};

template <typename T>
void write_raw(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void write_matrix(std::ostream& os, const std::vector<double>& m, std::size_t rows,
                  std::size_t cols) {
    write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(rows));
    write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(cols));
    os.write(reinterpret_cast<const char*>(m.data()),
             static_cast<std::streamsize>(m.size() * sizeof(double)));
}

}  // namespace

void save_dataset(const Dataset& ds, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open dataset for writing: " + path);
    os << kDatasetMagic << " v" << kDatasetVersion << "\n";
    os << "split " << split_name(ds.split) << "\n";
    os << "count " << ds.samples.size() << "\n";
    os << "label_lo " << ds.label_lo << "\n";
    os << "label_hi " << ds.label_hi << "\n";
    os << "spec_hash " << ds.spec_hash << "\n";
    os << "end_header\n";
    for (const auto& s : ds.samples) {
        write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(s.id.size()));
        os.write(s.id.data(), static_cast<std::streamsize>(s.id.size()));
        write_raw<double>(os, s.label);
        write_matrix(os, s.text_feats, s.n_text, s.d_text);
        write_matrix(os, s.audio_feats, s.n_audio, s.d_audio);
        write_matrix(os, s.visual_feats, s.n_visual, s.d_visual);
        write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(s.dep_edges.size()));
        for (auto [a, b] : s.dep_edges) {
            write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(a));
            write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(b));
        }
    }
    if (!os) throw io_error("write failure on dataset: " + path);
}

Dataset load_dataset(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open dataset: " + path);

    Dataset ds;
    std::string line;
    if (!std::getline(is, line)) throw io_error("empty dataset file: " + path);
    std::size_t header_bytes = line.size() + 1;
    {
        std::istringstream ls(line);
        std::string magic, ver;
        ls >> magic >> ver;
        if (magic != kDatasetMagic) throw io_error("not a dataset file: " + path);
        if (ver != "v" + std::to_string(kDatasetVersion))
            throw io_error("unsupported dataset version in " + path + ": " + ver);
    }
    std::size_t count = 0;
    while (std::getline(is, line)) {
        header_bytes += line.size() + 1;
        if (line == "end_header") break;
        std::istringstream ls(line);
        std::string key, val;
        ls >> key >> val;
        if (key == "split") {
            if (val == "train") ds.split = Split::Train;
            else if (val == "val") ds.split = Split::Val;
            else if (val == "test") ds.split = Split::Test;
            else if (val == "ood") ds.split = Split::Ood;
            else throw io_error("dataset header: unknown split " + val);
        } else if (key == "count") count = std::stoull(val);
        else if (key == "label_lo") ds.label_lo = std::stod(val);
        else if (key == "label_hi") ds.label_hi = std::stod(val);
        else if (key == "spec_hash") ds.spec_hash = std::stoull(val);
        else throw io_error("dataset header: unknown key " + key);
    }

    Reader rd(is, path);
    rd.advance(header_bytes);
    auto read_matrix = [&](std::vector<double>& m, std::size_t& rows,
                           std::size_t& cols) {
        rows = rd.read<std::uint32_t>();
        cols = rd.read<std::uint32_t>();
        rd.read_doubles(m, rows * cols);
    };
    ds.samples.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Sample s;
        auto id_len = rd.read<std::uint32_t>();
        s.id = rd.read_string(id_len);
        s.label = rd.read<double>();
        read_matrix(s.text_feats, s.n_text, s.d_text);
        read_matrix(s.audio_feats, s.n_audio, s.d_audio);
        read_matrix(s.visual_feats, s.n_visual, s.d_visual);
        auto n_edges = rd.read<std::uint32_t>();
        s.dep_edges.reserve(n_edges);
        for (std::uint32_t e = 0; e < n_edges; ++e) {
            auto a = rd.read<std::uint32_t>();
            auto b = rd.read<std::uint32_t>();
            s.dep_edges.emplace_back(a, b);
        }
        s.validate();
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

}  // namespace mmci
