#include <cstdio>
#include <fstream>

#include <doctest.h>

#include "mmci/data.hpp"
#include "mmci/metrics.hpp"

using namespace mmci;

namespace {

bool samples_identical(const Sample& a, const Sample& b) {
    return a.id == b.id && a.label == b.label && a.text_feats == b.text_feats &&
           a.audio_feats == b.audio_feats && a.visual_feats == b.visual_feats &&
           a.dep_edges == b.dep_edges && a.n_text == b.n_text &&
           a.n_audio == b.n_audio && a.n_visual == b.n_visual &&
           a.d_text == b.d_text && a.d_audio == b.d_audio &&
           a.d_visual == b.d_visual;
}

bool datasets_identical(const Dataset& a, const Dataset& b) {
    if (a.samples.size() != b.samples.size() || a.split != b.split ||
        a.label_lo != b.label_lo || a.label_hi != b.label_hi ||
        a.spec_hash != b.spec_hash)
        return false;
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        if (!samples_identical(a.samples[i], b.samples[i])) return false;
    return true;
}

// mean shortcut-channel activation: the designated text token plus the
// shared audio/visual coordinate
double shortcut_signal(const Sample& s) {
    double acc = s.text_feats[shortcut_text_row(s.n_text) * s.d_text + kShortcutCoord];
    std::size_t cnt = 1;
    for (std::size_t i = 0; i < s.n_audio; ++i, ++cnt)
        acc += s.audio_feats[i * s.d_audio + kShortcutCoord];
    for (std::size_t i = 0; i < s.n_visual; ++i, ++cnt)
        acc += s.visual_feats[i * s.d_visual + kShortcutCoord];
    return acc / static_cast<double>(cnt);
}

double probe_corr(const Dataset& ds) {
    std::vector<double> sig, y;
    for (const auto& s : ds.samples) {
        sig.push_back(shortcut_signal(s));
        y.push_back(s.label);
    }
    return corr(sig, y);
}

}  // namespace

TEST_CASE("spec round-trips through its config form") {
    GenSpec spec;
    spec.seed = 99;
    spec.rho_train = 0.5;
    spec.rho_ood = -0.25;
    spec.n_train = 32;
    spec.d_text = 12;
    GenSpec back = GenSpec::from_config(spec.to_config());
    CHECK(back.seed == 99);
    CHECK(back.rho_train == doctest::Approx(0.5));
    CHECK(back.rho_ood == doctest::Approx(-0.25));
    CHECK(back.n_train == 32);
    CHECK(back.d_text == 12);
    CHECK(back.hash() == spec.hash());
}

TEST_CASE("validation rejects degenerate specs") {
    GenSpec spec;
    spec.n_text = 0;
    CHECK_THROWS_AS(spec.validate(), config_error);
    GenSpec flipped;
    flipped.label_lo = 2.0;
    flipped.label_hi = -2.0;
    CHECK_THROWS_AS(flipped.validate(), config_error);
}

TEST_CASE("same seed generates bit-identical data, different seed differs") {
    GenSpec spec;
    spec.n_train = 8;
    spec.n_val = 4;
    spec.n_test = 4;
    spec.n_ood = 4;
    auto a = generate(spec);
    auto b = generate(spec);
    CHECK(datasets_identical(a.train, b.train));
    CHECK(datasets_identical(a.ood, b.ood));

    spec.seed = 2;
    auto c = generate(spec);
    CHECK(!datasets_identical(a.train, c.train));
}

TEST_CASE("save/load round trip is bit-exact") {
    GenSpec spec;
    spec.n_train = 6;
    spec.n_val = 2;
    spec.n_test = 2;
    spec.n_ood = 2;
    auto data = generate(spec);
    const char* path = "ds_roundtrip_test.bin";
    save_dataset(data.train, path);
    Dataset back = load_dataset(path);
    CHECK(datasets_identical(data.train, back));

    // saving the loaded copy reproduces the same bytes
    const char* path2 = "ds_roundtrip_test2.bin";
    save_dataset(back, path2);
    std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
    std::string b1((std::istreambuf_iterator<char>(f1)), {});
    std::string b2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(b1 == b2);
    CHECK(!b1.empty());
    std::remove(path);
    std::remove(path2);
}

TEST_CASE("truncated file fails with the byte offset in the message") {
    GenSpec spec;
    spec.n_train = 4;
    spec.n_val = 1;
    spec.n_test = 1;
    spec.n_ood = 1;
    auto data = generate(spec);
    const char* path = "ds_trunc_test.bin";
    save_dataset(data.train, path);
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), {});
    in.close();
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    }
    bool threw = false;
    try {
        (void)load_dataset(path);
    } catch (const io_error& e) {
        threw = true;
        CHECK(std::string(e.what()).find("byte") != std::string::npos);
    }
    CHECK(threw);
    std::remove(path);
}

TEST_CASE("empty dataset still writes a valid container") {
    Dataset empty;
    empty.split = Split::Val;
    empty.spec_hash = 1234;
    const char* path = "ds_empty_test.bin";
    save_dataset(empty, path);
    Dataset back = load_dataset(path);
    CHECK(back.samples.empty());
    CHECK(back.split == Split::Val);
    CHECK(back.spec_hash == 1234);
    std::remove(path);
}

TEST_CASE("shortcut channel correlates with labels as configured") {
    GenSpec spec;
    spec.n_train = 500;
    spec.n_val = 1;
    spec.n_test = 1;
    spec.n_ood = 500;
    auto data = generate(spec);
    CHECK(probe_corr(data.train) > 0.8);
    CHECK(probe_corr(data.ood) < -0.6);

    GenSpec neutral = spec;
    neutral.rho_train = 0.0;
    neutral.rho_ood = 0.0;
    neutral.seed = 3;
    auto flat = generate(neutral);
    CHECK(std::abs(probe_corr(flat.train)) < 0.1);
    CHECK(std::abs(probe_corr(flat.ood)) < 0.1);
}

TEST_CASE("causal coordinate tracks causal_strength") {
    GenSpec spec;
    spec.n_train = 300;
    spec.n_val = 1;
    spec.n_test = 1;
    spec.n_ood = 1;
    spec.causal_strength = 0.0;
    spec.rho_train = 0.0;
    auto data = generate(spec);
    std::vector<double> sig, y;
    for (const auto& s : data.train.samples) {
        double acc = 0.0;
        for (std::size_t i = 0; i < s.n_text; ++i)
            acc += s.text_feats[i * s.d_text + kCausalCoord];
        sig.push_back(acc);
        y.push_back(s.label);
    }
    // with no causal signal and no shortcut, features carry no label info
    CHECK(std::abs(corr(sig, y)) < 0.15);
}

TEST_CASE("split names") {
    CHECK(split_name(Split::Train) == "train");
    CHECK(split_name(Split::Val) == "val");
    CHECK(split_name(Split::Test) == "test");
    CHECK(split_name(Split::Ood) == "ood");
}
