// mmci: data generation, training, evaluation, ablation batches, gradient
// checking, and the discrete backdoor demonstration. All artifacts are CSV
// or the documented binary formats; plotting is external.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "mmci/checkpoint.hpp"
#include "mmci/data.hpp"
#include "mmci/gradcheck.hpp"
#include "mmci/metrics.hpp"
#include "mmci/scm.hpp"
#include "mmci/training.hpp"

namespace fs = std::filesystem;
using namespace mmci;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitConfig = 4;
constexpr int kExitNumeric = 5;

// run directories resolve under MMCI_RUN_ROOT when set
fs::path resolve_out(const std::string& out) {
    fs::path p(out);
    if (p.is_absolute()) return p;
    if (const char* root = std::getenv("MMCI_RUN_ROOT")) return fs::path(root) / p;
    return p;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot write " + path.string());
    os << content;
}

void echo_config(const KeyValueConfig& cfg, const std::string& what) {
    std::cout << "# resolved " << what << " config\n" << cfg.to_string();
}

Dataset load_split(const fs::path& dir, const std::string& split) {
    return load_dataset((dir / (split + ".bin")).string());
}

TrainConfig read_train_config(const std::string& path) {
    return TrainConfig::from_config(KeyValueConfig::parse_file(path));
}

int cmd_gen(const std::string& spec_path, const std::string& out) {
    GenSpec spec = spec_path.empty()
                       ? GenSpec{}
                       : GenSpec::from_config(KeyValueConfig::parse_file(spec_path));
    fs::path dir = resolve_out(out);
    fs::create_directories(dir);
    GeneratedData data = generate(spec);
    save_dataset(data.train, (dir / "train.bin").string());
    save_dataset(data.val, (dir / "val.bin").string());
    save_dataset(data.test, (dir / "test.bin").string());
    save_dataset(data.ood, (dir / "ood.bin").string());
    write_file(dir / "gen_spec.cfg", spec.to_config().to_string());
    echo_config(spec.to_config(), "generator");
    std::cout << "wrote " << dir.string() << "/{train,val,test,ood}.bin\n";
    return kExitOk;
}

struct RunOutputs {
    TrainReport report;
    MetricsReport test_metrics;
    MetricsReport ood_metrics;
    bool has_ood = false;
};

RunOutputs run_training(const fs::path& data_dir, const TrainConfig& cfg,
                        const fs::path& out_dir, const std::string& checkpoint_name) {
    Dataset train_ds = load_split(data_dir, "train");
    Dataset val_ds = load_split(data_dir, "val");
    Dataset test_ds = load_split(data_dir, "test");

    RunOutputs out;
    out.report = train(train_ds, val_ds, cfg);
    fs::create_directories(out_dir);
    std::string ckpt = (out_dir / checkpoint_name).string();
    save_checkpoint(ckpt, out.report.best_params);
    out.report.checkpoint_path = ckpt;

    auto labels_of = [](const Dataset& ds) {
        std::vector<double> y;
        y.reserve(ds.samples.size());
        for (const auto& s : ds.samples) y.push_back(s.label);
        return y;
    };
    out.test_metrics =
        evaluate(predict(test_ds, out.report.best_params), labels_of(test_ds));
    if (fs::exists(data_dir / "ood.bin")) {
        Dataset ood_ds = load_split(data_dir, "ood");
        out.ood_metrics =
            evaluate(predict(ood_ds, out.report.best_params), labels_of(ood_ds));
        out.has_ood = true;
    }
    return out;
}

int cmd_train(const std::string& data, const std::string& config,
              const std::string& out) {
    TrainConfig cfg = read_train_config(config);
    echo_config(cfg.to_config(), "train");
    fs::path data_dir = resolve_out(data);
    fs::path out_dir = resolve_out(out);
    RunOutputs r = run_training(data_dir, cfg, out_dir, "checkpoint.bin");
    write_file(out_dir / "report.csv", r.report.csv());
    std::ostringstream metrics_csv;
    metrics_csv << "split," << MetricsReport::csv_header() << "\n";
    metrics_csv << "test," << r.test_metrics.csv_row() << "\n";
    if (r.has_ood) metrics_csv << "ood," << r.ood_metrics.csv_row() << "\n";
    write_file(out_dir / "metrics.csv", metrics_csv.str());
    std::cout << "best_epoch " << r.report.best_epoch << " val_mae "
              << r.report.best_val_mae << "\n";
    std::cout << "wrote " << (out_dir / "report.csv").string() << "\n";
    return kExitOk;
}

int cmd_eval(const std::string& checkpoint, const std::string& data,
             const std::string& split, const std::string& out) {
    ModelParams params = load_checkpoint(resolve_out(checkpoint).string());
    Dataset ds = load_split(resolve_out(data), split);
    std::vector<double> labels;
    for (const auto& s : ds.samples) labels.push_back(s.label);
    MetricsReport rep = evaluate(predict(ds, params), labels);
    std::ostringstream os;
    os << "split," << MetricsReport::csv_header() << "\n"
       << split << ',' << rep.csv_row() << "\n";
    if (!out.empty()) write_file(resolve_out(out), os.str());
    std::cout << os.str();
    return kExitOk;
}

int cmd_ablate(const std::string& data, const std::string& config,
               const std::string& out) {
    TrainConfig base = read_train_config(config);
    fs::path data_dir = resolve_out(data);
    fs::path out_dir = resolve_out(out);
    fs::create_directories(out_dir);

    const Ablation settings[] = {Ablation::None,          Ablation::NoIntra,
                                 Ablation::NoInter,       Ablation::NoDisentangle,
                                 Ablation::NoIntervention, Ablation::NoKL};
    std::ostringstream csv;
    csv << "ablation,lambda,beta,relation_param_sets,best_epoch,val_mae,"
        << "test_mae,ood_mae,test_acc7,test_acc2_pos\n";
    for (Ablation ab : settings) {
        TrainConfig cfg = base;
        cfg.ablation = ab;
        // effective weights as recorded in the report row
        double lam = ab == Ablation::NoDisentangle ? 0.0 : cfg.lambda;
        double bet = ab == Ablation::NoIntervention ? 0.0 : cfg.beta;
        std::string name = ablation_name(ab);
        RunOutputs r = run_training(data_dir, cfg, out_dir, name + ".ckpt");
        csv.precision(17);
        csv << name << ',' << lam << ',' << bet << ','
            << r.report.best_params.relation_param_sets() << ','
            << r.report.best_epoch << ',' << r.report.best_val_mae << ','
            << r.test_metrics.mae << ','
            << (r.has_ood ? r.ood_metrics.mae : -1.0) << ',' << r.test_metrics.acc7
            << ',' << r.test_metrics.acc2_pos << "\n";
        std::cout << "done " << name << "\n";
    }
    write_file(out_dir / "ablations.csv", csv.str());
    std::cout << "wrote " << (out_dir / "ablations.csv").string() << "\n";
    return kExitOk;
}

int cmd_gradcheck(std::size_t d, std::uint64_t seed, double lambda, double beta,
                  double tolerance) {
    ModelConfig mc;
    mc.d = d;
    mc.d_text = 8;
    mc.d_audio = 6;
    mc.d_visual = 6;
    ModelParams params = ModelParams::init(mc, Ablation::None, seed);
    Sample s = make_toy_sample(4, 4, 4, mc.d_text, mc.d_audio, mc.d_visual, seed + 1);
    InterventionBank bank(8);
    Rng bank_rng(seed + 2);
    for (int i = 0; i < 4; ++i) {
        std::vector<double> v(mc.d);
        for (auto& x : v) x = 0.1 * bank_rng.gaussian();
        bank.insert(std::move(v), "bank-" + std::to_string(i));
    }
    GradCheckReport rep = gradient_check(s, params, lambda, beta, 2, bank, seed + 3);
    std::cout << "checked " << rep.n_checked << " parameter entries\n";
    std::cout << "max_rel_err " << rep.max_rel_err << " at " << rep.worst_param
              << "\n";
    if (rep.max_rel_err >= tolerance) {
        std::cerr << "error: gradcheck failed: max_rel_err " << rep.max_rel_err
                  << " >= " << tolerance << "\n";
        return kExitNumeric;
    }
    std::cout << "gradcheck passed (tolerance " << tolerance << ")\n";
    return kExitOk;
}

void print_distribution(std::ostream& os, const std::string& name,
                        const std::vector<double>& p) {
    os << name;
    for (double v : p) os << "  " << v;
    os << "\n";
}

int cmd_backdoor_demo(const std::string& scm_name, std::uint64_t seed,
                      const std::string& csv_path) {
    DiscreteScm scm = scm_name == "random" ? DiscreteScm::random(seed)
                                           : DiscreteScm::canned(scm_name);
    std::ostringstream csv;
    csv << "c,y,observational,interventional,backdoor\n";
    std::cout << "SCM: " << scm_name << " (seed " << seed << ")\n";
    std::cout.precision(10);
    csv.precision(17);
    for (std::size_t c = 0; c < scm.card_c; ++c) {
        auto obs = observational(scm, c);
        auto intv = interventional_truth(scm, c);
        auto bd = backdoor_adjust(scm, c);
        std::cout << "--- C = " << c << " ---\n";
        print_distribution(std::cout, "P(Y | C=c)      ", obs);
        print_distribution(std::cout, "P(Y | do(C=c))  ", intv);
        print_distribution(std::cout, "backdoor formula", bd);
        std::cout << "observational vs interventional gap (TV): "
                  << total_variation(obs, intv) << "\n";
        std::cout << "backdoor vs interventional gap (TV):      "
                  << total_variation(bd, intv) << "\n";
        for (std::size_t y = 0; y < scm.card_y; ++y)
            csv << c << ',' << y << ',' << obs[y] << ',' << intv[y] << ',' << bd[y]
                << "\n";
    }
    if (!csv_path.empty()) write_file(resolve_out(csv_path), csv.str());
    return kExitOk;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream is(text);
    std::string tok;
    while (std::getline(is, tok, ',')) out.push_back(std::stod(tok));
    if (out.empty()) throw config_error("empty value list: " + text);
    return out;
}

int cmd_sweep(const std::string& data, const std::string& config,
              const std::string& lambdas, const std::string& betas,
              const std::string& lrs, const std::string& out) {
    TrainConfig base = read_train_config(config);
    fs::path data_dir = resolve_out(data);
    Dataset train_ds = load_split(data_dir, "train");
    Dataset val_ds = load_split(data_dir, "val");

    std::vector<TrainConfig> grid;
    for (double lam : parse_list(lambdas))
        for (double bet : parse_list(betas))
            for (double lr : parse_list(lrs)) {
                TrainConfig c = base;
                c.lambda = lam;
                c.beta = bet;
                c.peak_lr = lr;
                grid.push_back(c);
            }

    auto results = sweep(grid, train_ds, val_ds);
    std::ostringstream csv;
    csv.precision(17);
    csv << "config_hash,lambda,beta,peak_lr,best_epoch,best_val_mae\n";
    for (const auto& r : results)
        csv << r.config_hash << ',' << r.cfg.lambda << ',' << r.cfg.beta << ','
            << r.cfg.peak_lr << ',' << r.best_epoch << ',' << r.best_val_mae
            << "\n";
    fs::path out_path = resolve_out(out);
    if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
    write_file(out_path, csv.str());
    std::cout << csv.str();
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-relational multimodal causal intervention toolkit"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
    std::string gen_spec, gen_out = "data";
    gen->add_option("--spec", gen_spec, "generator spec file (key = value)");
    gen->add_option("--out", gen_out, "output directory")->capture_default_str();

    // train
    auto* tr = app.add_subcommand("train", "train a model");
    std::string tr_data = "data", tr_config, tr_out = "run";
    tr->add_option("--data", tr_data, "dataset directory")->capture_default_str();
    tr->add_option("--config", tr_config, "train config file")->required();
    tr->add_option("--out", tr_out, "run output directory")->capture_default_str();

    // eval
    auto* ev = app.add_subcommand("eval", "evaluate a checkpoint on a split");
    std::string ev_ckpt, ev_data = "data", ev_split = "test", ev_out;
    ev->add_option("--checkpoint", ev_ckpt, "checkpoint file")->required();
    ev->add_option("--data", ev_data, "dataset directory")->capture_default_str();
    ev->add_option("--split", ev_split, "train|val|test|ood")->capture_default_str();
    ev->add_option("--out", ev_out, "optional CSV output path");

    // ablate
    auto* ab = app.add_subcommand("ablate", "run the full model plus five ablations");
    std::string ab_data = "data", ab_config, ab_out = "ablations";
    ab->add_option("--data", ab_data, "dataset directory")->capture_default_str();
    ab->add_option("--config", ab_config, "train config file")->required();
    ab->add_option("--out", ab_out, "output directory")->capture_default_str();

    // gradcheck
    auto* gc = app.add_subcommand("gradcheck",
                                  "finite-difference check of the full loss");
    std::size_t gc_d = 16;
    std::uint64_t gc_seed = 7;
    double gc_lambda = 0.2, gc_beta = 0.6, gc_tol = 1e-4;
    gc->add_option("--d", gc_d, "latent dimension")->capture_default_str();
    gc->add_option("--seed", gc_seed, "seed")->capture_default_str();
    gc->add_option("--lambda", gc_lambda, "uniformity weight")->capture_default_str();
    gc->add_option("--beta", gc_beta, "intervention weight")->capture_default_str();
    gc->add_option("--tolerance", gc_tol, "max relative error")->capture_default_str();

    // backdoor-demo
    auto* bd = app.add_subcommand("backdoor-demo",
                                  "exact backdoor adjustment on a discrete SCM");
    std::string bd_scm = "confounded", bd_csv;
    std::uint64_t bd_seed = 7;
    bd->add_option("--scm", bd_scm, "unconfounded|confounded|shortcut|random")
        ->capture_default_str();
    bd->add_option("--seed", bd_seed, "seed for --scm random")->capture_default_str();
    bd->add_option("--csv", bd_csv, "optional CSV output path");

    // sweep
    auto* sw = app.add_subcommand("sweep", "grid sweep over lambda/beta/lr");
    std::string sw_data = "data", sw_config, sw_out = "sweep.csv";
    std::string sw_lambdas = "0.2", sw_betas = "0.6", sw_lrs = "";
    sw->add_option("--data", sw_data, "dataset directory")->capture_default_str();
    sw->add_option("--config", sw_config, "base train config")->required();
    sw->add_option("--lambdas", sw_lambdas, "comma list")->capture_default_str();
    sw->add_option("--betas", sw_betas, "comma list")->capture_default_str();
    sw->add_option("--lrs", sw_lrs, "comma list (default: base config lr)");
    sw->add_option("--out", sw_out, "summary CSV path")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen->parsed()) return cmd_gen(gen_spec, gen_out);
        if (tr->parsed()) return cmd_train(tr_data, tr_config, tr_out);
        if (ev->parsed()) return cmd_eval(ev_ckpt, ev_data, ev_split, ev_out);
        if (ab->parsed()) return cmd_ablate(ab_data, ab_config, ab_out);
        if (gc->parsed())
            return cmd_gradcheck(gc_d, gc_seed, gc_lambda, gc_beta, gc_tol);
        if (bd->parsed()) return cmd_backdoor_demo(bd_scm, bd_seed, bd_csv);
        if (sw->parsed()) {
            std::string lrs = sw_lrs;
            if (lrs.empty()) {
                std::ostringstream os;
                os.precision(17);
                os << read_train_config(sw_config).peak_lr;
                lrs = os.str();
            }
            return cmd_sweep(sw_data, sw_config, sw_lambdas, sw_betas, lrs, sw_out);
        }
    } catch (const io_error& e) {
        std::cerr << "error: io: " << e.what() << "\n";
        return kExitIo;
    } catch (const config_error& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "error: numeric: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const numeric_error& e) {
        std::cerr << "error: numeric: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
