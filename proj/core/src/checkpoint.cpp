#include "mmci/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace mmci {

namespace {

// on-disk numbers are little-endian; this codebase targets LE hosts
static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

void write_u64(std::ostream& os, std::uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint64_t read_u64(std::istream& is) {
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!is) throw io_error("checkpoint truncated while reading length");
    return v;
}

void write_tensor(std::ostream& os, const Tensor& t) {
    write_u64(os, t.size());
    os.write(reinterpret_cast<const char*>(t.data().data()),
             static_cast<std::streamsize>(t.size() * sizeof(double)));
}

void read_tensor(std::istream& is, Tensor& t) {
    std::uint64_t n = read_u64(is);
    if (n != t.size())
        throw io_error("checkpoint tensor length mismatch: expected " +
                       std::to_string(t.size()) + ", got " + std::to_string(n));
    is.read(reinterpret_cast<char*>(t.data().data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!is) throw io_error("checkpoint truncated while reading tensor data");
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelParams& p) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open checkpoint for writing: " + path);
    auto tensors = p.all_tensors();
    os << kCheckpointMagic << " v" << kCheckpointVersion << "\n";
    os << "d " << p.cfg.d << "\n";
    os << "d_text " << p.cfg.d_text << "\n";
    os << "d_audio " << p.cfg.d_audio << "\n";
    os << "d_visual " << p.cfg.d_visual << "\n";
    os << "classes " << p.cfg.classes << "\n";
    os << "dropout " << p.cfg.dropout << "\n";
    os << "label_lo " << p.cfg.label_lo << "\n";
    os << "label_hi " << p.cfg.label_hi << "\n";
    os << "relation_count " << kNumRelations << "\n";
    os << "relation_param_sets " << p.relation_param_sets() << "\n";
    os << "ablation " << ablation_name(p.ablation) << "\n";
    os << "seed " << p.seed << "\n";
    os << "tensors " << tensors.size() << "\n";
    for (const auto& t : tensors) write_tensor(os, t);
    if (!os) throw io_error("write failure on checkpoint: " + path);
}

ModelParams load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open checkpoint: " + path);

    std::string line;
    if (!std::getline(is, line)) throw io_error("empty checkpoint file");
    {
        std::istringstream ls(line);
        std::string magic, ver;
        ls >> magic >> ver;
        if (magic != kCheckpointMagic)
            throw io_error("not a checkpoint file: " + path);
        if (ver != "v" + std::to_string(kCheckpointVersion))
            throw io_error("unsupported checkpoint version: " + ver);
    }

    std::map<std::string, std::string> kv;
    std::uint64_t tensor_count = 0;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string key, val;
        ls >> key >> val;
        if (key == "tensors") {
            tensor_count = std::stoull(val);
            break;
        }
        kv[key] = val;
    }
    auto need = [&](const std::string& k) {
        auto it = kv.find(k);
        if (it == kv.end()) throw io_error("checkpoint header missing key: " + k);
        return it->second;
    };

    ModelConfig cfg;
    cfg.d = std::stoull(need("d"));
    cfg.d_text = std::stoull(need("d_text"));
    cfg.d_audio = std::stoull(need("d_audio"));
    cfg.d_visual = std::stoull(need("d_visual"));
    cfg.classes = std::stoull(need("classes"));
    cfg.dropout = std::stod(need("dropout"));
    cfg.label_lo = std::stod(need("label_lo"));
    cfg.label_hi = std::stod(need("label_hi"));
    Ablation ab = ablation_from_name(need("ablation"));
    std::uint64_t seed = std::stoull(need("seed"));

    ModelParams p = ModelParams::init(cfg, ab, seed);
    auto tensors = p.all_tensors();
    if (tensor_count != tensors.size())
        throw io_error("checkpoint tensor count mismatch: expected " +
                       std::to_string(tensors.size()) + ", got " +
                       std::to_string(tensor_count));
    for (auto& t : tensors) read_tensor(is, t);
    return p;
}

}  // namespace mmci
