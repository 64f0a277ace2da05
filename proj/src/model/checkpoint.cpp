#include "model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "core/error.hpp"

namespace mdne {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint IO assumes a little-endian host");

template <class T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw ParseError("checkpoint truncated");
    return v;
}

constexpr std::uint64_t kMaxDim = std::uint64_t{1} << 31;

std::uint64_t get_dim(std::istream& in) {
    const auto v = get<std::uint64_t>(in);
    if (v > kMaxDim) throw ParseError("checkpoint dimension out of range");
    return v;
}

}  // namespace

void write_checkpoint(const ModelParams& params, std::ostream& out) {
    out.write(kCheckpointMagic, sizeof kCheckpointMagic);
    put<std::uint32_t>(out, kCheckpointVersion);
    put<std::uint8_t>(out, params.spec.preprocess ? 1 : 0);
    put<std::uint64_t>(out, params.spec.pre_struct_dim);
    put<std::uint64_t>(out, params.spec.pre_attr_dim);
    put<std::uint64_t>(out, params.spec.hidden_dims.size());
    for (std::size_t w : params.spec.hidden_dims) put<std::uint64_t>(out, w);
    put<std::uint64_t>(out, params.n);
    put<std::uint64_t>(out, params.m);

    auto write_tensor = [&](std::size_t rows, std::size_t cols, std::span<const double> v) {
        put<std::uint64_t>(out, rows);
        put<std::uint64_t>(out, cols);
        out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size_bytes()));
    };
    auto write_layer = [&](const DenseLayer& l) {
        write_tensor(l.weight.rows(), l.weight.cols(), l.weight.values());
        write_tensor(1, l.bias.size(), l.bias);
    };
    if (params.spec.preprocess) {
        write_layer(params.struct_in);
        write_layer(params.attr_in);
    }
    for (const auto& l : params.encoder) write_layer(l);
    for (const auto& l : params.decoder) write_layer(l);
    if (params.spec.preprocess) {
        write_layer(params.struct_out);
        write_layer(params.attr_out);
    }
    if (!out) throw IoError("checkpoint write failed");
}

ModelParams read_checkpoint(std::istream& in) {
    char magic[sizeof kCheckpointMagic];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0) {
        throw ParseError("not an mdne checkpoint (bad magic)");
    }
    const auto version = get<std::uint32_t>(in);
    if (version != kCheckpointVersion) {
        throw ParseError("unsupported checkpoint version " + std::to_string(version));
    }
    LayerSpec spec;
    spec.preprocess = get<std::uint8_t>(in) != 0;
    spec.pre_struct_dim = get_dim(in);
    spec.pre_attr_dim = get_dim(in);
    const auto layers = get<std::uint64_t>(in);
    if (layers == 0 || layers > 64) throw ParseError("checkpoint layer count out of range");
    for (std::uint64_t i = 0; i < layers; ++i) spec.hidden_dims.push_back(get_dim(in));
    const auto n = get_dim(in);
    const auto m = get_dim(in);

    ModelParams params;
    try {
        params = zero_params(spec, n, m);
    } catch (const ValidationError& e) {
        throw ParseError(std::string("checkpoint header describes an invalid model: ") + e.what());
    }
    auto read_tensor = [&](std::size_t rows, std::size_t cols, std::span<double> dst) {
        const auto r = get<std::uint64_t>(in);
        const auto c = get<std::uint64_t>(in);
        if (r != rows || c != cols) throw ParseError("checkpoint tensor shape does not match header");
        if (!in.read(reinterpret_cast<char*>(dst.data()), static_cast<std::streamsize>(dst.size_bytes()))) {
            throw ParseError("checkpoint truncated");
        }
        if (!all_finite(dst)) throw ParseError("checkpoint contains non-finite values");
    };
    auto read_layer = [&](DenseLayer& l) {
        read_tensor(l.weight.rows(), l.weight.cols(), l.weight.values());
        read_tensor(1, l.bias.size(), l.bias);
    };
    if (spec.preprocess) {
        read_layer(params.struct_in);
        read_layer(params.attr_in);
    }
    for (auto& l : params.encoder) read_layer(l);
    for (auto& l : params.decoder) read_layer(l);
    if (spec.preprocess) {
        read_layer(params.struct_out);
        read_layer(params.attr_out);
    }
    if (in.peek() != std::char_traits<char>::eof()) throw ParseError("trailing bytes after checkpoint");
    return params;
}

void save_checkpoint(const ModelParams& params, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    write_checkpoint(params, out);
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return read_checkpoint(in);
}

}  // namespace mdne
