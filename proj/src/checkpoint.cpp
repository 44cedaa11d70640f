#include "esac/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "checkpoint serialization assumes a little-endian host");

namespace esac {

namespace {
constexpr char kMagic[8] = {'E', 'S', 'A', 'C', 'C', 'K', 'P', 'T'};

template <typename T>
void append_raw(std::string& out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

template <typename T>
T read_raw(const std::string& in, std::size_t& off) {
    if (off + sizeof(T) > in.size()) throw std::runtime_error("checkpoint: truncated file");
    T v;
    std::memcpy(&v, in.data() + off, sizeof(T));
    off += sizeof(T);
    return v;
}

void append_string(std::string& out, const std::string& s) {
    append_raw<std::uint64_t>(out, s.size());
    out.append(s);
}

std::string read_string(const std::string& in, std::size_t& off) {
    const auto len = read_raw<std::uint64_t>(in, off);
    if (off + len > in.size()) throw std::runtime_error("checkpoint: truncated string");
    std::string s = in.substr(off, len);
    off += len;
    return s;
}
}  // namespace

void append_param_block(std::string& out, const ParamVector& p) {
    append_raw<std::uint64_t>(out, p.spec_id);
    append_raw<std::uint64_t>(out, p.values.size());
    for (double v : p.values) append_raw<double>(out, v);
}

ParamVector read_param_block(const std::string& in, std::size_t& offset) {
    ParamVector p;
    p.spec_id = read_raw<std::uint64_t>(in, offset);
    const auto len = read_raw<std::uint64_t>(in, offset);
    if (offset + len * sizeof(double) > in.size())
        throw std::runtime_error("checkpoint: truncated parameter block");
    p.values.resize(len);
    for (auto& v : p.values) v = read_raw<double>(in, offset);
    return p;
}

void save_checkpoint(const std::string& path, const CheckpointData& data) {
    std::string buf;
    buf.append(kMagic, sizeof(kMagic));
    append_raw<std::uint32_t>(buf, data.version);
    append_string(buf, data.algorithm);
    append_string(buf, data.env_name);
    append_raw<std::uint64_t>(buf, data.master_seed);
    append_raw<std::int32_t>(buf, data.next_generation);
    append_raw<std::int32_t>(buf, data.completed_phases);
    append_raw<double>(buf, data.incumbent_fitness);
    append_raw<double>(buf, data.mutation.sigma_current);
    append_raw<double>(buf, data.mutation.sigma_initial);
    append_raw<double>(buf, data.mutation.zeta);
    append_raw<double>(buf, data.mutation.alpha_es);
    append_raw<std::int32_t>(buf, data.mutation.n);
    append_raw<std::uint64_t>(buf, data.mutation.history.size());
    for (const auto& h : data.mutation.history) {
        append_raw<double>(buf, h.r_max);
        append_raw<double>(buf, h.r_avg);
        append_raw<double>(buf, h.sigma);
    }
    append_raw<std::uint64_t>(buf, data.blocks.size());
    for (const auto& [name, params] : data.blocks) {
        append_string(buf, name);
        append_param_block(buf, params);
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open checkpoint file for writing: " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

CheckpointData load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint file: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t off = 0;
    if (buf.size() < sizeof(kMagic) || std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("checkpoint: bad magic in " + path);
    off = sizeof(kMagic);

    CheckpointData data;
    data.version = read_raw<std::uint32_t>(buf, off);
    if (data.version != 1)
        throw std::runtime_error("checkpoint: unsupported version " +
                                 std::to_string(data.version));
    data.algorithm = read_string(buf, off);
    data.env_name = read_string(buf, off);
    data.master_seed = read_raw<std::uint64_t>(buf, off);
    data.next_generation = read_raw<std::int32_t>(buf, off);
    data.completed_phases = read_raw<std::int32_t>(buf, off);
    data.incumbent_fitness = read_raw<double>(buf, off);
    const double sigma_current = read_raw<double>(buf, off);
    const double sigma_initial = read_raw<double>(buf, off);
    const double zeta = read_raw<double>(buf, off);
    const double alpha_es = read_raw<double>(buf, off);
    const int n = read_raw<std::int32_t>(buf, off);
    data.mutation = MutationState(sigma_initial, zeta, alpha_es, n);
    data.mutation.sigma_current = sigma_current;
    const auto hist_len = read_raw<std::uint64_t>(buf, off);
    data.mutation.history.reserve(hist_len);
    for (std::uint64_t i = 0; i < hist_len; ++i) {
        AmtRecord h;
        h.r_max = read_raw<double>(buf, off);
        h.r_avg = read_raw<double>(buf, off);
        h.sigma = read_raw<double>(buf, off);
        data.mutation.history.push_back(h);
    }
    const auto block_count = read_raw<std::uint64_t>(buf, off);
    for (std::uint64_t i = 0; i < block_count; ++i) {
        std::string name = read_string(buf, off);
        data.blocks.emplace_back(std::move(name), read_param_block(buf, off));
    }
    if (off != buf.size()) throw std::runtime_error("checkpoint: trailing bytes in " + path);
    return data;
}

}  // namespace esac
