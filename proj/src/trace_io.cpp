#include "omnoise/trace_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace omnoise {

static_assert(std::endian::native == std::endian::little,
              "columnar format is little-endian; big-endian hosts unsupported");
static_assert(sizeof(std::complex<double>) == 16);

namespace {

constexpr char magic[4] = {'O', 'M', 'N', 'B'};
constexpr std::uint32_t format_version = 1;

template <typename T>
void put(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::ifstream& is) {
    T v;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is) throw std::runtime_error("columnar file truncated");
    return v;
}

}  // namespace

void write_columnar(const std::string& path, const ColumnarFile& file,
                    std::size_t downsample) {
    if (downsample == 0) throw std::invalid_argument("downsample must be >= 1");
    if (file.channels.empty()) throw std::invalid_argument("no channels to write");
    const std::size_t n_in = file.channels.front().samples.size();
    for (const auto& ch : file.channels)
        if (ch.samples.size() != n_in)
            throw std::invalid_argument("all channels must have equal length");
    const std::size_t n_out = (n_in + downsample - 1) / downsample;

    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    os.write(magic, 4);
    put(os, format_version);
    put(os, static_cast<std::uint32_t>(file.channels.size()));
    put(os, static_cast<std::uint64_t>(n_out));
    put(os, file.dt * static_cast<double>(downsample));
    put(os, file.seed);
    put(os, file.spec_digest);
    for (const auto& ch : file.channels) {
        put(os, static_cast<std::uint16_t>(ch.name.size()));
        os.write(ch.name.data(), static_cast<std::streamsize>(ch.name.size()));
    }
    for (const auto& ch : file.channels) {
        if (downsample == 1) {
            os.write(reinterpret_cast<const char*>(ch.samples.data()),
                     static_cast<std::streamsize>(n_in * sizeof(std::complex<double>)));
        } else {
            for (std::size_t j = 0; j < n_in; j += downsample) put(os, ch.samples[j]);
        }
    }
    if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

ColumnarFile read_columnar(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + path + "'");
    char m[4];
    is.read(m, 4);
    if (!is || std::memcmp(m, magic, 4) != 0)
        throw std::runtime_error("'" + path + "' is not a columnar file");
    if (get<std::uint32_t>(is) != format_version)
        throw std::runtime_error("unsupported columnar format version");
    const auto n_channels = get<std::uint32_t>(is);
    const auto n = get<std::uint64_t>(is);

    ColumnarFile file;
    file.dt = get<double>(is);
    file.seed = get<std::uint64_t>(is);
    file.spec_digest = get<std::uint64_t>(is);
    file.channels.resize(n_channels);
    for (auto& ch : file.channels) {
        const auto len = get<std::uint16_t>(is);
        ch.name.resize(len);
        is.read(ch.name.data(), len);
        if (!is) throw std::runtime_error("columnar file truncated");
    }
    for (auto& ch : file.channels) {
        ch.samples.resize(n);
        is.read(reinterpret_cast<char*>(ch.samples.data()),
                static_cast<std::streamsize>(n * sizeof(std::complex<double>)));
        if (!is) throw std::runtime_error("columnar file truncated");
    }
    return file;
}

void write_envelope(const std::string& path, const Envelope& env, std::size_t downsample) {
    ColumnarFile file;
    file.dt = env.dt;
    file.seed = env.seed;
    file.spec_digest = env.spec.digest();
    file.channels.push_back({"r", env.samples});
    write_columnar(path, file, downsample);
}

Envelope read_envelope(const std::string& path, const DriveSpec& spec) {
    ColumnarFile file = read_columnar(path);
    if (file.channels.size() != 1 || file.channels.front().name != "r")
        throw std::runtime_error("'" + path + "' does not hold a single envelope channel");
    if (file.spec_digest != spec.digest())
        throw std::runtime_error("drive spec digest mismatch for '" + path + "'");
    Envelope env;
    env.dt = file.dt;
    env.seed = file.seed;
    env.spec = spec;
    env.samples = std::move(file.channels.front().samples);
    return env;
}

}  // namespace omnoise
