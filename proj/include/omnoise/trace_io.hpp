#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "omnoise/envelope.hpp"

namespace omnoise {

// Binary columnar container for envelopes and simulation traces:
//   "OMNB" | u32 version | u32 n_channels | u64 n_samples | f64 dt
//   | u64 seed | u64 spec_digest | per channel: u16 name_len + name
//   | per channel: n_samples complex128 (little-endian float64 pairs)
struct ColumnarChannel {
    std::string name;
    std::vector<std::complex<double>> samples;
};

struct ColumnarFile {
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t spec_digest = 0;
    std::vector<ColumnarChannel> channels;
};

// downsample > 1 keeps every downsample-th sample; dt written is scaled
// accordingly.
void write_columnar(const std::string& path, const ColumnarFile& file,
                    std::size_t downsample = 1);

ColumnarFile read_columnar(const std::string& path);

void write_envelope(const std::string& path, const Envelope& env, std::size_t downsample = 1);

// Rebuilds an Envelope from a single-channel file; the caller supplies the
// DriveSpec, which is verified against the stored digest.
Envelope read_envelope(const std::string& path, const DriveSpec& spec);

}  // namespace omnoise
