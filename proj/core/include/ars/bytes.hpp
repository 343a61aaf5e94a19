#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ars {

// Doubles are serialized as little-endian byte streams regardless of host
// order so that model files round-trip bit-exactly everywhere.
std::string pack_f64_le(const std::vector<double>& values);
std::vector<double> unpack_f64_le(const std::string& bytes);

std::string base64_encode(const std::string& bytes);
std::string base64_decode(const std::string& text);

// FNV-1a 64-bit; used for content hashes of shared-representation files.
std::uint64_t fnv1a64(const std::string& bytes);
std::string to_hex(std::uint64_t value);

}  // namespace ars
