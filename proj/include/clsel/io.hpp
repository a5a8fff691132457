#pragma once

#include <cstdint>
#include <string>

namespace clsel {

// Writes content to path via a temporary file and rename, so an interrupted
// run never leaves a partially-written output behind.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// FNV-1a 64-bit content hash, used as the data fingerprint in run manifests.
std::uint64_t fnv1a64(const std::string& content);
std::uint64_t fnv1a64_file(const std::string& path);
std::string fnv1a64_hex(std::uint64_t h);

// Shortest round-trip decimal rendering of a double ("inf"/"-inf"/"nan" for
// the non-finite values), shared by every CSV writer.
std::string format_double(double v);

}  // namespace clsel
