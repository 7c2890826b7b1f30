#ifndef SNNE_CONTAINER_HPP
#define SNNE_CONTAINER_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "snne/ensemble.hpp"

namespace snne {

// Model container: "SNNE1" magic line, a text key=value manifest, then one
// binary blob for the pipeline and one per member (little-endian 64-bit
// values), closed by a CRC32 line covering the manifest and every blob
// payload. Wrong magic and a failed checksum raise distinct errors.
using Manifest = std::vector<std::pair<std::string, std::string>>;

void save_ensemble(const EnsembleModel& ens, const std::string& path,
                   const Manifest& extra = {});

EnsembleModel load_ensemble(const std::string& path);

// Manifest only, without deserializing the weights.
Manifest read_manifest(const std::string& path);

// IEEE 802.3 reflected CRC32 (zlib-compatible).
std::uint32_t crc32(const std::uint8_t* data, std::size_t size,
                    std::uint32_t seed = 0);

}  // namespace snne

#endif  // SNNE_CONTAINER_HPP
