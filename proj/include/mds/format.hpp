#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mds/types.hpp"

namespace mds {

// Container layout shared by both formats:
//   bytes 0..3   magic ("MDS1" or "MDP1")
//   bytes 4..7   header length N, uint32 little-endian
//   N bytes      JSON header, UTF-8
//   rest         row-major float32 little-endian array data

/// Writes a spectrogram (.mds). `extra` fields are merged into the JSON header.
void save_spectrogram(const std::filesystem::path& path, const Spectrogram& spec,
                      const nlohmann::json& extra);
void save_spectrogram(const std::filesystem::path& path, const Spectrogram& spec);

/// Reads a spectrogram; when `header_out` is non-null the full JSON header is returned.
Spectrogram load_spectrogram(const std::filesystem::path& path,
                             nlohmann::json* header_out = nullptr);

/// Recording variant: label/interval/seed bookkeeping rides in the header.
void save_recording(const std::filesystem::path& path, const MeasuredRecording& rec);
MeasuredRecording load_recording(const std::filesystem::path& path);

/// Patch archive (.mdp): one manifest plus `count` contiguous patch blocks.
void save_patches(const std::filesystem::path& path, const std::vector<NoisePatch>& patches);
std::vector<NoisePatch> load_patches(const std::filesystem::path& path,
                                     nlohmann::json* manifest_out = nullptr);

/// FNV-1a hash of a file's bytes; used by determinism checks.
std::uint64_t hash_file(const std::filesystem::path& path);

/// FNV-1a hash of a canonically serialized JSON value.
std::uint64_t hash_json(const nlohmann::json& j);

std::string to_hex(std::uint64_t value);

}  // namespace mds
