#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace idsgan::ckpt {

inline constexpr char kMagic[8] = {'I', 'D', 'S', 'G', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kFormatVersion = 1;

/// A JSON header plus named numeric arrays.
///
/// File layout (all integers little-endian):
///   magic[8] | u32 version | u64 header_bytes | header JSON |
///   array payloads in header order | u64 FNV-1a of every preceding byte
/// Doubles are stored as their IEEE-754 bit patterns, so values round-trip
/// exactly.
struct Archive {
  nlohmann::json header = nlohmann::json::object();
  std::map<std::string, std::vector<double>> reals;
  std::map<std::string, std::vector<std::int64_t>> integers;

  void put(const std::string& name, std::span<const double> values);
  void put(const std::string& name, std::span<const std::int64_t> values);
  /// Missing entries throw CheckpointError.
  const std::vector<double>& real(const std::string& name) const;
  const std::vector<std::int64_t>& integer(const std::string& name) const;
};

std::vector<std::uint8_t> encode(const Archive& archive);
/// Any truncation, checksum mismatch, bad magic, or version mismatch throws
/// CheckpointError; nothing is returned partially.
Archive decode(std::span<const std::uint8_t> bytes, const std::string& source = "<memory>");

/// Writes to a sibling temporary file and renames it into place.
void save(const Archive& archive, const std::filesystem::path& path);
Archive load(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64(std::string_view text);
/// 16 lowercase hex digits.
std::string hex64(std::uint64_t value);

}  // namespace idsgan::ckpt
