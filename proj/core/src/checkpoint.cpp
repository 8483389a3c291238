#include "idsgan/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "idsgan/errors.hpp"

namespace idsgan::ckpt {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  static_assert(std::is_unsigned_v<T>);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, const std::string& source)
      : bytes_(bytes), source_(source) {}

  std::span<const std::uint8_t> take(std::size_t n) {
    if (n > bytes_.size() - pos_) {
      throw CheckpointError(source_ + ": truncated checkpoint (needed " + std::to_string(n) +
                            " bytes at offset " + std::to_string(pos_) + ")");
    }
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  template <typename T>
  T get_le() {
    const auto raw = take(sizeof(T));
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(raw[i]) << (8 * i);
    return value;
  }

  std::size_t position() const { return pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  const std::string& source_;
};

}  // namespace

void Archive::put(const std::string& name, std::span<const double> values) {
  reals[name].assign(values.begin(), values.end());
}

void Archive::put(const std::string& name, std::span<const std::int64_t> values) {
  integers[name].assign(values.begin(), values.end());
}

const std::vector<double>& Archive::real(const std::string& name) const {
  const auto it = reals.find(name);
  if (it == reals.end()) throw CheckpointError("checkpoint has no real array '" + name + "'");
  return it->second;
}

const std::vector<std::int64_t>& Archive::integer(const std::string& name) const {
  const auto it = integers.find(name);
  if (it == integers.end()) {
    throw CheckpointError("checkpoint has no integer array '" + name + "'");
  }
  return it->second;
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64(std::string_view text) {
  return fnv1a64(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string hex64(std::uint64_t value) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, value >>= 4) out[static_cast<std::size_t>(i)] = digits[value & 15];
  return out;
}

std::vector<std::uint8_t> encode(const Archive& archive) {
  json index = json::array();
  for (const auto& [name, values] : archive.reals) {
    index.push_back({{"name", name}, {"type", "f64"}, {"count", values.size()}});
  }
  for (const auto& [name, values] : archive.integers) {
    index.push_back({{"name", name}, {"type", "i64"}, {"count", values.size()}});
  }
  const std::string header = json{{"meta", archive.header}, {"arrays", index}}.dump();

  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_le<std::uint32_t>(out, kFormatVersion);
  put_le<std::uint64_t>(out, header.size());
  out.insert(out.end(), header.begin(), header.end());
  for (const auto& [name, values] : archive.reals) {
    for (double v : values) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
  for (const auto& [name, values] : archive.integers) {
    for (std::int64_t v : values) put_le<std::uint64_t>(out, static_cast<std::uint64_t>(v));
  }
  put_le<std::uint64_t>(out, fnv1a64(out));
  return out;
}

Archive decode(std::span<const std::uint8_t> bytes, const std::string& source) {
  if (bytes.size() < sizeof kMagic + 4 + 8 + 8) {
    throw CheckpointError(source + ": truncated checkpoint (" + std::to_string(bytes.size()) +
                          " bytes)");
  }
  Reader reader(bytes, source);
  if (std::memcmp(reader.take(sizeof kMagic).data(), kMagic, sizeof kMagic) != 0) {
    throw CheckpointError(source + ": not an idsgan checkpoint");
  }
  const auto version = reader.get_le<std::uint32_t>();
  if (version != kFormatVersion) {
    throw CheckpointError(source + ": checkpoint format version " + std::to_string(version) +
                          ", expected " + std::to_string(kFormatVersion));
  }
  const auto header_bytes = reader.get_le<std::uint64_t>();
  if (header_bytes > bytes.size()) throw CheckpointError(source + ": truncated checkpoint header");
  const auto header_raw = reader.take(static_cast<std::size_t>(header_bytes));

  json header;
  try {
    header = json::parse(header_raw.begin(), header_raw.end());
  } catch (const json::exception& e) {
    throw CheckpointError(source + ": corrupt checkpoint header: " + e.what());
  }

  Archive archive;
  try {
    archive.header = header.at("meta");
    for (const json& entry : header.at("arrays")) {
      const auto name = entry.at("name").get<std::string>();
      const auto type = entry.at("type").get<std::string>();
      const auto count = entry.at("count").get<std::uint64_t>();
      if (count > (bytes.size() - reader.position()) / 8) {
        throw CheckpointError(source + ": truncated checkpoint payload for '" + name + "'");
      }
      if (type == "f64") {
        auto& values = archive.reals[name];
        values.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i) {
          values.push_back(std::bit_cast<double>(reader.get_le<std::uint64_t>()));
        }
      } else if (type == "i64") {
        auto& values = archive.integers[name];
        values.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i) {
          values.push_back(static_cast<std::int64_t>(reader.get_le<std::uint64_t>()));
        }
      } else {
        throw CheckpointError(source + ": unknown array type '" + type + "'");
      }
    }
  } catch (const json::exception& e) {
    throw CheckpointError(source + ": corrupt checkpoint index: " + e.what());
  }

  const std::size_t body_end = reader.position();
  const auto stored = reader.get_le<std::uint64_t>();
  if (reader.position() != bytes.size()) {
    throw CheckpointError(source + ": trailing bytes after checkpoint");
  }
  if (stored != fnv1a64(bytes.subspan(0, body_end))) {
    throw CheckpointError(source + ": checkpoint checksum mismatch");
  }
  return archive;
}

void save(const Archive& archive, const fs::path& path) {
  const auto bytes = encode(archive);
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

Archive load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return decode(bytes, path.string());
}

}  // namespace idsgan::ckpt
