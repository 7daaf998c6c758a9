#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>

#include "fmtv/errors.hpp"
#include "fmtv/sampler.hpp"

namespace fmtv {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put_le(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  in.read(reinterpret_cast<char*>(bytes), sizeof(T));
  if (!in) throw CapacityError("sample dump truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

constexpr char kMagic[4] = {'F', 'N', 'S', 'D'};

}  // namespace

void write_sample_dump(const std::filesystem::path& path, const SampleBatch& batch) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CapacityError("cannot open " + path.string() + " for writing");
  out.write(kMagic, 4);
  put_le<std::uint32_t>(out, kSampleDumpVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(batch.spec.q));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(batch.spec.n));
  put_le<double>(out, batch.spec.hurst.value());
  put_le<std::uint64_t>(out, batch.replicates.size());
  for (double v : batch.replicates) put_le<double>(out, v);
  if (!out) throw CapacityError("failed writing " + path.string());
}

SampleBatch read_sample_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CapacityError("cannot open sample dump " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw CapacityError(path.string() + " is not a sample dump");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kSampleDumpVersion) throw CapacityError("unsupported sample dump version");
  const auto q = get_le<std::uint32_t>(in);
  const auto n = get_le<std::uint32_t>(in);
  const auto h = get_le<double>(in);
  const auto count = get_le<std::uint64_t>(in);
  SampleBatch batch{VariationSpec::make(static_cast<int>(q), h, n), {}, 0, count};
  batch.replicates.resize(count);
  for (auto& v : batch.replicates) v = get_le<double>(in);
  return batch;
}

void write_sample_csv(const std::filesystem::path& path, const SampleBatch& batch,
                      const std::string& provenance) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw CapacityError("cannot open " + path.string() + " for writing");
  out << "# " << provenance << '\n' << "F\n" << std::setprecision(17);
  for (double v : batch.replicates) out << v << '\n';
  if (!out) throw CapacityError("failed writing " + path.string());
}

SampleBatch read_sample_csv(const std::filesystem::path& path, const VariationSpec& spec) {
  std::ifstream in(path);
  if (!in) throw CapacityError("cannot open sample file " + path.string());
  SampleBatch batch{spec, {}, 0, 0};
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "F") throw CapacityError(path.string() + ": expected header 'F'");
      header = true;
      continue;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc() || ptr != line.data() + line.size() || !std::isfinite(v)) {
      throw CapacityError(path.string() + ": bad value '" + line + "'");
    }
    batch.replicates.push_back(v);
  }
  batch.count = batch.replicates.size();
  return batch;
}

}  // namespace fmtv
