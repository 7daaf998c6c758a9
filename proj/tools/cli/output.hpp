#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "fmtv/diagrams.hpp"
#include "fmtv/distances.hpp"
#include "fmtv/rates.hpp"
#include "json.hpp"

namespace fmtv::cli {

/// Run identity stamped into every output file.
struct Provenance {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;

  [[nodiscard]] std::string hash_hex() const;
};

/// First line of every CSV: "# fmtv <kind> v<version> config_hash=<hex> seed=<u64>".
std::string csv_preamble(const std::string& kind, int version, const Provenance& p);

/// %.17g; "nan", "inf", "-inf" for non-finite values.
std::string fmt(double v);

/// Writes via a sibling temporary and rename, so readers never see a torn file.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Stable file stem for a spec, e.g. "q2_H0.5_n1000".
std::string spec_stem(int q, double hurst, std::size_t n);

nlohmann::ordered_json to_json(const VariationSpec& spec);
nlohmann::ordered_json to_json(const CumulantReport& report);
nlohmann::ordered_json to_json(const DistanceReport& report);
nlohmann::ordered_json to_json(const SpecResult& result);
nlohmann::ordered_json to_json(const RateFit& fit);

inline constexpr int kCumulantsCsvVersion = 1;
inline constexpr int kDistanceCsvVersion = 1;
inline constexpr int kRatesCsvVersion = 1;
inline constexpr int kSandwichCsvVersion = 1;

std::string cumulants_csv_header();
std::string cumulants_csv_row(const CumulantReport& r, const std::string& source);

std::string distance_csv_header();
std::string distance_csv_row(const DistanceReport& r);

std::string rates_csv_header();
std::string rates_csv_row(const RateFit& fit, const GridSummary& summary);

std::string sandwich_csv_header();
std::string sandwich_csv_row(const SpecResult& result);

}  // namespace fmtv::cli
