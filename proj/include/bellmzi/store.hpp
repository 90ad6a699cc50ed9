#pragma once

// Versioned JSON persistence of optimization campaigns.
//
// File layout:
//   { "checksum": "<crc32 hex>", "created_at": "...", "payload": {...},
//     "schema_version": 1 }
// The checksum covers the compact dump of "payload" (keys sorted), which holds
// everything except the timestamp, so identical campaigns share a checksum.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bellmzi/optimize.hpp"
#include "bellmzi/regression.hpp"
#include "bellmzi/spectral.hpp"

namespace bellmzi {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "1.0.0";

class SchemaMismatch : public Error {
 public:
  using Error::Error;
};

class CorruptFile : public Error {
 public:
  using Error::Error;
};

class IoFailure : public Error {
 public:
  using Error::Error;
};

enum class RecordKind { general, ecs, tmsv, tmsv_r_scan, eigvec, fit };

std::string to_string(RecordKind k);
RecordKind record_kind_from_string(const std::string& s);  // throws InvalidArgument
RecordKind record_kind_for(Kind k);

struct CampaignRecord {
  int schema_version = kSchemaVersion;
  RecordKind kind = RecordKind::general;
  int n_first = 0;
  int n_last = 0;
  OptimizerConfig config;
  std::vector<OptimizationRun> runs;
  std::vector<ViolationEigenpair> eigen;
  std::optional<FitResult> fit;
  std::string source;  // record a fit or analysis was derived from, if any
  std::string created_at;
  std::string tool_version = kToolVersion;

  /// Throws InvalidArgument when a run lies outside [n_first, n_last].
  void validate() const;
};

/// ISO-8601 UTC time from SOURCE_DATE_EPOCH when set, else the current time.
std::string timestamp_now();

/// Canonical text of a record; save writes exactly these bytes.
std::string serialize(const CampaignRecord& record);
CampaignRecord deserialize(const std::string& text);

/// Checksum of the record's payload, as stored in the file.
std::string record_checksum(const CampaignRecord& record);

/// Atomic write: a temporary file in the target directory renamed over the
/// destination. Creates parent directories.
void save(const CampaignRecord& record, const std::filesystem::path& path);
CampaignRecord load(const std::filesystem::path& path);

/// Writes `text` to a temporary file beside `path` and renames it over
/// `path`. Creates parent directories. Throws IoFailure.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

/// Results root: $BELLMZI_RESULTS_DIR or "results".
std::filesystem::path results_root();
/// <root>/<kind>/<n or first-last>_<seed>.json
std::filesystem::path default_record_path(const CampaignRecord& record);

/// Equality of canonical serializations. Serialization is lossless, so this
/// is field-by-field equality with floating-point values compared exactly.
bool operator==(const CampaignRecord& a, const CampaignRecord& b);

}  // namespace bellmzi
