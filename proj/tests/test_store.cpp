#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>

#include "json.hpp"

#include "bellmzi/store.hpp"

using namespace bellmzi;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "bellmzi_store_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

CampaignRecord sample_record() {
  OptimizerConfig cfg;
  cfg.restarts = 6;
  cfg.seed = 17;
  CampaignRecord r;
  r.kind = RecordKind::general;
  r.n_first = 2;
  r.n_last = 3;
  r.config = cfg;
  r.runs = violation_curve(Kind::general, 2, 3, cfg);
  for (const auto& run : r.runs)
    r.eigen.push_back(analyze_settings(DisplacementSequence::real(run.settings.betas),
                                       DisplacementSequence::real(run.settings.gammas)));
  FitData d;
  for (int n = 2; n <= 7; ++n) d.emplace_back(n, 1.3 - 2.2 * std::exp(-0.75 * n));
  r.fit = fit_saturation(d, FitModel::three);
  r.created_at = "2024-01-01T00:00:00Z";
  return r;
}

}  // namespace

TEST_CASE("round trip") {
  const auto r = sample_record();
  const auto path = scratch("round.json");
  save(r, path);
  const auto back = load(path);
  CHECK(back == r);
  CHECK(serialize(back) == serialize(r));
  CHECK(back.runs[1].best_point == r.runs[1].best_point);
  CHECK(back.eigen[0].vector_coherent == r.eigen[0].vector_coherent);
  CHECK(back.fit->covariance == r.fit->covariance);
  CHECK(back.config.seed == 17);

  save(r, path);
  const std::string first = slurp(path);
  save(back, path);
  CHECK(slurp(path) == first);
}

TEST_CASE("non-finite values survive") {
  auto r = sample_record();
  r.runs[0].restart_histogram[0] = std::numeric_limits<double>::quiet_NaN();
  r.runs[0].restart_histogram[1] = std::numeric_limits<double>::infinity();
  r.runs[0].restart_histogram[2] = -std::numeric_limits<double>::infinity();
  const auto back = deserialize(serialize(r));
  CHECK(std::isnan(back.runs[0].restart_histogram[0]));
  CHECK(back.runs[0].restart_histogram[1] == std::numeric_limits<double>::infinity());
  CHECK(back.runs[0].restart_histogram[2] == -std::numeric_limits<double>::infinity());
}

TEST_CASE("checksum ignores the timestamp") {
  auto a = sample_record();
  auto b = a;
  b.created_at = "2030-06-01T12:00:00Z";
  CHECK(record_checksum(a) == record_checksum(b));
  b.runs[0].violation += 1e-15;
  CHECK(record_checksum(a) != record_checksum(b));
}

TEST_CASE("corrupt and mismatched files") {
  const auto r = sample_record();
  const std::string text = serialize(r);
  const auto path = scratch("bad.json");

  write_file_atomic(path, text.substr(0, text.size() / 2));
  CHECK_THROWS_AS(load(path), CorruptFile);

  auto j = nlohmann::json::parse(text);
  j["payload"]["n_last"] = 9;
  write_file_atomic(path, j.dump(1));
  CHECK_THROWS_AS(load(path), CorruptFile);

  j = nlohmann::json::parse(text);
  j["schema_version"] = 2;
  write_file_atomic(path, j.dump(1));
  try {
    load(path);
    FAIL("expected SchemaMismatch");
  } catch (const SchemaMismatch& e) {
    const std::string msg = e.what();
    CHECK(msg.find('2') != std::string::npos);
    CHECK(msg.find('1') != std::string::npos);
  }

  CHECK_THROWS_AS(load(scratch("missing.json")), IoFailure);
}

TEST_CASE("validation and paths") {
  auto r = sample_record();
  r.n_last = 2;
  CHECK_THROWS_AS(r.validate(), InvalidArgument);
  CHECK_THROWS_AS(save(r, scratch("invalid.json")), InvalidArgument);

  const auto good = sample_record();
  ::setenv("BELLMZI_RESULTS_DIR", "/tmp/somewhere", 1);
  CHECK(default_record_path(good) == fs::path("/tmp/somewhere/general/2-3_17.json"));
  ::unsetenv("BELLMZI_RESULTS_DIR");
  CHECK(results_root() == fs::path("results"));

  ::setenv("SOURCE_DATE_EPOCH", "0", 1);
  CHECK(timestamp_now() == "1970-01-01T00:00:00Z");
  ::unsetenv("SOURCE_DATE_EPOCH");

  for (auto k : {RecordKind::general, RecordKind::ecs, RecordKind::tmsv, RecordKind::tmsv_r_scan,
                 RecordKind::eigvec, RecordKind::fit})
    CHECK(record_kind_from_string(to_string(k)) == k);
  CHECK(record_kind_for(Kind::ecs) == RecordKind::ecs);
}
