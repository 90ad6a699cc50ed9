#include "bellmzi/store.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include <zlib.h>

#include "json.hpp"

namespace bellmzi {

using nlohmann::json;

namespace {

json encode_real(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double decode_real(const json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  throw CorruptFile("bad real value '" + s + "'");
}

json encode_reals(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(encode_real(x));
  return out;
}

std::vector<double> decode_reals(const json& j) {
  std::vector<double> out;
  for (const auto& x : j) out.push_back(decode_real(x));
  return out;
}

json encode_vector(const RVector& v) {
  return encode_reals(std::vector<double>(v.data(), v.data() + v.size()));
}

RVector decode_vector(const json& j) {
  const auto v = decode_reals(j);
  return Eigen::Map<const RVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json encode_complex_vector(const CVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out.push_back(json::array({encode_real(v(i).real()), encode_real(v(i).imag())}));
  return out;
}

CVector decode_complex_vector(const json& j) {
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = Complex(decode_real(j[i].at(0)), decode_real(j[i].at(1)));
  return v;
}

json encode_matrix(const RMatrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(encode_vector(m.row(r).transpose()));
  return out;
}

RMatrix decode_matrix(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
  RMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) m.row(r) = decode_vector(j[static_cast<std::size_t>(r)]).transpose();
  return m;
}

json encode_config(const OptimizerConfig& c) {
  json box = json::array();
  for (const auto& [lo, hi] : c.initial_box) box.push_back(json::array({encode_real(lo), encode_real(hi)}));
  return {{"restarts", c.restarts},
          {"seed", c.seed},
          {"max_evaluations", c.max_evaluations},
          {"refine_evaluations", c.refine_evaluations},
          {"x_tolerance", encode_real(c.x_tolerance)},
          {"f_tolerance", encode_real(c.f_tolerance)},
          {"initial_box", box}};
}

OptimizerConfig decode_config(const json& j) {
  OptimizerConfig c;
  c.restarts = j.at("restarts").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.max_evaluations = j.at("max_evaluations").get<long>();
  c.refine_evaluations = j.at("refine_evaluations").get<long>();
  c.x_tolerance = decode_real(j.at("x_tolerance"));
  c.f_tolerance = decode_real(j.at("f_tolerance"));
  for (const auto& b : j.at("initial_box")) c.initial_box.emplace_back(decode_real(b.at(0)), decode_real(b.at(1)));
  return c;
}

json encode_decoded(const Decoded& d) {
  return {{"betas", encode_reals(d.betas)},
          {"gammas", encode_reals(d.gammas)},
          {"alpha", encode_real(d.alpha)},
          {"a", encode_real(d.a)},
          {"r", encode_real(d.r)}};
}

Decoded decode_decoded(const json& j) {
  Decoded d;
  d.betas = decode_reals(j.at("betas"));
  d.gammas = decode_reals(j.at("gammas"));
  d.alpha = decode_real(j.at("alpha"));
  d.a = decode_real(j.at("a"));
  d.r = decode_real(j.at("r"));
  return d;
}

json encode_run(const OptimizationRun& r) {
  json j = {{"kind", to_string(r.kind)},
            {"n", r.n},
            {"fixed_r", r.fixed_r ? encode_real(*r.fixed_r) : json(nullptr)},
            {"parametrization", r.parametrization},
            {"stage", to_string(r.stage)},
            {"best_value", encode_real(r.best_value)},
            {"best_point", encode_vector(r.best_point)},
            {"settings", encode_decoded(r.settings)},
            {"violation", encode_real(r.violation)},
            {"restart_histogram", encode_reals(r.restart_histogram)},
            {"evaluations", r.evaluations},
            {"budget_exhausted", r.budget_exhausted},
            {"failure", r.failure ? json(*r.failure) : json(nullptr)}};
  if (r.first_stage)
    j["first_stage"] = {{"parametrization", r.first_stage->parametrization},
                        {"best_value", encode_real(r.first_stage->best_value)},
                        {"best_point", encode_vector(r.first_stage->best_point)},
                        {"evaluations", r.first_stage->evaluations}};
  else
    j["first_stage"] = nullptr;
  return j;
}

OptimizationRun decode_run(const json& j) {
  OptimizationRun r;
  r.kind = kind_from_string(j.at("kind").get<std::string>());
  r.n = j.at("n").get<int>();
  if (!j.at("fixed_r").is_null()) r.fixed_r = decode_real(j.at("fixed_r"));
  r.parametrization = j.at("parametrization").get<std::string>();
  r.stage = stage_from_string(j.at("stage").get<std::string>());
  r.best_value = decode_real(j.at("best_value"));
  r.best_point = decode_vector(j.at("best_point"));
  r.settings = decode_decoded(j.at("settings"));
  r.violation = decode_real(j.at("violation"));
  r.restart_histogram = decode_reals(j.at("restart_histogram"));
  r.evaluations = j.at("evaluations").get<long>();
  r.budget_exhausted = j.at("budget_exhausted").get<bool>();
  if (!j.at("failure").is_null()) r.failure = j.at("failure").get<std::string>();
  if (const auto& f = j.at("first_stage"); !f.is_null())
    r.first_stage = StageRecord{f.at("parametrization").get<std::string>(), decode_real(f.at("best_value")),
                                decode_vector(f.at("best_point")), f.at("evaluations").get<long>()};
  return r;
}

json encode_eigen(const ViolationEigenpair& e) {
  return {{"n", e.n},
          {"value", encode_real(e.value)},
          {"violation", encode_real(e.violation)},
          {"vector_orthonormal", encode_complex_vector(e.vector_orthonormal)},
          {"vector_coherent", encode_complex_vector(e.vector_coherent)},
          {"schmidt", encode_reals(e.schmidt)}};
}

ViolationEigenpair decode_eigen(const json& j) {
  ViolationEigenpair e;
  e.n = j.at("n").get<int>();
  e.value = decode_real(j.at("value"));
  e.violation = decode_real(j.at("violation"));
  e.vector_orthonormal = decode_complex_vector(j.at("vector_orthonormal"));
  e.vector_coherent = decode_complex_vector(j.at("vector_coherent"));
  e.schmidt = decode_reals(j.at("schmidt"));
  return e;
}

json encode_fit(const FitResult& f) {
  return {{"model", to_string(f.model)},
          {"names", f.names},
          {"values", encode_reals(f.values)},
          {"free_names", f.free_names},
          {"covariance", encode_matrix(f.covariance)},
          {"residual_norm", encode_real(f.residual_norm)},
          {"iterations", f.iterations},
          {"points", f.points}};
}

FitResult decode_fit(const json& j) {
  FitResult f;
  f.model = fit_model_from_string(j.at("model").get<std::string>());
  f.names = j.at("names").get<std::vector<std::string>>();
  f.values = decode_reals(j.at("values"));
  f.free_names = j.at("free_names").get<std::vector<std::string>>();
  f.covariance = decode_matrix(j.at("covariance"));
  f.residual_norm = decode_real(j.at("residual_norm"));
  f.iterations = j.at("iterations").get<int>();
  f.points = j.at("points").get<std::size_t>();
  return f;
}

json encode_payload(const CampaignRecord& r) {
  json runs = json::array();
  for (const auto& run : r.runs) runs.push_back(encode_run(run));
  json eigen = json::array();
  for (const auto& e : r.eigen) eigen.push_back(encode_eigen(e));
  return {{"kind", to_string(r.kind)},
          {"n_first", r.n_first},
          {"n_last", r.n_last},
          {"config", encode_config(r.config)},
          {"runs", runs},
          {"eigen", eigen},
          {"fit", r.fit ? encode_fit(*r.fit) : json(nullptr)},
          {"source", r.source},
          {"tool_version", r.tool_version}};
}

std::string crc32_hex(const std::string& text) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(text.data()), static_cast<uInt>(text.size()));
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08lx", static_cast<unsigned long>(crc));
  return buf;
}

}  // namespace

std::string to_string(RecordKind k) {
  switch (k) {
    case RecordKind::general: return "general";
    case RecordKind::ecs: return "ecs";
    case RecordKind::tmsv: return "tmsv";
    case RecordKind::tmsv_r_scan: return "tmsv_r_scan";
    case RecordKind::eigvec: return "eigvec";
    case RecordKind::fit: return "fit";
  }
  return "unknown";
}

RecordKind record_kind_from_string(const std::string& s) {
  for (auto k : {RecordKind::general, RecordKind::ecs, RecordKind::tmsv, RecordKind::tmsv_r_scan,
                 RecordKind::eigvec, RecordKind::fit})
    if (to_string(k) == s) return k;
  throw InvalidArgument("unknown record kind '" + s + "'");
}

RecordKind record_kind_for(Kind k) {
  switch (k) {
    case Kind::general: return RecordKind::general;
    case Kind::ecs: return RecordKind::ecs;
    case Kind::tmsv: return RecordKind::tmsv;
  }
  throw InvalidArgument("unknown kind");
}

void CampaignRecord::validate() const {
  if (n_first > n_last) throw InvalidArgument("record n range is empty");
  for (const auto& run : runs)
    if (run.n < n_first || run.n > n_last)
      throw InvalidArgument("run with n=" + std::to_string(run.n) + " outside record range [" +
                            std::to_string(n_first) + ", " + std::to_string(n_last) + "]");
}

std::string timestamp_now() {
  std::time_t t;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch)
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  else
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string record_checksum(const CampaignRecord& record) {
  return crc32_hex(encode_payload(record).dump());
}

std::string serialize(const CampaignRecord& record) {
  record.validate();
  const json payload = encode_payload(record);
  const json doc = {{"schema_version", record.schema_version},
                    {"created_at", record.created_at},
                    {"payload", payload},
                    {"checksum", crc32_hex(payload.dump())}};
  return doc.dump(1) + "\n";
}

CampaignRecord deserialize(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw CorruptFile(std::string("unparseable record: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("schema_version") || !doc["schema_version"].is_number_integer())
    throw CorruptFile("record has no integer schema_version");
  const int version = doc["schema_version"].get<int>();
  if (version != kSchemaVersion)
    throw SchemaMismatch("record has schema version " + std::to_string(version) +
                         ", this build reads version " + std::to_string(kSchemaVersion));
  try {
    const json& payload = doc.at("payload");
    const std::string stored = doc.at("checksum").get<std::string>();
    const std::string actual = crc32_hex(payload.dump());
    if (stored != actual)
      throw CorruptFile("checksum mismatch: stored " + stored + ", computed " + actual);
    CampaignRecord r;
    r.schema_version = version;
    r.created_at = doc.at("created_at").get<std::string>();
    r.kind = record_kind_from_string(payload.at("kind").get<std::string>());
    r.n_first = payload.at("n_first").get<int>();
    r.n_last = payload.at("n_last").get<int>();
    r.config = decode_config(payload.at("config"));
    for (const auto& run : payload.at("runs")) r.runs.push_back(decode_run(run));
    for (const auto& e : payload.at("eigen")) r.eigen.push_back(decode_eigen(e));
    if (!payload.at("fit").is_null()) r.fit = decode_fit(payload.at("fit"));
    r.source = payload.at("source").get<std::string>();
    r.tool_version = payload.at("tool_version").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw CorruptFile(std::string("malformed record: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw CorruptFile(std::string("malformed record: ") + e.what());
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoFailure("cannot create " + path.parent_path().string() + ": " + ec.message());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open " + tmp.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw IoFailure("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoFailure("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

void save(const CampaignRecord& record, const std::filesystem::path& path) {
  write_file_atomic(path, serialize(record));
}

CampaignRecord load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

std::filesystem::path results_root() {
  if (const char* dir = std::getenv("BELLMZI_RESULTS_DIR"); dir && *dir) return dir;
  return "results";
}

std::filesystem::path default_record_path(const CampaignRecord& record) {
  const std::string range = record.n_first == record.n_last
                                ? std::to_string(record.n_first)
                                : std::to_string(record.n_first) + "-" + std::to_string(record.n_last);
  return results_root() / to_string(record.kind) /
         (range + "_" + std::to_string(record.config.seed) + ".json");
}

bool operator==(const CampaignRecord& a, const CampaignRecord& b) {
  return a.schema_version == b.schema_version && a.created_at == b.created_at &&
         encode_payload(a).dump() == encode_payload(b).dump();
}

}  // namespace bellmzi
