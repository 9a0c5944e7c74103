#pragma once

#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "critball/asympt/verify.hpp"
#include "critball/core.hpp"
#include "critball/io/config.hpp"

namespace critball::io {

inline constexpr const char* tool_version = "0.1.0";

// ------------------------------------------------------------------ provenance

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256: digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

/// Hash of the fields that determine a rung's record: domain, coefficients,
/// solver tolerances, lmax and probes. The ladder is excluded so a ladder can
/// be extended and resumed; output paths, verification thresholds and the
/// bubble-test section do not affect records.
inline std::string config_hash(const RunConfig& c) {
  json j = to_json(c);
  for (const auto* k : {"eps_ladder", "output", "verify", "bubbletest"}) j.erase(k);
  return sha256_hex(j.dump());
}

/// UTC timestamp in ISO 8601; SOURCE_DATE_EPOCH (seconds) overrides the clock.
inline std::string timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* s = std::getenv("SOURCE_DATE_EPOCH"); s && *s) {
    char* end = nullptr;
    const long long v = std::strtoll(s, &end, 10);
    if (end && *end == '\0' && v >= 0) t = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline json provenance(const std::string& hash) {
  return {{"config_hash", hash}, {"tool_version", tool_version}, {"created", timestamp()}};
}

// ------------------------------------------------------------------ records

#define CRITBALL_RECORD_FIELDS(X)                                                                                   \
  X(eps) X(M) X(lambda_hat) X(lambda) X(alpha) X(eps_lambda) X(fit_residual) X(beta) X(gamma) X(grad_w) X(grad_r) \
  X(sup_w) X(sup_w_ratio) X(farfield_error) X(orth) X(reconstruction) X(phi_route) X(pde_residual)              \
  X(energy_residual) X(pohozaev_residual) X(greens_residual) X(sobolev_quotient) X(sobolev_quotient_pure)

inline json to_json(const asympt::SweepRecord& r) {
  json j;
#define CRITBALL_PUT(f) j[#f] = r.f;
  CRITBALL_RECORD_FIELDS(CRITBALL_PUT)
#undef CRITBALL_PUT
  return j;
}

inline asympt::SweepRecord record_from_json(const json& j) {
  asympt::SweepRecord r;
#define CRITBALL_GET(f)                                                                       \
  if (!j.contains(#f) || !j[#f].is_number()) throw ValidationError("record." #f, "missing or not a number"); \
  r.f = j[#f].get<double>();
  CRITBALL_RECORD_FIELDS(CRITBALL_GET)
#undef CRITBALL_GET
  return r;
}

/// Name of the most derived library error type, for failure lines.
inline std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const StiffnessError*>(&e)) return "StiffnessError";
  if (dynamic_cast<const ConvergenceError*>(&e)) return "ConvergenceError";
  if (dynamic_cast<const NoSignChangeError*>(&e)) return "NoSignChangeError";
  if (dynamic_cast<const RegimeError*>(&e)) return "RegimeError";
  if (dynamic_cast<const ValidationError*>(&e)) return "ValidationError";
  if (dynamic_cast<const InsufficientDataError*>(&e)) return "InsufficientDataError";
  if (dynamic_cast<const DivergentMomentError*>(&e)) return "DivergentMomentError";
  if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
  if (dynamic_cast<const OverflowError*>(&e)) return "OverflowError";
  if (dynamic_cast<const ResonanceError*>(&e)) return "ResonanceError";
  if (dynamic_cast<const Error*>(&e)) return "Error";
  return "exception";
}

/// One JSON-lines entry: a successful rung or a recorded failure.
struct ResultLine {
  double eps = 0.0;
  bool ok = false;
  std::optional<asympt::SweepRecord> record;
  std::string error_kind, error_message;
  std::string config_hash, tool_version, created;
  std::string text;  // the serialised line, verbatim
};

inline std::string ok_line(const asympt::SweepRecord& r, const std::string& hash) {
  return json{{"status", "ok"}, {"eps", r.eps}, {"record", to_json(r)}, {"provenance", provenance(hash)}}.dump();
}

inline std::string failure_line(double eps, const std::exception& e, const std::string& hash) {
  return json{{"status", "failed"},
              {"eps", eps},
              {"error", {{"kind", error_kind(e)}, {"message", e.what()}}},
              {"provenance", provenance(hash)}}
      .dump();
}

inline ResultLine parse_line(const std::string& text) {
  const json j = json::parse(text);
  ResultLine l;
  l.text = text;
  l.eps = j.at("eps").get<double>();
  const auto& p = j.at("provenance");
  l.config_hash = p.at("config_hash").get<std::string>();
  l.tool_version = p.at("tool_version").get<std::string>();
  l.created = p.at("created").get<std::string>();
  const auto status = j.at("status").get<std::string>();
  if (status == "ok") {
    l.ok = true;
    l.record = record_from_json(j.at("record"));
    if (l.record->eps != l.eps) throw ValidationError("record.eps", "differs from the line's eps");
  } else if (status == "failed") {
    l.error_kind = j.at("error").at("kind").get<std::string>();
    l.error_message = j.at("error").at("message").get<std::string>();
  } else {
    throw ValidationError("status", "unknown status '" + status + "'");
  }
  return l;
}

struct RecordFile {
  std::vector<ResultLine> lines;
  std::vector<int> malformed;  // 1-based line numbers that did not parse (e.g. a truncated tail)
};

inline RecordFile read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("records", "cannot open records file '" + path + "'");
  RecordFile f;
  std::string s;
  int n = 0;
  while (std::getline(in, s)) {
    ++n;
    if (s.empty()) continue;
    try {
      f.lines.push_back(parse_line(s));
    } catch (const std::exception&) {
      f.malformed.push_back(n);
    }
  }
  return f;
}

/// Successful records produced by the config with hash `hash`, in file order.
/// Lines from another config are an error: a report must not mix sources.
inline std::vector<asympt::SweepRecord> records_for(const RecordFile& f, const std::string& hash) {
  std::vector<asympt::SweepRecord> out;
  for (std::size_t i = 0; i < f.lines.size(); ++i) {
    const auto& l = f.lines[i];
    if (l.config_hash != hash)
      throw ValidationError("records", "entry for eps = " + std::to_string(l.eps) + " was produced by a different config (hash " +
                                           l.config_hash.substr(0, 12) + ")");
    if (l.ok) out.push_back(*l.record);
  }
  return out;
}

}  // namespace critball::io
