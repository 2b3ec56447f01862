#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scalekit/fit.hpp"
#include "scalekit/laws.hpp"

namespace scalekit {

struct IngestMeta {
  bool billions = false;  // file carried "# units: billions"
  std::string path;
};

// CSV with a mandatory header; '#' lines are comments. A "# units: billions"
// line scales n_params and d_tokens by 1e9.
std::vector<RunRecord> ingest(const std::string& path, IngestMeta* meta = nullptr);
std::vector<RunRecord> parse_runfile(const std::string& text, const std::string& name,
                                     IngestMeta* meta = nullptr);

// Raw counts, full-precision numerics; optional columns appear when any
// record carries them.
std::string format_runfile(const std::vector<RunRecord>& records);
void write_runfile(const std::string& path, const std::vector<RunRecord>& records);

struct LawProvenance {
  std::string source;
  std::string fit_config_digest = "none";
  std::int64_t record_count = 0;
  double mre_permille = 0;
};

struct LawFile {
  LawHandle law;
  LawProvenance provenance;
};

LawFile read_lawfile(const std::string& path);
LawFile parse_lawfile(const std::string& text, const std::string& name);
std::string format_lawfile(const LawFile& file);
void write_lawfile(const std::string& path, const LawFile& file);

enum class SeriesFormat { csv, json };

struct Series {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// CSV renders with 9 significant digits; JSON is an array of objects.
// Byte-deterministic for identical inputs.
std::string format_series(const Series& series, SeriesFormat format);
void emit_series(const Series& series, SeriesFormat format, const std::string& path);

}  // namespace scalekit
