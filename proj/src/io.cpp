#include "scalekit/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "scalekit/errors.hpp"

namespace scalekit {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_number(const std::string& cell, const std::string& where) {
  const std::string t = trim(cell);
  if (t.empty()) throw IoError(where + ": empty numeric field");
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || !std::isfinite(v))
    throw IoError(where + ": cannot parse \"" + t + "\" as a number");
  return v;
}

// shortest round-trip rendering
std::string full_precision(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string nine_digits(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

const std::vector<std::string> kRunColumns = {"n_params", "d_tokens", "loss",
                                              "mixture",  "gbz",      "gpus", "mbz"};

void require_field(const ordered_json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw IoError(where + ": missing field \"" + key + "\"");
}

void reject_unknown(const ordered_json& obj, const std::vector<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool ok = false;
    for (const auto& a : allowed) ok |= key == a;
    if (!ok) throw IoError(where + ": unknown field \"" + key + "\"");
  }
}

double number_field(const ordered_json& obj, const std::string& key, const std::string& where) {
  require_field(obj, key, where);
  if (!obj[key].is_number()) throw IoError(where + ": field \"" + key + "\" must be a number");
  return obj[key].get<double>();
}

}  // namespace

std::vector<RunRecord> parse_runfile(const std::string& text, const std::string& name,
                                     IngestMeta* meta) {
  IngestMeta local;
  local.path = name;

  std::vector<std::string> lines;
  {
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) lines.push_back(line);
  }

  std::vector<std::string> header;
  std::vector<std::pair<size_t, std::vector<std::string>>> rows;  // line number, cells
  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string line = trim(lines[i]);
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (trim(line.substr(1)) == "units: billions") local.billions = true;
      continue;
    }
    if (header.empty())
      header = split_csv(line);
    else
      rows.emplace_back(i + 1, split_csv(line));
  }
  if (header.empty()) throw IoError(name + ": missing header row");

  int idx[7];
  std::fill(std::begin(idx), std::end(idx), -1);
  for (size_t c = 0; c < header.size(); ++c) {
    bool known = false;
    for (size_t k = 0; k < kRunColumns.size(); ++k) {
      if (header[c] == kRunColumns[k]) {
        if (idx[k] >= 0) throw IoError(name + ": duplicate column \"" + header[c] + "\"");
        idx[k] = static_cast<int>(c);
        known = true;
      }
    }
    if (!known) throw IoError(name + ": unknown column \"" + header[c] + "\"");
  }
  for (int k = 0; k < 3; ++k)
    if (idx[k] < 0) throw IoError(name + ": missing required column \"" + kRunColumns[k] + "\"");
  if (rows.empty()) throw IoError(name + ": no data rows");

  const double scale = local.billions ? 1e9 : 1.0;
  std::vector<RunRecord> records;
  records.reserve(rows.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    const auto& [line_no, cells] = rows[r];
    const std::string where =
        name + ": row " + std::to_string(r + 1) + " (line " + std::to_string(line_no) + ")";
    if (cells.size() != header.size())
      throw IoError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                    std::to_string(cells.size()));
    RunRecord rec;
    rec.n_params = parse_number(cells[static_cast<size_t>(idx[0])], where + ", column n_params") * scale;
    rec.d_tokens = parse_number(cells[static_cast<size_t>(idx[1])], where + ", column d_tokens") * scale;
    rec.loss = parse_number(cells[static_cast<size_t>(idx[2])], where + ", column loss");
    if (!(rec.n_params >= 1))
      throw IoError(where + ", column n_params: must be a positive count");
    if (!(rec.d_tokens >= 1))
      throw IoError(where + ", column d_tokens: must be a positive count");
    if (!(rec.loss > 0)) throw IoError(where + ", column loss: must be positive");
    if (idx[3] >= 0) rec.mixture = cells[static_cast<size_t>(idx[3])];
    for (int k = 4; k < 7; ++k) {
      if (idx[k] < 0) continue;
      const std::string& cell = cells[static_cast<size_t>(idx[k])];
      if (cell.empty()) continue;
      const double v = parse_number(cell, where + ", column " + kRunColumns[static_cast<size_t>(k)]);
      if (!(v > 0))
        throw IoError(where + ", column " + kRunColumns[static_cast<size_t>(k)] +
                      ": must be positive");
      rec.meta[kRunColumns[static_cast<size_t>(k)]] = cell;
    }
    records.push_back(std::move(rec));
  }
  if (meta) *meta = local;
  return records;
}

std::vector<RunRecord> ingest(const std::string& path, IngestMeta* meta) {
  return parse_runfile(read_text(path), path, meta);
}

std::string format_runfile(const std::vector<RunRecord>& records) {
  if (records.empty()) throw ArgumentError("format_runfile: no records");
  bool has_mixture = false, has_gbz = false, has_gpus = false, has_mbz = false;
  for (const auto& r : records) {
    has_mixture |= !r.mixture.empty();
    has_gbz |= r.meta.count("gbz") > 0;
    has_gpus |= r.meta.count("gpus") > 0;
    has_mbz |= r.meta.count("mbz") > 0;
  }
  std::string out = "n_params,d_tokens,loss";
  if (has_mixture) out += ",mixture";
  if (has_gbz) out += ",gbz";
  if (has_gpus) out += ",gpus";
  if (has_mbz) out += ",mbz";
  out += "\n";
  for (const auto& r : records) {
    out += full_precision(r.n_params) + "," + full_precision(r.d_tokens) + "," +
           full_precision(r.loss);
    if (has_mixture) out += "," + r.mixture;
    for (const auto& [flag, key] :
         {std::pair{has_gbz, "gbz"}, std::pair{has_gpus, "gpus"}, std::pair{has_mbz, "mbz"}}) {
      if (!flag) continue;
      const auto it = r.meta.find(key);
      out += ",";
      if (it != r.meta.end()) out += it->second;
    }
    out += "\n";
  }
  return out;
}

void write_runfile(const std::string& path, const std::vector<RunRecord>& records) {
  write_text(path, format_runfile(records));
}

LawFile parse_lawfile(const std::string& text, const std::string& name) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(name + ": " + e.what());
  }
  if (!doc.is_object()) throw IoError(name + ": top level must be an object");
  reject_unknown(doc, {"format_version", "family", "coefficients", "provenance"}, name);
  require_field(doc, "format_version", name);
  if (!doc["format_version"].is_number_integer() || doc["format_version"].get<int>() != 1)
    throw IoError(name + ": unsupported format_version (expected 1)");
  require_field(doc, "family", name);
  if (!doc["family"].is_string()) throw IoError(name + ": family must be a string");
  const std::string fam = doc["family"].get<std::string>();
  if (fam != "chinchilla" && fam != "farseer")
    throw IoError(name + ": unknown family \"" + fam + "\"");
  require_field(doc, "coefficients", name);
  require_field(doc, "provenance", name);
  const ordered_json& coef = doc["coefficients"];
  const ordered_json& prov = doc["provenance"];
  if (!coef.is_object()) throw IoError(name + ": coefficients must be an object");
  if (!prov.is_object()) throw IoError(name + ": provenance must be an object");

  LawFile out;
  const std::string cwhere = name + ": coefficients";
  if (fam == "chinchilla") {
    reject_unknown(coef, {"e_irr", "coef_a", "exp_a", "coef_b", "exp_b"}, cwhere);
    ChinchillaLaw law;
    law.e_irr = number_field(coef, "e_irr", cwhere);
    law.coef_a = number_field(coef, "coef_a", cwhere);
    law.exp_a = number_field(coef, "exp_a", cwhere);
    law.coef_b = number_field(coef, "coef_b", cwhere);
    law.exp_b = number_field(coef, "exp_b", cwhere);
    out.law.params = law;
  } else {
    reject_unknown(coef,
                   {"t1_s", "t1_q", "t1_S", "t2_B", "t2_b", "t2_Q", "ex_A", "ex_a", "ex_E"},
                   cwhere);
    FarseerLaw law;
    law.t1_s = number_field(coef, "t1_s", cwhere);
    law.t1_q = number_field(coef, "t1_q", cwhere);
    law.t1_S = number_field(coef, "t1_S", cwhere);
    law.t2_B = number_field(coef, "t2_B", cwhere);
    law.t2_b = number_field(coef, "t2_b", cwhere);
    law.t2_Q = number_field(coef, "t2_Q", cwhere);
    law.ex_A = number_field(coef, "ex_A", cwhere);
    law.ex_a = number_field(coef, "ex_a", cwhere);
    law.ex_E = number_field(coef, "ex_E", cwhere);
    out.law.params = law;
  }

  const std::string pwhere = name + ": provenance";
  reject_unknown(prov, {"source", "fit_config_digest", "record_count", "mre_permille"}, pwhere);
  require_field(prov, "source", pwhere);
  require_field(prov, "fit_config_digest", pwhere);
  if (!prov["source"].is_string() || !prov["fit_config_digest"].is_string())
    throw IoError(pwhere + ": source and fit_config_digest must be strings");
  out.provenance.source = prov["source"].get<std::string>();
  out.provenance.fit_config_digest = prov["fit_config_digest"].get<std::string>();
  require_field(prov, "record_count", pwhere);
  if (!prov["record_count"].is_number_integer() || prov["record_count"].get<std::int64_t>() < 0)
    throw IoError(pwhere + ": record_count must be a nonnegative integer");
  out.provenance.record_count = prov["record_count"].get<std::int64_t>();
  out.provenance.mre_permille = number_field(prov, "mre_permille", pwhere);
  if (out.provenance.mre_permille < 0)
    throw IoError(pwhere + ": mre_permille must be nonnegative");
  out.law.provenance = out.provenance.source;
  return out;
}

LawFile read_lawfile(const std::string& path) { return parse_lawfile(read_text(path), path); }

std::string format_lawfile(const LawFile& file) {
  ordered_json doc;
  doc["format_version"] = 1;
  doc["family"] = family_name(file.law.family());
  ordered_json coef;
  if (file.law.family() == LawFamily::chinchilla) {
    const auto& c = file.law.chinchilla();
    coef["e_irr"] = c.e_irr;
    coef["coef_a"] = c.coef_a;
    coef["exp_a"] = c.exp_a;
    coef["coef_b"] = c.coef_b;
    coef["exp_b"] = c.exp_b;
  } else {
    const auto& f = file.law.farseer();
    coef["t1_s"] = f.t1_s;
    coef["t1_q"] = f.t1_q;
    coef["t1_S"] = f.t1_S;
    coef["t2_B"] = f.t2_B;
    coef["t2_b"] = f.t2_b;
    coef["t2_Q"] = f.t2_Q;
    coef["ex_A"] = f.ex_A;
    coef["ex_a"] = f.ex_a;
    coef["ex_E"] = f.ex_E;
  }
  doc["coefficients"] = coef;
  ordered_json prov;
  prov["source"] = file.provenance.source;
  prov["fit_config_digest"] = file.provenance.fit_config_digest;
  prov["record_count"] = file.provenance.record_count;
  prov["mre_permille"] = file.provenance.mre_permille;
  doc["provenance"] = prov;
  return doc.dump(2) + "\n";
}

void write_lawfile(const std::string& path, const LawFile& file) {
  write_text(path, format_lawfile(file));
}

std::string format_series(const Series& series, SeriesFormat format) {
  if (series.columns.empty() || series.rows.empty())
    throw ArgumentError("format_series: series must be non-empty");
  for (const auto& row : series.rows)
    if (row.size() != series.columns.size())
      throw ArgumentError("format_series: row width does not match column count");

  if (format == SeriesFormat::csv) {
    std::string out;
    for (size_t c = 0; c < series.columns.size(); ++c)
      out += (c ? "," : "") + series.columns[c];
    out += "\n";
    for (const auto& row : series.rows) {
      for (size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + nine_digits(row[c]);
      out += "\n";
    }
    return out;
  }
  ordered_json arr = ordered_json::array();
  for (const auto& row : series.rows) {
    ordered_json obj;
    for (size_t c = 0; c < row.size(); ++c) obj[series.columns[c]] = row[c];
    arr.push_back(obj);
  }
  return arr.dump(2) + "\n";
}

void emit_series(const Series& series, SeriesFormat format, const std::string& path) {
  write_text(path, format_series(series, format));
}

}  // namespace scalekit
