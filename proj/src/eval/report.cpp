#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "fuzzfeed/eval/eval.hpp"

namespace fuzzfeed::eval {

using nlohmann::json;

ReportError::ReportError(Kind kind, std::string message) : std::runtime_error(std::move(message)), kind_(kind) {}

namespace {

constexpr const char* kSummaryHeader =
    "configuration,benchmark,n_programs,correct_min,correct_max,correct_avg,correct_avg_pct,"
    "fg_usage_min,fg_usage_max,fg_usage_avg,fg_success_min,fg_success_max,fg_success_avg";
constexpr const char* kDetailHeader =
    "configuration,benchmark,iteration,program_id,outcome,fg_used,correct,cycles,llm_calls";

std::string cell(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char ch = text[i];
    if (quoted) {
      if (ch == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"') {
      quoted = any = true;
    } else if (ch == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (ch == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (ch != '\r') {
      field += ch;
      any = true;
    }
  }
  if (quoted) throw ReportError(ReportError::Kind::Parse, "unterminated quoted CSV field");
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::uint64_t to_u64(const std::string& s, const char* what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || s[0] == '-') {
    throw ReportError(ReportError::Kind::Parse, fmt::format("bad {} '{}'", what, s));
  }
  return v;
}

// "16.6" -> 1660
std::int64_t to_centi(const std::string& s, const char* what) {
  auto dot = s.find('.');
  std::string whole = s.substr(0, dot);
  std::string frac = dot == std::string::npos ? "" : s.substr(dot + 1);
  if (frac.size() > 2) throw ReportError(ReportError::Kind::Parse, fmt::format("bad {} '{}'", what, s));
  while (frac.size() < 2) frac += '0';
  return static_cast<std::int64_t>(to_u64(whole, what) * 100 + to_u64(frac, what));
}

bool to_bool(const std::string& s) {
  if (s == "1" || s == "true") return true;
  if (s == "0" || s == "false") return false;
  throw ReportError(ReportError::Kind::Parse, "bad boolean '" + s + "'");
}

void require_nonempty(const BenchmarkReport& r) {
  if (r.iterations == 0 || r.summary.empty()) {
    throw ReportError(ReportError::Kind::EmptyReport, "report has no iterations");
  }
}

json stat_json(const Stat& s, const char* prefix, json& row) {
  row[std::string(prefix) + "_min"] = s.min;
  row[std::string(prefix) + "_max"] = s.max;
  row[std::string(prefix) + "_avg"] = static_cast<double>(s.avg_centi) / 100.0;
  return row;
}

std::int64_t centi_of(const json& v) { return std::llround(v.get<double>() * 100.0); }

Stat stat_from(const json& row, const std::string& prefix) {
  return Stat{row.at(prefix + "_min").get<std::uint64_t>(), row.at(prefix + "_max").get<std::uint64_t>(),
              centi_of(row.at(prefix + "_avg"))};
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw ReportError(ReportError::Kind::Io, "cannot write " + p.string());
  out << text;
  if (!out) throw ReportError(ReportError::Kind::Io, "error writing " + p.string());
}

}  // namespace

std::string report_csv(const BenchmarkReport& report) {
  require_nonempty(report);
  std::ostringstream out;
  out << kSummaryHeader << '\n';
  for (const auto& s : report.summary) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", cell(s.configuration), cell(s.benchmark),
                       s.n_programs, s.correct.min, s.correct.max, format_avg(s.correct.avg_centi),
                       format_pct(s.correct_pct_centi), s.fg_usage.min, s.fg_usage.max,
                       format_avg(s.fg_usage.avg_centi), s.fg_success.min, s.fg_success.max,
                       format_avg(s.fg_success.avg_centi));
  }
  return out.str();
}

std::string detail_csv(const BenchmarkReport& report) {
  require_nonempty(report);
  std::ostringstream out;
  out << kDetailHeader << '\n';
  for (const auto& r : report.details) {
    out << fmt::format("{},{},{},{},{},{},{},{},{}\n", cell(r.configuration), cell(r.benchmark), r.iteration,
                       cell(r.program_id), fg::to_string(r.outcome), int(r.fg_used), int(r.correct), r.cycles,
                       r.llm_calls);
  }
  return out.str();
}

json report_json(const BenchmarkReport& report) {
  require_nonempty(report);
  json j;
  j["iterations"] = report.iterations;
  j["summary"] = json::array();
  for (const auto& s : report.summary) {
    json row{{"configuration", s.configuration}, {"benchmark", s.benchmark}, {"n_programs", s.n_programs}};
    stat_json(s.correct, "correct", row);
    row["correct_avg_pct"] = static_cast<double>(s.correct_pct_centi) / 100.0;
    stat_json(s.fg_usage, "fg_usage", row);
    stat_json(s.fg_success, "fg_success", row);
    j["summary"].push_back(std::move(row));
  }
  j["details"] = json::array();
  for (const auto& r : report.details) {
    j["details"].push_back(json{{"configuration", r.configuration},
                                {"benchmark", r.benchmark},
                                {"iteration", r.iteration},
                                {"program_id", r.program_id},
                                {"outcome", fg::to_string(r.outcome)},
                                {"fg_used", r.fg_used},
                                {"correct", r.correct},
                                {"cycles", r.cycles},
                                {"llm_calls", r.llm_calls}});
  }
  return j;
}

void emit_report(const BenchmarkReport& report, const std::filesystem::path& dir) {
  require_nonempty(report);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ReportError(ReportError::Kind::Io, "cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / kReportCsv, report_csv(report));
  write_file(dir / kReportJson, report_json(report).dump(2) + "\n");
  write_file(dir / kDetailCsv, detail_csv(report));
}

std::vector<SummaryRow> parse_report_csv(const std::string& text) {
  auto rows = parse_csv(text);
  if (rows.empty() || fmt::format("{}", fmt::join(rows[0], ",")) != kSummaryHeader) {
    throw ReportError(ReportError::Kind::Parse, "report.csv: unexpected header");
  }
  std::vector<SummaryRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& c = rows[i];
    if (c.size() != 13) throw ReportError(ReportError::Kind::Parse, fmt::format("report.csv row {}: 13 columns expected", i + 1));
    SummaryRow s;
    s.configuration = c[0];
    s.benchmark = c[1];
    s.n_programs = to_u64(c[2], "n_programs");
    s.correct = {to_u64(c[3], "correct_min"), to_u64(c[4], "correct_max"), to_centi(c[5], "correct_avg")};
    s.correct_pct_centi = to_centi(c[6], "correct_avg_pct");
    s.fg_usage = {to_u64(c[7], "fg_usage_min"), to_u64(c[8], "fg_usage_max"), to_centi(c[9], "fg_usage_avg")};
    s.fg_success = {to_u64(c[10], "fg_success_min"), to_u64(c[11], "fg_success_max"),
                    to_centi(c[12], "fg_success_avg")};
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<DetailRow> parse_detail_csv(const std::string& text) {
  auto rows = parse_csv(text);
  if (rows.empty() || fmt::format("{}", fmt::join(rows[0], ",")) != kDetailHeader) {
    throw ReportError(ReportError::Kind::Parse, "detail.csv: unexpected header");
  }
  std::vector<DetailRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& c = rows[i];
    if (c.size() != 9) throw ReportError(ReportError::Kind::Parse, fmt::format("detail.csv row {}: 9 columns expected", i + 1));
    DetailRow r;
    r.configuration = c[0];
    r.benchmark = c[1];
    r.iteration = static_cast<unsigned>(to_u64(c[2], "iteration"));
    r.program_id = c[3];
    try {
      r.outcome = fg::outcome_from_string(c[4]);
    } catch (const std::invalid_argument& e) {
      throw ReportError(ReportError::Kind::Parse, e.what());
    }
    r.fg_used = to_bool(c[5]);
    r.correct = to_bool(c[6]);
    r.cycles = static_cast<unsigned>(to_u64(c[7], "cycles"));
    r.llm_calls = to_u64(c[8], "llm_calls");
    out.push_back(std::move(r));
  }
  return out;
}

BenchmarkReport parse_report_json(const json& j) {
  BenchmarkReport r;
  try {
    r.iterations = j.at("iterations").get<unsigned>();
    for (const auto& row : j.at("summary")) {
      SummaryRow s;
      s.configuration = row.at("configuration").get<std::string>();
      s.benchmark = row.at("benchmark").get<std::string>();
      s.n_programs = row.at("n_programs").get<std::uint64_t>();
      s.correct = stat_from(row, "correct");
      s.correct_pct_centi = centi_of(row.at("correct_avg_pct"));
      s.fg_usage = stat_from(row, "fg_usage");
      s.fg_success = stat_from(row, "fg_success");
      r.summary.push_back(std::move(s));
    }
    for (const auto& row : j.at("details")) {
      DetailRow d;
      d.configuration = row.at("configuration").get<std::string>();
      d.benchmark = row.at("benchmark").get<std::string>();
      d.iteration = row.at("iteration").get<unsigned>();
      d.program_id = row.at("program_id").get<std::string>();
      d.outcome = fg::outcome_from_string(row.at("outcome").get<std::string>());
      d.fg_used = row.at("fg_used").get<bool>();
      d.correct = row.at("correct").get<bool>();
      d.cycles = row.at("cycles").get<unsigned>();
      d.llm_calls = row.at("llm_calls").get<std::uint64_t>();
      r.details.push_back(std::move(d));
    }
  } catch (const json::exception& e) {
    throw ReportError(ReportError::Kind::Parse, std::string("report.json: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ReportError(ReportError::Kind::Parse, std::string("report.json: ") + e.what());
  }
  return r;
}

}  // namespace fuzzfeed::eval
