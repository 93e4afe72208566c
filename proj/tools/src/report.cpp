#include "report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <sstream>

namespace tcost::cli {
namespace {

using nlohmann::ordered_json;

ordered_json to_json(const Value& v) {
  return std::visit([](const auto& x) { return ordered_json(x); }, v);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_cell(const Value& v) {
  struct {
    std::string operator()(double x) const { return format_double(x); }
    std::string operator()(std::int64_t x) const { return std::to_string(x); }
    std::string operator()(bool x) const { return x ? "true" : "false"; }
    std::string operator()(const std::string& x) const { return csv_escape(x); }
  } visitor;
  return std::visit(visitor, v);
}

std::string human_cell(const Value& v) {
  struct {
    std::string operator()(double x) const {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6g", x);
      return buf;
    }
    std::string operator()(std::int64_t x) const { return std::to_string(x); }
    std::string operator()(bool x) const { return x ? "yes" : "no"; }
    std::string operator()(const std::string& x) const { return x; }
  } visitor;
  return std::visit(visitor, v);
}

}  // namespace

void Report::set(const std::string& key, Value v) {
  for (auto& [k, old] : fields_) {
    if (k == key) {
      old = std::move(v);
      return;
    }
  }
  fields_.emplace_back(key, std::move(v));
}

Table& Report::add_table(std::string name, std::vector<std::string> columns) {
  tables_.push_back({std::move(name), std::move(columns), {}});
  return tables_.back();
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string render_json(const Report& report) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = report.command();
  for (const auto& [k, v] : report.fields()) j[k] = to_json(v);
  for (const Table& t : report.tables()) {
    ordered_json rows = ordered_json::array();
    for (const auto& row : t.rows) {
      ordered_json r;
      for (std::size_t c = 0; c < t.columns.size(); ++c) r[t.columns[c]] = to_json(row[c]);
      rows.push_back(std::move(r));
    }
    j[t.name] = std::move(rows);
  }
  j["warnings"] = report.warnings();
  return j.dump(2) + "\n";
}

std::string render_csv(const Report& report) {
  std::ostringstream out;
  out << "key,value\n";
  out << "schema_version," << kSchemaVersion << "\n";
  out << "command," << csv_escape(report.command()) << "\n";
  for (const auto& [k, v] : report.fields()) out << k << ',' << csv_cell(v) << '\n';
  for (const std::string& w : report.warnings()) out << "warning," << csv_escape(w) << '\n';
  for (const Table& t : report.tables()) {
    out << "\n# " << t.name << '\n';
    for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
    out << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv_cell(row[c]);
      out << '\n';
    }
  }
  return out.str();
}

std::string render_human(const Report& report) {
  std::ostringstream out;
  std::size_t width = 0;
  for (const auto& f : report.fields()) width = std::max(width, f.first.size());
  out << report.command() << '\n';
  for (const auto& [k, v] : report.fields()) {
    out << "  " << k << std::string(width - k.size() + 2, ' ') << human_cell(v) << '\n';
  }
  for (const Table& t : report.tables()) {
    out << '\n' << t.name << '\n';
    std::vector<std::size_t> w(t.columns.size());
    std::vector<std::vector<std::string>> cells;
    for (std::size_t c = 0; c < t.columns.size(); ++c) w[c] = t.columns[c].size();
    for (const auto& row : t.rows) {
      auto& r = cells.emplace_back();
      for (std::size_t c = 0; c < row.size(); ++c) {
        r.push_back(human_cell(row[c]));
        w[c] = std::max(w[c], r.back().size());
      }
    }
    auto line = [&](const std::vector<std::string>& r) {
      out << ' ';
      for (std::size_t c = 0; c < r.size(); ++c) {
        out << ' ' << std::string(w[c] - r[c].size(), ' ') << r[c];
      }
      out << '\n';
    };
    line(t.columns);
    for (const auto& r : cells) line(r);
  }
  for (const std::string& msg : report.warnings()) out << "warning: " << msg << '\n';
  return out.str();
}

std::string render(const Report& report, Format format) {
  switch (format) {
    case Format::Json:
      return render_json(report);
    case Format::Csv:
      return render_csv(report);
    case Format::Human:
      break;
  }
  return render_human(report);
}

}  // namespace tcost::cli
