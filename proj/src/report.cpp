#include "cvqml/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cvqml {

Json parse_json(const std::string& text, const std::string& where) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("invalid JSON in " + where + ": " + e.what());
  }
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str(), path);
}

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

namespace {

void dump_value(const Json& v, std::string& out, int depth) {
  const std::string pad(2 * static_cast<std::size_t>(depth), ' ');
  const std::string pad_in(2 * static_cast<std::size_t>(depth + 1), ' ');
  switch (v.type()) {
    case Json::value_t::null:
      out += "null";
      break;
    case Json::value_t::boolean:
      out += v.get<bool>() ? "true" : "false";
      break;
    case Json::value_t::number_integer:
      out += std::to_string(v.get<long long>());
      break;
    case Json::value_t::number_unsigned:
      out += std::to_string(v.get<unsigned long long>());
      break;
    case Json::value_t::number_float:
      out += format_double(v.get<double>());
      break;
    case Json::value_t::string:
      // Reuse the library's escaping for the quoted string literal.
      out += nlohmann::json(v.get<std::string>()).dump();
      break;
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        break;
      }
      out += "[\n";
      bool first = true;
      for (const auto& item : v) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        dump_value(item, out, depth + 1);
      }
      out += "\n" + pad + "]";
      break;
    }
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        break;
      }
      out += "{\n";
      bool first = true;
      for (const auto& item : v.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in + nlohmann::json(item.key()).dump() + ": ";
        dump_value(item.value(), out, depth + 1);
      }
      out += "\n" + pad + "}";
      break;
    }
    default:
      throw std::runtime_error("cannot serialize binary/discarded JSON value");
  }
}

}  // namespace

std::string dump_json(const Json& doc) {
  std::string out;
  dump_value(doc, out, 0);
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!content.empty() && content.back() != '\n') out << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_csv_file(const std::string& path,
                    const std::vector<std::string>& header,
                    const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) out += ',';
    out += header[c];
  }
  out += '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::runtime_error("CSV row width does not match header: " + path);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!std::isfinite(row[c]))
        throw std::runtime_error("CSV value is not finite: " + path);
      if (c) out += ',';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  write_text_file(path, out);
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string timestamp_field(double wall_seconds) {
  char buf[32];
  std::snprintf(buf, sizeof buf, " wall=%.3fs", wall_seconds);
  return utc_timestamp() + buf;
}

bool same_modulo_timestamp(const Json& a, const Json& b) {
  Json ca = a, cb = b;
  if (ca.is_object()) ca.erase("timestamp");
  if (cb.is_object()) cb.erase("timestamp");
  return dump_json(ca) == dump_json(cb);
}

}  // namespace cvqml
