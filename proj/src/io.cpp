#include "lpmk/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace lpmk {

namespace {

void escape_json(const std::string& s, std::string& out) {
  out.push_back('"');
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned char>(ch));
          out += buf;
        } else {
          out.push_back(ch);
        }
    }
  }
  out.push_back('"');
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

JsonValue JsonValue::object() { return JsonValue(Kind::kObject); }
JsonValue JsonValue::array() { return JsonValue(Kind::kArray); }

JsonValue JsonValue::number(double v) {
  JsonValue j(Kind::kNumber);
  j.number_ = v;
  return j;
}

JsonValue JsonValue::integer(long long v) {
  JsonValue j(Kind::kInteger);
  j.integer_ = v;
  return j;
}

JsonValue JsonValue::boolean(bool v) {
  JsonValue j(Kind::kBoolean);
  j.boolean_ = v;
  return j;
}

JsonValue JsonValue::string(std::string v) {
  JsonValue j(Kind::kString);
  j.string_ = std::move(v);
  return j;
}

JsonValue& JsonValue::add(const std::string& key, JsonValue v) {
  if (kind_ != Kind::kObject) throw std::invalid_argument("JsonValue::add: not an object");
  members_.emplace_back(key, std::move(v));
  return *this;
}

JsonValue& JsonValue::push(JsonValue v) {
  if (kind_ != Kind::kArray) throw std::invalid_argument("JsonValue::push: not an array");
  elements_.push_back(std::move(v));
  return *this;
}

JsonValue JsonValue::number_array(const std::vector<double>& values) {
  JsonValue j = array();
  for (double v : values) j.push(number(v));
  return j;
}

void JsonValue::dump_to(std::string& out, int indent, int depth) const {
  const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent) * depth, ' ');
  switch (kind_) {
    case Kind::kNumber: out += format_double(number_); break;
    case Kind::kInteger: out += std::to_string(integer_); break;
    case Kind::kBoolean: out += boolean_ ? "true" : "false"; break;
    case Kind::kString: escape_json(string_, out); break;
    case Kind::kObject: {
      if (members_.empty()) {
        out += "{}";
        break;
      }
      out += "{\n";
      for (std::size_t i = 0; i < members_.size(); ++i) {
        out += pad;
        escape_json(members_[i].first, out);
        out += ": ";
        members_[i].second.dump_to(out, indent, depth + 1);
        if (i + 1 < members_.size()) out += ",";
        out += "\n";
      }
      out += close_pad + "}";
      break;
    }
    case Kind::kArray: {
      if (elements_.empty()) {
        out += "[]";
        break;
      }
      out += "[\n";
      for (std::size_t i = 0; i < elements_.size(); ++i) {
        out += pad;
        elements_[i].dump_to(out, indent, depth + 1);
        if (i + 1 < elements_.size()) out += ",";
        out += "\n";
      }
      out += close_pad + "]";
      break;
    }
  }
}

std::string JsonValue::dump(int indent) const {
  std::string out;
  dump_to(out, indent, 0);
  out += "\n";
  return out;
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw std::invalid_argument("CsvWriter: need at least one column");
}

void CsvWriter::add_row(const std::vector<double>& values) {
  if (values.size() != columns_.size())
    throw std::invalid_argument("CsvWriter: row length does not match the header");
  rows_.push_back(values);
}

std::string CsvWriter::dump() const {
  std::string out;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) out.push_back(',');
    out += columns_[i];
  }
  out.push_back('\n');
  for (const std::vector<double>& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out.push_back(',');
      out += format_double(row[i]);
    }
    out.push_back('\n');
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_text_file: cannot open " + path);
  out << content;
  if (!out) throw std::runtime_error("write_text_file: write failed for " + path);
}

}  // namespace lpmk
