#include "privpref/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "privpref/errors.hpp"

namespace privpref {

std::string format_number(double x) {
  if (!std::isfinite(x)) throw InternalError("cannot serialize non-finite number");
  if (x == 0.0) return "0";  // folds -0 into 0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return std::string(buf);
}

namespace {

std::string header_line(const FeatureSchema& schema) {
  std::string h = "record_id";
  for (const Feature& f : schema.features) {
    h += ',';
    h += f.name;
  }
  h += ",persona_id,label";
  return h;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& field, size_t row, const std::string& col) {
  const char* begin = field.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v))
    throw ParseError("row " + std::to_string(row) + " column \"" + col +
                     "\": malformed numeric \"" + field + "\"");
  return v;
}

uint64_t parse_id(const std::string& field, size_t row) {
  if (field.empty())
    throw ParseError("row " + std::to_string(row) + " column \"record_id\": empty");
  for (char c : field) {
    if (c < '0' || c > '9')
      throw ParseError("row " + std::to_string(row) +
                       " column \"record_id\": malformed id \"" + field + "\"");
  }
  return std::strtoull(field.c_str(), nullptr, 10);
}

}  // namespace

std::string dataset_to_csv(const LabeledDataset& ds) {
  std::string out = header_line(ds.schema);
  out += '\n';
  for (const PrivacyRecord& r : ds.records) {
    out += std::to_string(r.record_id);
    for (size_t i = 0; i < r.values.size(); ++i) {
      out += ',';
      const CellValue& v = r.values[i];
      switch (v.kind) {
        case CellValue::Kind::Missing: break;
        case CellValue::Kind::Categorical: out += v.cat; break;
        case CellValue::Kind::Numeric: out += format_number(v.num); break;
      }
    }
    out += ',';
    if (r.persona_id) out += std::to_string(*r.persona_id);
    out += ',';
    if (r.label) out += choice_token(*r.label);
    out += '\n';
  }
  return out;
}

LabeledDataset dataset_from_csv(const std::string& text,
                                const FeatureSchema& schema,
                                const std::string& provenance) {
  schema.validate();
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw SchemaMismatchError("empty input: missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::string expected = header_line(schema);
  if (line != expected)
    throw SchemaMismatchError("header mismatch: expected \"" + expected +
                              "\", got \"" + line + "\"");

  LabeledDataset ds;
  ds.schema = schema;
  ds.provenance = provenance;
  const size_t ncols = schema.features.size() + 3;
  size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.eof()) break;
    ++row;
    std::vector<std::string> fields = split_line(line);
    if (fields.size() != ncols)
      throw SchemaMismatchError("row " + std::to_string(row) + ": has " +
                                std::to_string(fields.size()) +
                                " fields, expected " + std::to_string(ncols));
    PrivacyRecord r;
    r.record_id = parse_id(fields[0], row);
    for (size_t i = 0; i < schema.features.size(); ++i) {
      const Feature& f = schema.features[i];
      const std::string& field = fields[i + 1];
      if (field.empty()) {
        r.values.push_back(CellValue::missing());
      } else if (f.is_categorical()) {
        r.values.push_back(CellValue::of(field));
      } else {
        r.values.push_back(CellValue::of(parse_number(field, row, f.name)));
      }
    }
    const std::string& pid = fields[ncols - 2];
    if (!pid.empty()) {
      r.persona_id = static_cast<int64_t>(
          parse_number(pid, row, "persona_id"));
    }
    const std::string& lab = fields[ncols - 1];
    if (!lab.empty()) {
      std::string canon = canonical_choice_token(lab);
      try {
        r.label = choice_from_token(canon);
      } catch (const UnknownChoiceError&) {
        throw SchemaMismatchError("row " + std::to_string(row) +
                                  " column \"label\": unknown choice \"" + lab +
                                  "\"");
      }
    }
    ds.records.push_back(std::move(r));
  }
  ds.validate();
  return ds;
}

void save_dataset(const LabeledDataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open \"" + path + "\" for writing");
  std::string text = dataset_to_csv(ds);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for \"" + path + "\"");
}

LabeledDataset load_dataset(const std::string& path,
                            const FeatureSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open \"" + path + "\" for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return dataset_from_csv(buf.str(), schema, path);
}

}  // namespace privpref
