#include "pbds/relalg/csv.hpp"

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "pbds/common/error.hpp"
#include "relalg/json_internal.hpp"

namespace pbds {

namespace {

/// Splits one CSV record; handles double-quoted fields with "" escapes.
std::vector<std::string> split_record(const std::string& line, std::size_t line_number) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else if (c != '\r') {
      current += c;
    }
  }
  if (quoted) fail(ErrorKind::parse, fmt::format("unterminated quote on line {}", line_number));
  fields.push_back(std::move(current));
  return fields;
}

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (const char c : field) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

Schema schema_from_json(std::string_view text) {
  const auto j = detail::parse_json(text, "schema");
  try {
    std::vector<Attribute> attrs;
    for (const auto& a : j.at("attributes")) {
      attrs.push_back({a.at("name").get<std::string>(), parse_data_type(a.at("type").get<std::string>())});
    }
    return Schema(j.at("relation").get<std::string>(), std::move(attrs),
                  j.value("primary_key", std::vector<std::string>{}));
  } catch (const detail::json::exception& e) {
    fail(ErrorKind::parse, fmt::format("malformed schema: {}", e.what()));
  }
}

std::string schema_to_json(const Schema& schema) {
  detail::json attrs = detail::json::array();
  for (const auto& a : schema.attributes()) attrs.push_back({{"name", a.name}, {"type", std::string(to_string(a.type))}});
  detail::json j{{"relation", schema.relation_name()}, {"attributes", attrs}};
  if (!schema.primary_key().empty()) j["primary_key"] = schema.primary_key();
  return j.dump(2);
}

Schema load_schema(const std::string& path) { return schema_from_json(detail::read_json_file(path).dump()); }

Schema schema_from_spec(const std::string& relation, std::string_view spec) {
  std::vector<Attribute> attrs;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t end = std::min(spec.find(',', start), spec.size());
    const std::string_view item = spec.substr(start, end - start);
    const std::size_t colon = item.find(':');
    if (colon == std::string_view::npos) fail(ErrorKind::parse, fmt::format("expected name:type, got '{}'", item));
    attrs.push_back({std::string(item.substr(0, colon)), parse_data_type(item.substr(colon + 1))});
    start = end + 1;
  }
  return Schema(relation, std::move(attrs));
}

Relation read_csv(std::istream& in, const Schema& schema) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::parse, "missing CSV header row");
  const auto header = split_record(line, 1);
  if (header.size() != schema.arity()) {
    fail(ErrorKind::parse, fmt::format("header has {} columns, schema '{}' has {}", header.size(),
                                       schema.relation_name(), schema.arity()));
  }
  std::vector<std::size_t> position(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) position[i] = schema.require(header[i]);
  Relation rel(schema);
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_record(line, line_number);
    if (fields.size() != header.size()) {
      fail(ErrorKind::parse, fmt::format("line {} has {} fields, expected {}", line_number, fields.size(), header.size()));
    }
    Tuple tuple(schema.arity());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const Attribute& attr = schema.attributes()[position[i]];
      auto v = parse_value(fields[i], attr.type);
      if (!v) {
        fail(ErrorKind::parse, fmt::format("line {}: {} value for '{}' ({})", line_number,
                                           fields[i].empty() ? "missing" : "malformed", attr.name, to_string(attr.type)));
      }
      tuple[position[i]] = std::move(*v);
    }
    rel.add_row(std::move(tuple));
  }
  return rel;
}

Relation load_csv(const std::string& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, fmt::format("cannot read '{}'", path));
  return read_csv(in, schema);
}

void write_csv(std::ostream& out, const Relation& relation) {
  const auto& attrs = relation.schema().attributes();
  for (std::size_t i = 0; i < attrs.size(); ++i) out << (i ? "," : "") << quote(attrs[i].name);
  out << '\n';
  for (const auto& row : relation.rows()) {
    for (std::int64_t m = 0; m < row.multiplicity; ++m) {
      for (std::size_t i = 0; i < row.values.size(); ++i) out << (i ? "," : "") << quote(to_string(row.values[i]));
      out << '\n';
    }
  }
}

Database load_database(const std::string& directory) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory)) fail(ErrorKind::io, fmt::format("data directory '{}' does not exist", directory));
  std::vector<fs::path> schemas;
  for (const auto& entry : fs::directory_iterator(directory)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > 12 && name.ends_with(".schema.json")) schemas.push_back(entry.path());
  }
  std::sort(schemas.begin(), schemas.end());
  Database db;
  for (const auto& path : schemas) {
    Schema schema = load_schema(path.string());
    const fs::path csv = fs::path(directory) / (schema.relation_name() + ".csv");
    db.emplace(schema.relation_name(), load_csv(csv.string(), schema));
  }
  return db;
}

void save_relation(const std::string& directory, const Relation& relation) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  const std::string name = relation.schema().relation_name();
  if (name.empty()) fail(ErrorKind::invalid_argument, "cannot store a relation without a name");
  detail::write_text_file((fs::path(directory) / (name + ".schema.json")).string(), schema_to_json(relation.schema()) + "\n");
  std::ofstream out(fs::path(directory) / (name + ".csv"), std::ios::binary);
  if (!out) fail(ErrorKind::io, fmt::format("cannot write relation '{}' to '{}'", name, directory));
  write_csv(out, relation);
}

}  // namespace pbds
