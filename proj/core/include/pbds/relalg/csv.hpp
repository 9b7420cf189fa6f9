#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "pbds/relalg/relation.hpp"

namespace pbds {

/// Schema sidecar: {"relation": .., "attributes": [{"name": .., "type": ..}], "primary_key": [..]}.
Schema schema_from_json(std::string_view text);
std::string schema_to_json(const Schema& schema);
Schema load_schema(const std::string& path);

/// Parses "name:type,name:type" as given on the command line.
Schema schema_from_spec(const std::string& relation, std::string_view spec);

/// Header row names the attributes (any order); every other line is one row of multiplicity 1.
/// Empty fields are rejected since NULLs are not modeled.
Relation read_csv(std::istream& in, const Schema& schema);
Relation load_csv(const std::string& path, const Schema& schema);
void write_csv(std::ostream& out, const Relation& relation);

/// A data directory holds <name>.csv next to <name>.schema.json for every relation.
Database load_database(const std::string& directory);
void save_relation(const std::string& directory, const Relation& relation);

}  // namespace pbds
