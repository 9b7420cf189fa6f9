#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pbds/relalg/value.hpp"

namespace pbds {

struct Attribute {
  std::string name;
  DataType type;

  bool operator==(const Attribute&) const = default;
};

class Schema {
 public:
  Schema(std::string relation_name, std::vector<Attribute> attributes, std::vector<std::string> primary_key = {});

  const std::string& relation_name() const { return _relation_name; }
  const std::vector<Attribute>& attributes() const { return _attributes; }
  const std::vector<std::string>& primary_key() const { return _primary_key; }
  std::size_t arity() const { return _attributes.size(); }

  std::optional<std::size_t> index_of(const std::string& name) const;
  /// Like index_of but throws unknown_attribute.
  std::size_t require(const std::string& name) const;
  bool contains(const std::string& name) const { return index_of(name).has_value(); }
  const Attribute& attribute(const std::string& name) const { return _attributes[require(name)]; }

  std::vector<std::string> attribute_names() const;

  Schema renamed(std::string relation_name) const;

  bool operator==(const Schema&) const = default;

 private:
  std::string _relation_name;
  std::vector<Attribute> _attributes;
  std::vector<std::string> _primary_key;
};

}  // namespace pbds
