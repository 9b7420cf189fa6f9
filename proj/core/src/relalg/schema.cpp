#include "pbds/relalg/schema.hpp"

#include <unordered_set>

#include <fmt/format.h>

#include "pbds/common/error.hpp"

namespace pbds {

Schema::Schema(std::string relation_name, std::vector<Attribute> attributes, std::vector<std::string> primary_key)
    : _relation_name(std::move(relation_name)), _attributes(std::move(attributes)), _primary_key(std::move(primary_key)) {
  if (_attributes.empty()) fail(ErrorKind::invalid_argument, fmt::format("schema '{}' has no attributes", _relation_name));
  std::unordered_set<std::string> seen;
  for (const auto& a : _attributes) {
    if (a.name.empty()) fail(ErrorKind::invalid_argument, "empty attribute name");
    if (!seen.insert(a.name).second) {
      fail(ErrorKind::invalid_argument, fmt::format("duplicate attribute '{}' in schema '{}'", a.name, _relation_name));
    }
  }
  for (const auto& k : _primary_key) {
    if (!seen.count(k)) fail(ErrorKind::unknown_attribute, fmt::format("primary key attribute '{}' not in schema", k));
  }
}

std::optional<std::size_t> Schema::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < _attributes.size(); ++i) {
    if (_attributes[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t Schema::require(const std::string& name) const {
  if (auto i = index_of(name)) return *i;
  fail(ErrorKind::unknown_attribute,
       fmt::format("attribute '{}' not in {}", name, _relation_name.empty() ? "input" : "'" + _relation_name + "'"));
}

std::vector<std::string> Schema::attribute_names() const {
  std::vector<std::string> names;
  names.reserve(_attributes.size());
  for (const auto& a : _attributes) names.push_back(a.name);
  return names;
}

Schema Schema::renamed(std::string relation_name) const {
  Schema copy = *this;
  copy._relation_name = std::move(relation_name);
  return copy;
}

}  // namespace pbds
