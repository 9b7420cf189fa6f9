#pragma once

#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "pbds/sampling/sample.hpp"

namespace pbds {

/// Samples keyed by (relation, group-by attribute set). A cached sample serves any later query
/// grouping the same relation on the same attributes, in any order.
class SampleCache {
 public:
  std::shared_ptr<const StratifiedSample> lookup(const std::string& relation,
                                                 const std::vector<std::string>& attributes) const;
  void insert(std::shared_ptr<const StratifiedSample> sample);
  std::size_t size() const;
  std::vector<std::shared_ptr<const StratifiedSample>> samples() const;

  static std::string key(const std::string& relation, std::vector<std::string> attributes);

 private:
  mutable std::shared_mutex _mutex;
  std::map<std::string, std::shared_ptr<const StratifiedSample>> _samples;
};

std::shared_ptr<const StratifiedSample> cache_lookup(const SampleCache& cache, const std::string& relation,
                                                     const std::vector<std::string>& attributes);

}  // namespace pbds
