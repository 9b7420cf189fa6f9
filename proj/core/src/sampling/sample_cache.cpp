#include "pbds/sampling/sample_cache.hpp"

#include <algorithm>
#include <mutex>

#include <fmt/format.h>

namespace pbds {

std::string SampleCache::key(const std::string& relation, std::vector<std::string> attributes) {
  std::sort(attributes.begin(), attributes.end());
  attributes.erase(std::unique(attributes.begin(), attributes.end()), attributes.end());
  return fmt::format("{}|{}", relation, fmt::join(attributes, ","));
}

std::shared_ptr<const StratifiedSample> SampleCache::lookup(const std::string& relation,
                                                            const std::vector<std::string>& attributes) const {
  const std::string k = key(relation, attributes);
  std::shared_lock lock(_mutex);
  const auto it = _samples.find(k);
  return it == _samples.end() ? nullptr : it->second;
}

void SampleCache::insert(std::shared_ptr<const StratifiedSample> sample) {
  const std::string k = key(sample->relation, sample->attributes);
  std::unique_lock lock(_mutex);
  _samples.insert_or_assign(k, std::move(sample));
}

std::size_t SampleCache::size() const {
  std::shared_lock lock(_mutex);
  return _samples.size();
}

std::vector<std::shared_ptr<const StratifiedSample>> SampleCache::samples() const {
  std::shared_lock lock(_mutex);
  std::vector<std::shared_ptr<const StratifiedSample>> out;
  for (const auto& [_, s] : _samples) out.push_back(s);
  return out;
}

std::shared_ptr<const StratifiedSample> cache_lookup(const SampleCache& cache, const std::string& relation,
                                                     const std::vector<std::string>& attributes) {
  return cache.lookup(relation, attributes);
}

}  // namespace pbds
