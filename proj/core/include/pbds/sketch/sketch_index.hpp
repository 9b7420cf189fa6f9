#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "pbds/sketch/sketch.hpp"

namespace pbds {

/// Captured sketches with their usage counts. Lookups may run concurrently; insertion is exclusive.
class SketchIndex {
 public:
  struct Entry {
    Sketch sketch;
    std::int64_t uses;
  };

  SketchIndex() = default;
  SketchIndex(const SketchIndex&) = delete;
  SketchIndex& operator=(const SketchIndex&) = delete;

  void insert(Sketch sketch);
  /// Smallest sketch whose fingerprint matches, whose constants subsume the plan's, and whose
  /// attribute is safe for the plan. Counts a use on success.
  std::optional<Sketch> find_reusable(const QueryPlan& plan, const Database& db) const;

  std::size_t size() const;
  std::vector<Entry> entries() const;

  std::string to_json() const;
  static std::unique_ptr<SketchIndex> from_json(std::string_view text);
  void save(const std::string& path) const;
  static std::unique_ptr<SketchIndex> load(const std::string& path);

 private:
  struct Slot {
    Sketch sketch;
    mutable std::atomic<std::int64_t> uses{0};
    explicit Slot(Sketch s) : sketch(std::move(s)) {}
  };

  mutable std::shared_mutex _mutex;
  std::vector<std::unique_ptr<Slot>> _slots;
};

std::optional<Sketch> find_reusable(const SketchIndex& index, const QueryPlan& plan, const Database& db);

}  // namespace pbds
