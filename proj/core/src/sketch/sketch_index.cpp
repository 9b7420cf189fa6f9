#include "pbds/sketch/sketch_index.hpp"

#include <mutex>

#include <fmt/format.h>

#include "pbds/common/error.hpp"
#include "pbds/safety/safety.hpp"
#include "relalg/json_internal.hpp"

namespace pbds {

void SketchIndex::insert(Sketch sketch) {
  std::unique_lock lock(_mutex);
  _slots.push_back(std::make_unique<Slot>(std::move(sketch)));
}

std::optional<Sketch> SketchIndex::find_reusable(const QueryPlan& plan, const Database& db) const {
  const Fingerprint now = fingerprint(plan);
  std::shared_lock lock(_mutex);
  const Slot* best = nullptr;
  for (const auto& slot : _slots) {
    const Sketch& s = slot->sketch;
    if (best && best->sketch.size_rows <= s.size_rows) continue;
    if (!subsumes(s.captured_for, now, plan, db)) continue;
    if (!is_safe_attribute(plan, s.relation, s.attribute(), db)) continue;
    best = slot.get();
  }
  if (!best) return std::nullopt;
  best->uses.fetch_add(1, std::memory_order_relaxed);
  return best->sketch;
}

std::size_t SketchIndex::size() const {
  std::shared_lock lock(_mutex);
  return _slots.size();
}

std::vector<SketchIndex::Entry> SketchIndex::entries() const {
  std::shared_lock lock(_mutex);
  std::vector<Entry> out;
  out.reserve(_slots.size());
  for (const auto& slot : _slots) out.push_back({slot->sketch, slot->uses.load(std::memory_order_relaxed)});
  return out;
}

std::string SketchIndex::to_json() const {
  detail::json all = detail::json::array();
  for (const auto& e : entries()) {
    all.push_back({{"sketch", detail::json::parse(sketch_to_json(e.sketch))}, {"uses", e.uses}});
  }
  return all.dump(2);
}

std::unique_ptr<SketchIndex> SketchIndex::from_json(std::string_view text) {
  const auto j = detail::parse_json(text, "sketch index");
  auto index = std::make_unique<SketchIndex>();
  try {
    for (const auto& e : j) {
      index->insert(sketch_from_json(e.at("sketch").dump()));
      index->_slots.back()->uses = e.value("uses", std::int64_t{0});
    }
  } catch (const detail::json::exception& e) {
    fail(ErrorKind::parse, fmt::format("malformed sketch index: {}", e.what()));
  }
  return index;
}

void SketchIndex::save(const std::string& path) const { detail::write_text_file(path, to_json()); }

std::unique_ptr<SketchIndex> SketchIndex::load(const std::string& path) {
  return from_json(detail::read_json_file(path).dump());
}

std::optional<Sketch> find_reusable(const SketchIndex& index, const QueryPlan& plan, const Database& db) {
  return index.find_reusable(plan, db);
}

}  // namespace pbds
