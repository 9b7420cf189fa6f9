#include "pbds/sketch/fingerprint.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "pbds/safety/safety.hpp"

namespace pbds {

namespace {

struct Piece {
  std::string text;
  std::vector<ConstantSlot> slots;
};

bool is_slot_constant(const Expression& e) { return e.is_constant(); }

Piece template_of(const Predicate& p, OperatorId selection) {
  switch (p.kind()) {
    case Predicate::Kind::comparison: {
      if (p.lhs().is_attribute() && is_slot_constant(p.rhs())) {
        return {fmt::format("{} {} ?", p.lhs().name(), to_string(p.op())), {{selection, p.op(), p.rhs().value()}}};
      }
      if (p.rhs().is_attribute() && is_slot_constant(p.lhs())) {
        const CompareOp op = mirrored(p.op());
        return {fmt::format("{} {} ?", p.rhs().name(), to_string(op)), {{selection, op, p.lhs().value()}}};
      }
      return {p.to_string(), {}};
    }
    case Predicate::Kind::conjunction: {
      std::vector<Piece> parts;
      for (const auto& c : p.children()) parts.push_back(template_of(c, selection));
      std::stable_sort(parts.begin(), parts.end(), [](const Piece& a, const Piece& b) { return a.text < b.text; });
      Piece out{"AND(", {}};
      for (std::size_t i = 0; i < parts.size(); ++i) {
        out.text += (i ? "," : "") + parts[i].text;
        out.slots.insert(out.slots.end(), parts[i].slots.begin(), parts[i].slots.end());
      }
      out.text += ")";
      return out;
    }
    default: return {p.to_string(), {}};
  }
}

std::string sorted_list(std::vector<std::string> names) {
  std::sort(names.begin(), names.end());
  return fmt::format("{}", fmt::join(names, ","));
}

std::string order_text(const std::vector<OrderKey>& order) {
  std::vector<std::string> keys;
  for (const auto& k : order) keys.push_back(k.attribute + (k.direction == SortDirection::descending ? "-" : "+"));
  return fmt::format("{}", fmt::join(keys, ","));
}

void serialize(const PlanNode& node, Fingerprint& out) {
  const auto children = [&] {
    out.text += "(";
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      if (i) out.text += ",";
      serialize(node.children[i], out);
    }
    out.text += ")";
  };
  const auto aggregate = [&] {
    return fmt::format("{}({})->{}", to_string(node.function), node.input_attribute.empty() ? "*" : node.input_attribute,
                       node.output_attribute);
  };
  switch (node.kind) {
    case OperatorKind::table_access: out.text += "R[" + node.relation + "]"; return;
    case OperatorKind::selection: {
      Piece p = template_of(node.predicate, node.id);
      out.text += "S[" + p.text + "]";
      out.slots.insert(out.slots.end(), p.slots.begin(), p.slots.end());
      break;
    }
    case OperatorKind::projection: {
      std::vector<std::string> items;
      for (const auto& item : node.projections) items.push_back(item.expression.to_string() + "->" + item.name);
      out.text += fmt::format("P[{}]", fmt::join(items, ","));
      break;
    }
    case OperatorKind::join:
      out.text += fmt::format("J[{}={}]", node.left_attribute, node.right_attribute);
      break;
    case OperatorKind::aggregation:
      out.text += fmt::format("G[{};{}]", aggregate(), sorted_list(node.group_by));
      break;
    case OperatorKind::window:
      out.text += fmt::format("W[{};{};{}]", aggregate(), sorted_list(node.group_by), order_text(node.order));
      break;
    case OperatorKind::top_k: out.text += fmt::format("T[{};{}]", node.limit, order_text(node.order)); break;
    default: out.text += std::string(to_string(node.kind)); break;
  }
  children();
}

}  // namespace

Fingerprint fingerprint(const QueryPlan& plan) {
  Fingerprint out;
  serialize(plan.root(), out);
  return out;
}

bool subsumes(const Fingerprint& then, const Fingerprint& now, const QueryPlan& plan, const Database& db) {
  if (then.text != now.text || then.slots.size() != now.slots.size()) return false;
  for (std::size_t i = 0; i < now.slots.size(); ++i) {
    const ConstantSlot& old_slot = then.slots[i];
    const ConstantSlot& new_slot = now.slots[i];
    if (type_of(old_slot.value) == DataType::text || type_of(new_slot.value) == DataType::text) {
      if (!values_equal(old_slot.value, new_slot.value)) return false;
      continue;
    }
    const int c = compare_values(new_slot.value, old_slot.value);
    if (c == 0) continue;
    bool tighter = false;
    switch (new_slot.op) {
      case CompareOp::gt:
      case CompareOp::ge: tighter = c > 0; break;
      case CompareOp::lt:
      case CompareOp::le: tighter = c < 0; break;
      case CompareOp::eq: tighter = false; break;
    }
    if (!tighter || !is_tightening_sound(plan, new_slot.selection, db)) return false;
  }
  return true;
}

}  // namespace pbds
