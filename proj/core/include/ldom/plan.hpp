#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ldom/rational.hpp"

namespace ldom {

enum class PlanKind {
  KolmogorovBase,
  IdentityBase,
  NormalizeAtZero,
  PointEvaluation,
  Projection,
  Compose,
  RestrictExtend,
  PairSplit,
  BlockGlue,
};

std::string_view to_string(PlanKind kind) noexcept;

struct PlanNode;
using PlanPtr = std::shared_ptr<const PlanNode>;

/// One step of an operator construction. `constant` is the c of the c-good
/// map the subtree produces; `params` holds kind-specific data (KST
/// parameters, split intervals, glue intervals, source descriptor).
struct PlanNode {
  PlanKind kind = PlanKind::IdentityBase;
  Rational constant{1};
  std::vector<PlanPtr> children;
  nlohmann::json params = nlohmann::json::object();
};

PlanPtr make_plan(PlanKind kind, Rational constant, std::vector<PlanPtr> children = {},
                  nlohmann::json params = nlohmann::json::object());

/// {kind, constant, params, children}
nlohmann::json to_json(const PlanNode& node);

/// Indented tree, one node per line with its constant.
std::string render_tree(const PlanNode& node);

}  // namespace ldom
