#include "ldom/plan.hpp"

#include <sstream>

namespace ldom {

std::string_view to_string(PlanKind kind) noexcept {
  switch (kind) {
    case PlanKind::KolmogorovBase: return "KolmogorovBase";
    case PlanKind::IdentityBase: return "IdentityBase";
    case PlanKind::NormalizeAtZero: return "NormalizeAtZero";
    case PlanKind::PointEvaluation: return "PointEvaluation";
    case PlanKind::Projection: return "Projection";
    case PlanKind::Compose: return "Compose";
    case PlanKind::RestrictExtend: return "RestrictExtend";
    case PlanKind::PairSplit: return "PairSplit";
    case PlanKind::BlockGlue: return "BlockGlue";
  }
  return "?";
}

PlanPtr make_plan(PlanKind kind, Rational constant, std::vector<PlanPtr> children, nlohmann::json params) {
  auto node = std::make_shared<PlanNode>();
  node->kind = kind;
  node->constant = constant;
  node->children = std::move(children);
  node->params = std::move(params);
  return node;
}

nlohmann::json to_json(const PlanNode& node) {
  nlohmann::json children = nlohmann::json::array();
  for (const auto& child : node.children) children.push_back(to_json(*child));
  return {{"kind", std::string(to_string(node.kind))},
          {"constant", node.constant.to_string()},
          {"params", node.params},
          {"children", std::move(children)}};
}

namespace {

void render(const PlanNode& node, int depth, std::ostringstream& os) {
  os << std::string(static_cast<std::size_t>(depth) * 2, ' ') << to_string(node.kind) << "  c=" << node.constant;
  if (node.params.contains("space")) os << "  space=" << node.params["space"].get<std::string>();
  if (node.params.contains("interval")) os << "  on " << node.params["interval"].dump();
  os << '\n';
  for (const auto& child : node.children) render(*child, depth + 1, os);
}

}  // namespace

std::string render_tree(const PlanNode& node) {
  std::ostringstream os;
  render(node, 0, os);
  return os.str();
}

}  // namespace ldom
