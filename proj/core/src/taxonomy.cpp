#include "trajzone/taxonomy.hpp"

#include <algorithm>
#include <cctype>

#include "trajzone/error.hpp"

namespace trajzone {

std::string_view to_string(TaxonomyNode node) noexcept {
  switch (node) {
    case TaxonomyNode::Geometric: return "geometric";
    case TaxonomyNode::Kinematic: return "kinematic";
    case TaxonomyNode::Speed: return "speed";
    case TaxonomyNode::Acceleration: return "acceleration";
    case TaxonomyNode::Curvature: return "curvature";
    case TaxonomyNode::Indentation: return "indentation";
  }
  return "geometric";
}

std::string_view display_name(TaxonomyNode node) noexcept {
  switch (node) {
    case TaxonomyNode::Geometric: return "Geometric";
    case TaxonomyNode::Kinematic: return "Kinematic";
    case TaxonomyNode::Speed: return "Speed";
    case TaxonomyNode::Acceleration: return "Acceleration";
    case TaxonomyNode::Curvature: return "Curvature";
    case TaxonomyNode::Indentation: return "Indentation";
  }
  return "Geometric";
}

std::optional<TaxonomyNode> parse_taxonomy_node(std::string_view name) noexcept {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (auto node : kTaxonomyNodes)
    if (to_string(node) == lower) return node;
  return std::nullopt;
}

std::optional<TaxonomyNode> parent(TaxonomyNode node) noexcept {
  switch (node) {
    case TaxonomyNode::Speed:
    case TaxonomyNode::Acceleration: return TaxonomyNode::Kinematic;
    case TaxonomyNode::Curvature:
    case TaxonomyNode::Indentation: return TaxonomyNode::Geometric;
    default: return std::nullopt;
  }
}

bool is_root(TaxonomyNode node) noexcept { return !parent(node).has_value(); }

TaxonomyNode family(TaxonomyNode node) noexcept { return parent(node).value_or(node); }

std::string to_string(const Combination& combo) {
  auto a = to_string(combo.x_node);
  auto b = to_string(combo.y_node);
  if (b < a) std::swap(a, b);
  return std::string(a) + "-" + std::string(b);
}

const std::array<Combination, 7>& valid_combinations() noexcept {
  using N = TaxonomyNode;
  static const std::array<Combination, 7> combos = {{
      {N::Kinematic, N::Geometric},
      {N::Acceleration, N::Speed},
      {N::Curvature, N::Indentation},
      {N::Speed, N::Curvature},
      {N::Speed, N::Indentation},
      {N::Acceleration, N::Curvature},
      {N::Acceleration, N::Indentation},
  }};
  return combos;
}

std::size_t combination_index(const Combination& combo) noexcept {
  const auto& all = valid_combinations();
  return static_cast<std::size_t>(std::find(all.begin(), all.end(), combo) - all.begin());
}

Combination validate_combination(TaxonomyNode a, TaxonomyNode b) {
  const std::string pair = std::string(to_string(a)) + "-" + std::string(to_string(b));
  if (a == b) {
    throw Error(ErrorCode::InvalidCombination, "'" + pair + "' pairs a node with itself");
  }
  if (parent(a) == b || parent(b) == a) {
    throw Error(ErrorCode::InvalidCombination,
                "'" + pair + "' pairs a parent with one of its own subdivisions");
  }
  for (const auto& c : valid_combinations()) {
    if ((c.x_node == a && c.y_node == b) || (c.x_node == b && c.y_node == a)) return c;
  }
  throw Error(ErrorCode::InvalidCombination,
              "'" + pair + "' mixes a root with a subdivision of the other root");
}

Combination parse_combination(std::string_view text) {
  const auto dash = text.find('-');
  if (dash == std::string_view::npos) {
    throw Error(ErrorCode::InvalidCombination,
                "combination must look like 'node-node', got '" + std::string(text) + "'");
  }
  const auto a = parse_taxonomy_node(text.substr(0, dash));
  const auto b = parse_taxonomy_node(text.substr(dash + 1));
  if (!a || !b) {
    throw Error(ErrorCode::InvalidCombination,
                "unknown taxonomy node in '" + std::string(text) + "'");
  }
  return validate_combination(*a, *b);
}

}  // namespace trajzone
