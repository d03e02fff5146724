#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace trajzone {

enum class TaxonomyNode { Geometric, Kinematic, Speed, Acceleration, Curvature, Indentation };

inline constexpr std::array<TaxonomyNode, 6> kTaxonomyNodes = {
    TaxonomyNode::Geometric, TaxonomyNode::Kinematic,  TaxonomyNode::Speed,
    TaxonomyNode::Acceleration, TaxonomyNode::Curvature, TaxonomyNode::Indentation};

/// Lowercase node name, e.g. "curvature".
std::string_view to_string(TaxonomyNode node) noexcept;
/// Display name, e.g. "Curvature".
std::string_view display_name(TaxonomyNode node) noexcept;
/// Case-insensitive.
std::optional<TaxonomyNode> parse_taxonomy_node(std::string_view name) noexcept;

std::optional<TaxonomyNode> parent(TaxonomyNode node) noexcept;
bool is_root(TaxonomyNode node) noexcept;
/// The root a node belongs to (itself for roots).
TaxonomyNode family(TaxonomyNode node) noexcept;

/// Ordered node pair: x_node on the horizontal axis, y_node on the vertical.
struct Combination {
  TaxonomyNode x_node;
  TaxonomyNode y_node;

  friend bool operator==(const Combination&, const Combination&) = default;
};

/// Lowercase hyphenated, nodes in alphabetical order: "acceleration-curvature".
std::string to_string(const Combination& combo);

/// The 7 legal combinations, in heatmap row order.
const std::array<Combination, 7>& valid_combinations() noexcept;

/// Row of `combo` in valid_combinations().
std::size_t combination_index(const Combination& combo) noexcept;

/// Canonical combination for an unordered node pair.
///
/// Axis rule: Kinematic is x for Geometric-Kinematic; across families the
/// Geometric-family node is y; within a family the alphabetically first node
/// is x. Throws Error(InvalidCombination) for a self pair, a parent-child
/// pair, or any other pair outside the legal seven.
Combination validate_combination(TaxonomyNode a, TaxonomyNode b);

/// Parses "a-b" (either order, case-insensitive) and validates it.
Combination parse_combination(std::string_view text);

}  // namespace trajzone
