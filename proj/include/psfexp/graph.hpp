#pragma once

// Combinatorial spider graph of a preperiodic address: one leg per point of
// the postsingular orbit, glued where kneading tails coincide, placed in
// strips by the kneading entries and ordered vertically by the addresses.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psfexp/itinerary.hpp"

namespace psf {

struct SpiderVertex {
  std::size_t index = 0;    // n in e_n, 1-based
  Itinerary tail;           // sigma^{n-1}(K(s))
  Digit strip = 0;          // u_n
  ExternalAddress address;  // sigma^{n-1}(s)

  bool operator==(const SpiderVertex&) const = default;
};

/// Legs of one glued vertex listed in vertical order, which is their cyclic
/// order at infinity; `preserved` records whether the graph map sends it to
/// the cyclic order of the image legs.
struct CyclicOrder {
  std::vector<std::size_t> legs;
  bool preserved = true;

  bool operator==(const CyclicOrder&) const = default;
};

struct SpiderGraph {
  ExternalAddress address;
  Itinerary kneading;
  bool glued = true;
  std::vector<SpiderVertex> vertices;
  std::vector<std::vector<std::size_t>> glue_classes;  // vertex indices, sorted
  std::vector<std::size_t> glue_class_of;              // per vertex (0-based slot)
  std::vector<std::size_t> vertical_order;             // vertex indices, lowest first
  std::vector<Digit> partition_edges;                  // j for each emitted p_j
  std::vector<CyclicOrder> cyclic_orders;              // glued vertices only

  std::size_t size() const noexcept { return vertices.size(); }
  const SpiderVertex& vertex(std::size_t index) const { return vertices.at(index - 1); }
  /// Index of the image vertex under the graph map (wraps l+k -> l+1).
  std::size_t image(std::size_t index) const;

  bool operator==(const SpiderGraph&) const = default;
};

struct LevyWitness {
  std::size_t first = 0;
  std::size_t second = 0;
  std::size_t cycle_length = 0;

  bool operator==(const LevyWitness&) const = default;
};

struct UnlinkingResult {
  bool holds = true;
  // (a1, a1', a2, a2') vertex indices with a1 < a1' < a2 < a2' vertically,
  // a1 ~ a2 and a1' ~ a2' in two different glue classes.
  std::vector<std::array<std::size_t, 4>> violations;
};

enum class GraphFormat { dot, json };

/// Requires a strictly preperiodic address with first entry 0.
SpiderGraph build_graph(const ExternalAddress& s, bool glue = true);

std::optional<LevyWitness> detect_levy(const ExternalAddress& s, bool use_gluing);
std::optional<LevyWitness> detect_levy(const SpiderGraph& g);

UnlinkingResult check_unlinking(const SpiderGraph& g);

GraphFormat parse_graph_format(std::string_view name);
std::string export_graph(const SpiderGraph& g, GraphFormat format);
SpiderGraph graph_from_json(std::string_view text);

}  // namespace psf
