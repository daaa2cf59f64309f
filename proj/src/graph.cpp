#include "psfexp/graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace psf {

using nlohmann::json;

std::size_t SpiderGraph::image(std::size_t index) const {
  const std::size_t n = vertices.size();
  return index < n ? index + 1 : address.preperiod_length() + 1;
}

namespace {

void compute_glue_classes(SpiderGraph& g) {
  const std::size_t n = g.vertices.size();
  g.glue_classes.clear();
  g.glue_class_of.assign(n, 0);
  if (!g.glued) {
    for (std::size_t i = 0; i < n; ++i) {
      g.glue_classes.push_back({i + 1});
      g.glue_class_of[i] = i;
    }
    return;
  }
  std::map<Itinerary, std::size_t> by_tail;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, fresh] = by_tail.try_emplace(g.vertices[i].tail, g.glue_classes.size());
    if (fresh) g.glue_classes.emplace_back();
    g.glue_classes[it->second].push_back(i + 1);
    g.glue_class_of[i] = it->second;
  }
}

void compute_cyclic_orders(SpiderGraph& g) {
  g.cyclic_orders.clear();
  std::vector<std::size_t> rank(g.size() + 1);
  for (std::size_t pos = 0; pos < g.vertical_order.size(); ++pos) rank[g.vertical_order[pos]] = pos;
  auto by_height = [&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; };

  for (const auto& cls : g.glue_classes) {
    if (cls.size() < 2) continue;
    CyclicOrder order{cls, true};
    std::sort(order.legs.begin(), order.legs.end(), by_height);
    // Images must appear in the same cyclic order, i.e. sorting the image
    // legs by height yields a rotation of the mapped sequence.
    std::vector<std::size_t> mapped;
    for (auto leg : order.legs) mapped.push_back(g.image(leg));
    std::vector<std::size_t> sorted = mapped;
    std::sort(sorted.begin(), sorted.end(), by_height);
    bool rotation = false;
    for (std::size_t r = 0; r < mapped.size() && !rotation; ++r) {
      std::vector<std::size_t> rotated = mapped;
      std::rotate(rotated.begin(), rotated.begin() + static_cast<std::ptrdiff_t>(r), rotated.end());
      rotation = rotated == sorted;
    }
    order.preserved = rotation;
    g.cyclic_orders.push_back(std::move(order));
  }
}

}  // namespace

SpiderGraph build_graph(const ExternalAddress& s, bool glue) {
  if (!s.is_preperiodic() || s[1] != 0) {
    throw Error(ErrorKind::precondition,
                "spider graph needs a strictly preperiodic address starting with 0, got " +
                    to_string(s));
  }
  SpiderGraph g;
  g.address = s;
  g.kneading = kneading(s);
  g.glued = glue;

  const std::size_t n = s.preperiod_length() + s.period_length();
  ExternalAddress addr = s;
  Itinerary tail = g.kneading;
  for (std::size_t i = 1; i <= n; ++i) {
    g.vertices.push_back({i, tail, tail[1], addr});
    addr = shift(addr);
    tail = shift(tail);
  }
  compute_glue_classes(g);

  g.vertical_order.resize(n);
  std::iota(g.vertical_order.begin(), g.vertical_order.end(), std::size_t{1});
  std::stable_sort(g.vertical_order.begin(), g.vertical_order.end(),
                   [&](std::size_t a, std::size_t b) { return g.vertex(a).address < g.vertex(b).address; });

  auto [lo, hi] = std::minmax_element(g.vertices.begin(), g.vertices.end(),
                                      [](const auto& a, const auto& b) { return a.strip < b.strip; });
  for (Digit j = lo->strip - 1; j <= hi->strip + 2; ++j) g.partition_edges.push_back(j);

  compute_cyclic_orders(g);
  return g;
}

std::optional<LevyWitness> detect_levy(const SpiderGraph& g) {
  // Two distinct vertices of the (possibly glued) graph with equal itinerary
  // tails are surrounded by a curve of a Levy cycle.
  const std::size_t n = g.size();
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = i + 1; j <= n; ++j) {
      if (g.glue_class_of[i - 1] == g.glue_class_of[j - 1]) continue;
      if (g.vertex(i).tail == g.vertex(j).tail) {
        return LevyWitness{i, j, g.vertex(i).tail.period_length()};
      }
    }
  }
  return std::nullopt;
}

std::optional<LevyWitness> detect_levy(const ExternalAddress& s, bool use_gluing) {
  return detect_levy(build_graph(s, use_gluing));
}

UnlinkingResult check_unlinking(const SpiderGraph& g) {
  UnlinkingResult result;
  std::vector<std::size_t> rank(g.size() + 1);
  for (std::size_t pos = 0; pos < g.vertical_order.size(); ++pos) rank[g.vertical_order[pos]] = pos;

  std::vector<std::vector<std::size_t>> classes;
  for (auto cls : g.glue_classes) {
    if (cls.size() < 2) continue;
    std::sort(cls.begin(), cls.end(), [&](auto a, auto b) { return rank[a] < rank[b]; });
    classes.push_back(std::move(cls));
  }
  for (std::size_t p = 0; p < classes.size(); ++p) {
    for (std::size_t q = 0; q < classes.size(); ++q) {
      if (p == q) continue;
      const auto& A = classes[p];
      const auto& B = classes[q];
      for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = i + 1; j < A.size(); ++j)
          for (std::size_t x = 0; x < B.size(); ++x)
            for (std::size_t y = x + 1; y < B.size(); ++y) {
              if (rank[A[i]] < rank[B[x]] && rank[B[x]] < rank[A[j]] && rank[A[j]] < rank[B[y]]) {
                result.violations.push_back({A[i], B[x], A[j], B[y]});
              }
            }
    }
  }
  result.holds = result.violations.empty();
  return result;
}

GraphFormat parse_graph_format(std::string_view name) {
  if (name == "dot") return GraphFormat::dot;
  if (name == "json") return GraphFormat::json;
  throw Error(ErrorKind::unsupported_format,
              "unsupported graph format \"" + std::string(name) + "\" (expected dot or json)");
}

namespace {

std::string join(const std::vector<std::size_t>& xs, std::string_view sep, std::string_view prefix = "") {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += prefix;
    out += std::to_string(xs[i]);
  }
  return out;
}

std::string to_dot(const SpiderGraph& g) {
  std::ostringstream out;
  out << "graph spider {\n";
  out << "  // address " << to_string(g.address) << ", kneading " << to_string(g.kneading) << "\n";
  out << "  // partition edges p_" << g.partition_edges.front() << " .. p_" << g.partition_edges.back()
      << " (strip n lies between p_n and p_n+1)\n";
  out << "  einf [label=\"e_inf\"];\n";
  for (const auto& cls : g.glue_classes) {
    const std::size_t head = cls.front();
    out << "  e" << head << " [label=\"" << join(cls, "~", "e") << "\"";
    if (cls.size() > 1) {
      std::string cyclic;
      for (const auto& c : g.cyclic_orders) {
        if (std::is_permutation(c.legs.begin(), c.legs.end(), cls.begin(), cls.end())) {
          cyclic = join(c.legs, ",");
        }
      }
      out << ", comment=\"glued " << join(cls, ",") << "; cyclic order " << cyclic << "\"";
    }
    out << "];\n";
  }
  for (const auto& v : g.vertices) {
    const std::size_t head = g.glue_classes[g.glue_class_of[v.index - 1]].front();
    out << "  e" << head << " -- einf [label=\"gamma" << v.index << " strip " << v.strip << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

json to_json_value(const SpiderGraph& g) {
  json j;
  j["address"] = to_string(g.address);
  j["kneading"] = to_string(g.kneading);
  j["preperiod"] = g.address.preperiod_length();
  j["period"] = g.address.period_length();
  j["glued"] = g.glued;
  j["vertices"] = json::array();
  for (const auto& v : g.vertices) {
    j["vertices"].push_back({{"index", v.index},
                             {"address", to_string(v.address)},
                             {"tail", to_string(v.tail)},
                             {"strip", v.strip},
                             {"glue_class", g.glue_class_of[v.index - 1]}});
  }
  j["glue_classes"] = g.glue_classes;
  j["vertical_order"] = g.vertical_order;
  j["partition_edges"] = g.partition_edges;
  j["cyclic_orders"] = json::array();
  for (const auto& c : g.cyclic_orders) {
    j["cyclic_orders"].push_back({{"legs", c.legs}, {"preserved", c.preserved}});
  }
  return j;
}

}  // namespace

std::string export_graph(const SpiderGraph& g, GraphFormat format) {
  switch (format) {
    case GraphFormat::dot: return to_dot(g);
    case GraphFormat::json: return to_json_value(g).dump(2) + "\n";
  }
  throw Error(ErrorKind::unsupported_format, "unsupported graph format");
}

SpiderGraph graph_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    SpiderGraph g;
    g.address = parse_address(j.at("address").get<std::string>());
    g.kneading = parse_itinerary(j.at("kneading").get<std::string>());
    g.glued = j.at("glued").get<bool>();
    for (const auto& v : j.at("vertices")) {
      g.vertices.push_back({v.at("index").get<std::size_t>(),
                            parse_itinerary(v.at("tail").get<std::string>()),
                            v.at("strip").get<Digit>(),
                            parse_address(v.at("address").get<std::string>())});
      g.glue_class_of.push_back(v.at("glue_class").get<std::size_t>());
    }
    g.glue_classes = j.at("glue_classes").get<std::vector<std::vector<std::size_t>>>();
    g.vertical_order = j.at("vertical_order").get<std::vector<std::size_t>>();
    g.partition_edges = j.at("partition_edges").get<std::vector<Digit>>();
    for (const auto& c : j.at("cyclic_orders")) {
      g.cyclic_orders.push_back({c.at("legs").get<std::vector<std::size_t>>(), c.at("preserved").get<bool>()});
    }
    return g;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::syntax, std::string("malformed graph JSON: ") + e.what());
  }
}

}  // namespace psf
