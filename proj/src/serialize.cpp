#include "psfexp/serialize.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "json.hpp"

namespace psf {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_complex(std::string_view text) {
  throw Error(ErrorKind::syntax, "malformed complex number \"" + std::string(text) +
                                     "\" (expected a+bi, e.g. 0+6.2831853071795862i)");
}

// Parses one real at the start of `s`, returns characters consumed.
std::size_t read_real(std::string_view s, double& out) {
  const std::string buf(s);
  char* end = nullptr;
  errno = 0;
  out = std::strtod(buf.c_str(), &end);
  if (end == buf.c_str() || errno == ERANGE) return 0;
  return static_cast<std::size_t>(end - buf.c_str());
}

template <class Fn>
auto read_json(std::string_view text, const char* what, Fn&& fn) {
  try {
    return fn(ordered::parse(text));
  } catch (const ordered::exception& e) {
    throw Error(ErrorKind::syntax, std::string("malformed ") + what + " JSON: " + e.what());
  }
}

ordered class_value(const AddressClass& c) {
  ordered j;
  j["members"] = ordered::array();
  for (const auto& m : c.members) j["members"].push_back(to_string(m));
  j["kneading"] = to_string(c.kneading);
  j["preperiod"] = c.preperiod;
  j["period"] = c.period;
  j["kneading_period"] = c.kneading_period;
  return j;
}

AddressClass class_from_value(const ordered& j) {
  AddressClass c;
  for (const auto& m : j.at("members")) c.members.push_back(parse_address(m.get<std::string>()));
  c.kneading = parse_itinerary(j.at("kneading").get<std::string>());
  c.preperiod = j.at("preperiod").get<std::size_t>();
  c.period = j.at("period").get<std::size_t>();
  c.kneading_period = j.at("kneading_period").get<std::size_t>();
  return c;
}

ordered sample_value(const ParameterRaySample& s) {
  return ordered{{"t", format_real(s.t)},
                 {"lambda", format_complex(s.lambda)},
                 {"solver_residual", format_real(s.solver_residual)}};
}

ParameterRaySample sample_from_value(const ordered& j) {
  return {parse_real(j.at("t").get<std::string>()),
          parse_complex(j.at("lambda").get<std::string>()),
          parse_real(j.at("solver_residual").get<std::string>())};
}

std::string dump(const ordered& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_complex(Complex z) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
  return buf;
}

double parse_real(std::string_view text) {
  text = trim(text);
  double x = 0.0;
  if (text.empty() || read_real(text, x) != text.size()) {
    throw Error(ErrorKind::syntax, "malformed real number \"" + std::string(text) + "\"");
  }
  return x;
}

Complex parse_complex(std::string_view text) {
  const std::string_view s = trim(text);
  if (s.empty()) bad_complex(text);
  if (s.back() != 'i') return {parse_real(s), 0.0};
  const std::string_view body = s.substr(0, s.size() - 1);
  if (body.empty() || body == "+" || body == "-") {
    return {0.0, body == "-" ? -1.0 : 1.0};
  }
  double re = 0.0;
  const std::size_t n = read_real(body, re);
  if (n == 0) bad_complex(text);
  if (n == body.size()) return {0.0, re};  // pure imaginary "bi"
  const std::string_view rest = body.substr(n);
  if (rest.front() != '+' && rest.front() != '-') bad_complex(text);
  double im = 0.0;
  if (rest.size() == 1) {
    im = rest.front() == '-' ? -1.0 : 1.0;
  } else if (read_real(rest, im) != rest.size()) {
    bad_complex(text);
  }
  return {re, im};
}

std::string format_order(const OrderData& order) {
  std::string out;
  for (auto r : order.relations) {
    if (!out.empty()) out += ' ';
    out += r < 0 ? '<' : (r > 0 ? '>' : '=');
  }
  return out;
}

OrderData parse_order(std::string_view text) {
  OrderData order;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') continue;
    if (c == '<') order.relations.push_back(std::strong_ordering::less);
    else if (c == '>') order.relations.push_back(std::strong_ordering::greater);
    else if (c == '=') order.relations.push_back(std::strong_ordering::equal);
    else {
      throw Error(ErrorKind::syntax, "malformed order data \"" + std::string(text) +
                                         "\" (expected a list of <, > or =, e.g. \"> < <\")");
    }
  }
  return order;
}

std::string to_json(const AddressClass& c) { return dump(class_value(c)); }

AddressClass address_class_from_json(std::string_view text) {
  return read_json(text, "class", [](const ordered& j) { return class_from_value(j); });
}

std::string to_json(const ClassReport& r) {
  const AddressClass& c = r.address_class;
  ordered j;
  j["address"] = to_string(r.address);
  j["kneading"] = to_string(c.kneading);
  j["l"] = c.preperiod;
  j["k"] = c.period;
  j["k_prime"] = c.kneading_period;
  j["members"] = ordered::array();
  for (const auto& m : c.members) j["members"].push_back(to_string(m));
  j["checks"] = {{"itinerary_conditions_agree", r.itinerary_conditions_agree},
                 {"pairwise_equivalent", r.pairwise_equivalent},
                 {"equal_shapes", r.equal_shapes},
                 {"size_law", r.size_law},
                 {"pullback_subset", r.pullback_subset},
                 {"violations", r.violations}};
  return dump(j);
}

ClassReport class_report_from_json(std::string_view text) {
  return read_json(text, "class report", [](const ordered& j) {
    ClassReport r;
    r.address = parse_address(j.at("address").get<std::string>());
    AddressClass& c = r.address_class;
    c.kneading = parse_itinerary(j.at("kneading").get<std::string>());
    c.preperiod = j.at("l").get<std::size_t>();
    c.period = j.at("k").get<std::size_t>();
    c.kneading_period = j.at("k_prime").get<std::size_t>();
    for (const auto& m : j.at("members")) c.members.push_back(parse_address(m.get<std::string>()));
    const auto& checks = j.at("checks");
    r.itinerary_conditions_agree = checks.at("itinerary_conditions_agree").get<bool>();
    r.pairwise_equivalent = checks.at("pairwise_equivalent").get<bool>();
    r.equal_shapes = checks.at("equal_shapes").get<bool>();
    r.size_law = checks.at("size_law").get<bool>();
    r.pullback_subset = checks.at("pullback_subset").get<bool>();
    r.violations = checks.at("violations").get<std::size_t>();
    return r;
  });
}

std::string to_json(const RayTrace& r) {
  ordered j;
  j["lambda"] = format_complex(r.lambda);
  j["address"] = to_string(r.address);
  j["potential"] = format_real(r.potential);
  j["depth"] = r.depth;
  j["point"] = format_complex(r.point);
  j["tail_error_bound"] = format_real(r.tail_error_bound);
  j["tail_error_bound_kind"] = "heuristic";
  return dump(j);
}

RayTrace ray_trace_from_json(std::string_view text) {
  return read_json(text, "ray trace", [](const ordered& j) {
    RayTrace r;
    r.lambda = parse_complex(j.at("lambda").get<std::string>());
    r.address = parse_address(j.at("address").get<std::string>());
    r.potential = parse_real(j.at("potential").get<std::string>());
    r.depth = j.at("depth").get<std::size_t>();
    r.point = parse_complex(j.at("point").get<std::string>());
    r.tail_error_bound = parse_real(j.at("tail_error_bound").get<std::string>());
    return r;
  });
}

std::string to_json(const ConvergenceClass& c) {
  ordered j;
  j["class"] = std::string(to_string(c.tag));
  j["fixed_point"] = format_complex(c.fixed_point);
  j["preperiod"] = c.preperiod;
  j["period"] = c.period;
  j["escape_iterate"] = c.escape_iterate;
  return dump(j);
}

ConvergenceClass convergence_from_json(std::string_view text) {
  return read_json(text, "convergence", [](const ordered& j) {
    ConvergenceClass c;
    c.tag = parse_convergence_tag(j.at("class").get<std::string>());
    c.fixed_point = parse_complex(j.at("fixed_point").get<std::string>());
    c.preperiod = j.at("preperiod").get<std::size_t>();
    c.period = j.at("period").get<std::size_t>();
    c.escape_iterate = j.at("escape_iterate").get<std::size_t>();
    return c;
  });
}

std::string to_json(const ParameterRaySample& s) { return dump(sample_value(s)); }

ParameterRaySample ray_sample_from_json(std::string_view text) {
  return read_json(text, "ray sample", [](const ordered& j) { return sample_from_value(j); });
}

std::string to_json(const PsfParameter& p) {
  ordered j;
  j["address"] = to_string(p.address);
  j["lambda"] = format_complex(p.lambda);
  j["preperiod"] = p.l;
  j["period"] = p.k;
  j["orbit_period"] = p.orbit_period;
  j["class"] = class_value(p.address_class);
  j["newton_residual"] = format_real(p.newton_residual);
  j["landing_gap"] = format_real(p.landing_gap);
  j["dynamic_landing_residual"] = format_real(p.dynamic_landing_residual);
  j["landing_profile"] = ordered::array();
  for (const auto& s : p.landing_profile) {
    j["landing_profile"].push_back({{"t", format_real(s.t)}, {"residual", format_real(s.residual)}});
  }
  j["path"] = ordered::array();
  for (const auto& s : p.path) j["path"].push_back(sample_value(s));
  return dump(j);
}

PsfParameter psf_parameter_from_json(std::string_view text) {
  return read_json(text, "parameter", [](const ordered& j) {
    PsfParameter p;
    p.address = parse_address(j.at("address").get<std::string>());
    p.lambda = parse_complex(j.at("lambda").get<std::string>());
    p.l = j.at("preperiod").get<std::size_t>();
    p.k = j.at("period").get<std::size_t>();
    p.orbit_period = j.at("orbit_period").get<std::size_t>();
    p.address_class = class_from_value(j.at("class"));
    p.newton_residual = parse_real(j.at("newton_residual").get<std::string>());
    p.landing_gap = parse_real(j.at("landing_gap").get<std::string>());
    p.dynamic_landing_residual = parse_real(j.at("dynamic_landing_residual").get<std::string>());
    for (const auto& s : j.at("landing_profile")) {
      p.landing_profile.push_back({parse_real(s.at("t").get<std::string>()),
                                   parse_real(s.at("residual").get<std::string>())});
    }
    for (const auto& s : j.at("path")) p.path.push_back(sample_from_value(s));
    return p;
  });
}

std::string to_json(const AddressSearchResult& r) {
  ordered j;
  j["candidates"] = r.candidates;
  j["matches"] = ordered::array();
  for (const auto& m : r.matches) j["matches"].push_back(to_string(m));
  j["failures"] = ordered::array();
  for (const auto& m : r.failures) j["failures"].push_back(to_string(m));
  return dump(j);
}

AddressSearchResult address_search_from_json(std::string_view text) {
  return read_json(text, "address search", [](const ordered& j) {
    AddressSearchResult r;
    r.candidates = j.at("candidates").get<std::size_t>();
    for (const auto& m : j.at("matches")) r.matches.push_back(parse_address(m.get<std::string>()));
    for (const auto& m : j.at("failures")) r.failures.push_back(parse_address(m.get<std::string>()));
    return r;
  });
}

std::string to_json(const DistinctnessReport& r) {
  ordered j;
  j["representatives"] = ordered::array();
  for (const auto& a : r.representatives) j["representatives"].push_back(to_string(a));
  j["parameters"] = ordered::array();
  for (const auto& p : r.parameters) j["parameters"].push_back(format_complex(p));
  j["distances"] = ordered::array();
  for (const auto& row : r.distances) {
    ordered out = ordered::array();
    for (double d : row) out.push_back(format_real(d));
    j["distances"].push_back(out);
  }
  j["min_distance"] = format_real(r.min_distance);
  j["collisions"] = r.collisions;
  return dump(j);
}

DistinctnessReport distinctness_from_json(std::string_view text) {
  return read_json(text, "distinctness", [](const ordered& j) {
    DistinctnessReport r;
    for (const auto& a : j.at("representatives")) r.representatives.push_back(parse_address(a.get<std::string>()));
    for (const auto& p : j.at("parameters")) r.parameters.push_back(parse_complex(p.get<std::string>()));
    for (const auto& row : j.at("distances")) {
      std::vector<double> out;
      for (const auto& d : row) out.push_back(parse_real(d.get<std::string>()));
      r.distances.push_back(std::move(out));
    }
    r.min_distance = parse_real(j.at("min_distance").get<std::string>());
    r.collisions = j.at("collisions").get<std::vector<std::array<std::size_t, 2>>>();
    return r;
  });
}

std::string samples_to_csv(const std::vector<ParameterRaySample>& samples) {
  std::string out = "t,re,im,residual\n";
  for (const auto& s : samples) {
    out += format_real(s.t) + "," + format_real(s.lambda.real()) + "," + format_real(s.lambda.imag()) +
           "," + format_real(s.solver_residual) + "\n";
  }
  return out;
}

std::vector<ParameterRaySample> samples_from_csv(std::string_view text) {
  std::vector<ParameterRaySample> out;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || trim(line) != "t,re,im,residual") {
    throw Error(ErrorKind::syntax, "ray sample CSV must start with the header t,re,im,residual");
  }
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::istringstream row(line);
    for (std::string cell; std::getline(row, cell, ',');) cells.push_back(cell);
    if (cells.size() != 4) throw Error(ErrorKind::syntax, "ray sample CSV row needs 4 fields: " + line);
    out.push_back({parse_real(cells[0]), {parse_real(cells[1]), parse_real(cells[2])}, parse_real(cells[3])});
  }
  return out;
}

std::string error_to_json(const Error& e) {
  ordered j;
  j["error"] = std::string(to_string(e.kind()));
  if (e.kind() == ErrorKind::stage_failure) {
    j["stage"] = e.stage();
    j["cause"] = std::string(to_string(e.cause()));
  }
  j["message"] = e.what();
  return dump(j);
}

}  // namespace psf
