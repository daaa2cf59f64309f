#include "psfexp/cli.hpp"

#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "psfexp/classify.hpp"
#include "psfexp/graph.hpp"
#include "psfexp/itinerary.hpp"
#include "psfexp/numerics.hpp"
#include "psfexp/pararay.hpp"
#include "psfexp/serialize.hpp"

namespace psf::cli {

const char* version() { return "psfexp 1.0.0"; }

namespace {

enum class Format { human, json };

struct Options {
  Format format = Format::human;
  bool verbose = false;

  std::string address;
  std::string pivot;
  std::string kneading_text;
  std::string order_text;
  bool with_order = false;

  std::string graph_format = "dot";
  bool no_glue = false;

  std::string lambda_text;
  double t = 1.0;
  std::optional<double> param_t;
  std::size_t ray_index = 0;

  double t_start = 20.0;
  double t_stop = 1e-3;
  double tolerance = 1e-12;

  std::size_t l = 1;
  std::size_t k = 1;
  Digit bound = 3;
  unsigned threads = 1;

  std::vector<double> rect{-4.0, 4.0, -4.0, 4.0};
  std::size_t width = 200;
  std::size_t height = 200;
  std::size_t max_iter = 500;
  double conv_tol = 1e-9;
  std::string pgm_path;
  std::string csv_path;
};

void write_file(const std::string& path, const std::string& data) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::invalid_argument, "cannot open output file " + path);
  f << data;
  if (!f) throw Error(ErrorKind::resource, "failed writing " + path);
}

std::string json_line(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

FindConfig find_config(const Options& o) {
  FindConfig c;
  c.schedule.t_start = o.t_start;
  c.schedule.t_stop = o.t_stop;
  c.newton.tolerance = o.tolerance;
  return c;
}

void cmd_itinerary(const Options& o, std::ostream& out) {
  const ExternalAddress s = parse_address(o.address);
  const ExternalAddress t = parse_address(o.pivot);
  require_itinerary_defined(s, t);
  const Itinerary u = itinerary_by_algorithm(s, t);
  if (o.format == Format::json) {
    out << json_line({{"address", to_string(s)}, {"pivot", to_string(t)}, {"itinerary", to_string(u)}});
  } else {
    out << to_string(u) << "\n";
  }
}

void cmd_kneading(const Options& o, std::ostream& out) {
  const ExternalAddress s = parse_address(o.address);
  const Itinerary u = kneading(s);
  if (o.format == Format::json) {
    out << json_line({{"address", to_string(s)},
                      {"kneading", to_string(u)},
                      {"order", format_order(order_data(s))}});
  } else {
    out << to_string(u) << "\n";
    if (o.with_order) out << format_order(order_data(s)) << "\n";
  }
}

void cmd_recover(const Options& o, std::ostream& out) {
  const Itinerary u = parse_itinerary(o.kneading_text);
  const OrderData order = parse_order(o.order_text);
  const ExternalAddress s = recover_address(u, order);
  if (o.format == Format::json) {
    out << json_line({{"kneading", to_string(u)}, {"order", format_order(order)}, {"address", to_string(s)}});
  } else {
    out << to_string(s) << "\n";
  }
}

void cmd_classify(const Options& o, std::ostream& out) {
  const ClassReport r = class_invariants_report(parse_address(o.address));
  if (o.format == Format::json) {
    out << to_json(r);
    return;
  }
  const auto& c = r.address_class;
  out << "address " << to_string(r.address) << "\n";
  out << "kneading " << to_string(c.kneading) << "\n";
  out << "shape l=" << c.preperiod << " k=" << c.period << " k'=" << c.kneading_period << "\n";
  out << "members " << c.members.size() << "\n";
  for (const auto& m : c.members) out << "  " << to_string(m) << "\n";
  out << "invariants " << (r.violations == 0 ? "ok" : "violated") << " (" << r.violations
      << " violations)\n";
}

void cmd_graph(const Options& o, std::ostream& out) {
  const ExternalAddress s = parse_address(o.address);
  const SpiderGraph g = build_graph(s, !o.no_glue);
  const GraphFormat format = o.format == Format::json ? GraphFormat::json : parse_graph_format(o.graph_format);
  const UnlinkingResult unlink = check_unlinking(g);
  const auto levy = detect_levy(g);
  if (format == GraphFormat::json) {
    auto j = nlohmann::ordered_json::parse(export_graph(g, format));
    j["unlinking"] = unlink.holds;
    j["unlinking_violations"] = unlink.violations;
    if (levy) {
      j["levy"] = {{"first", levy->first}, {"second", levy->second}, {"cycle_length", levy->cycle_length}};
    } else {
      j["levy"] = nullptr;
    }
    out << json_line(j);
    return;
  }
  out << "// unlinking " << (unlink.holds ? "holds" : "violated") << "\n";
  if (levy) {
    out << "// levy witness e" << levy->first << " e" << levy->second << " cycle length "
        << levy->cycle_length << "\n";
  } else {
    out << "// levy none\n";
  }
  out << export_graph(g, format);
}

void cmd_trace_ray(const Options& o, std::ostream& out) {
  const ExternalAddress s = parse_address(o.address);
  RayTracer tracer(parse_complex(o.lambda_text), s);
  const RayTrace r = tracer.trace(o.t, o.ray_index);
  if (o.format == Format::json) {
    out << to_json(r);
    return;
  }
  out << "point " << format_complex(r.point) << "\n";
  out << "depth " << r.depth << "\n";
  out << "tail_error_bound " << format_real(r.tail_error_bound) << " (heuristic)\n";
}

void cmd_trace_param(const Options& o, std::ostream& out) {
  const ExternalAddress s = parse_address(o.address);
  std::vector<ParameterRaySample> samples;
  if (o.param_t) {
    samples.push_back(trace_parameter_ray(s, *o.param_t));
  } else {
    ContinuationSchedule schedule;
    schedule.t_start = o.t_start;
    schedule.t_stop = o.t_stop;
    samples = land_parameter_ray(s, schedule).path;
  }
  if (o.format == Format::json) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& x : samples) j.push_back(nlohmann::ordered_json::parse(to_json(x)));
    out << json_line(j);
  } else {
    out << samples_to_csv(samples);
  }
}

void cmd_find_lambda(const Options& o, std::ostream& out) {
  const PsfParameter p = find_lambda(parse_address(o.address), find_config(o));
  if (o.format == Format::json) {
    out << to_json(p);
    return;
  }
  out << "address " << to_string(p.address) << "\n";
  out << "lambda " << format_complex(p.lambda) << "\n";
  out << "shape l=" << p.l << " k=" << p.k << " orbit period=" << p.orbit_period << "\n";
  out << "class";
  for (const auto& m : p.address_class.members) out << " [" << to_string(m) << "]";
  out << "\n";
  out << "newton_residual " << format_real(p.newton_residual) << "\n";
  out << "landing_gap " << format_real(p.landing_gap) << "\n";
  out << "dynamic_landing_residual " << format_real(p.dynamic_landing_residual) << "\n";
}

void cmd_address_search(const Options& o, std::ostream& out) {
  const AddressSearchResult r =
      address_search(parse_complex(o.lambda_text), o.l, o.k, o.bound, find_config(o), o.threads);
  if (o.format == Format::json) {
    out << to_json(r);
    return;
  }
  out << "candidates " << r.candidates << "\n";
  for (const auto& m : r.matches) out << "match " << to_string(m) << "\n";
  for (const auto& m : r.failures) out << "failed " << to_string(m) << "\n";
}

void cmd_scan(const Options& o, std::ostream& out) {
  if (o.rect.size() != 4) throw Error(ErrorKind::invalid_argument, "--rect needs re_min,re_max,im_min,im_max");
  const Rect rect{o.rect[0], o.rect[1], o.rect[2], o.rect[3]};
  ConvergenceConfig config;
  config.max_iterations = o.max_iter;
  config.tolerance = o.conv_tol;
  const ScanResult scan = scan_parameter_plane(rect, o.width, o.height, config, o.threads);
  if (!o.pgm_path.empty()) write_file(o.pgm_path, scan_to_pgm(scan));
  if (!o.csv_path.empty()) write_file(o.csv_path, scan_to_csv(scan));
  std::map<std::string, std::size_t> counts;
  for (const auto& c : scan.cells) ++counts[std::string(to_string(c.tag))];
  if (o.format == Format::json) {
    out << json_line({{"width", o.width}, {"height", o.height}, {"counts", counts}});
    return;
  }
  if (o.pgm_path.empty() && o.csv_path.empty()) {
    out << scan_to_csv(scan);
    return;
  }
  for (const auto& [tag, n] : counts) out << tag << " " << n << "\n";
}

void cmd_classify_convergence(const Options& o, std::ostream& out) {
  ConvergenceConfig config;
  config.max_iterations = o.max_iter;
  config.tolerance = o.conv_tol;
  const ConvergenceClass c = classify_convergence(parse_complex(o.lambda_text), config);
  if (o.format == Format::json) {
    out << to_json(c);
    return;
  }
  out << to_string(c.tag);
  switch (c.tag) {
    case ConvergenceTag::attracting_or_parabolic: out << " mu=" << format_complex(c.fixed_point); break;
    case ConvergenceTag::eventually_constant: out << " l=" << c.preperiod << " k=" << c.period; break;
    case ConvergenceTag::escaping: out << " n=" << c.escape_iterate; break;
    default: break;
  }
  out << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Postsingularly finite exponential maps: symbolic and numeric tools", "psfexp"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--format", o.format, "Output format")
      ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"human", Format::human},
                                                                        {"json", Format::json}}));
  app.add_flag("--verbose", o.verbose, "Print the version to stderr");

  auto* itin = app.add_subcommand("itinerary", "It(s|t)");
  itin->add_option("address", o.address, "Address s, e.g. \"1 (2)\"")->required();
  itin->add_option("pivot", o.pivot, "Pivot t, e.g. \"0 (1)\"")->required();

  auto* knead = app.add_subcommand("kneading", "Kneading sequence K(s)");
  knead->add_option("address", o.address, "Strictly preperiodic address")->required();
  knead->add_flag("--order", o.with_order, "Also print the order of sigma^n(s) against s");

  auto* rec = app.add_subcommand("recover", "Address from kneading sequence and order data");
  rec->add_option("kneading", o.kneading_text, "Kneading sequence, e.g. \"0 (2 1)\"")->required();
  rec->add_option("order", o.order_text, "Relations of sigma^n(s) to s for n = 1..l+k, e.g. \"> <\"")
      ->required();

  auto* cls = app.add_subcommand("classify", "Equivalence class and its invariants");
  cls->add_option("address", o.address, "Strictly preperiodic address with s_1 = 0")->required();

  auto* graph = app.add_subcommand("graph", "Spider graph export");
  graph->add_option("address", o.address, "Strictly preperiodic address with s_1 = 0")->required();
  graph->add_option("--graph-format", o.graph_format, "dot or json");
  graph->add_flag("--no-glue", o.no_glue, "Do not glue legs with equal kneading tails");

  auto* tray = app.add_subcommand("trace-ray", "Dynamic ray g_s(t)");
  tray->add_option("address", o.address, "External address")->required();
  tray->add_option("--lambda", o.lambda_text, "Parameter as a+bi")->required();
  tray->add_option("--t", o.t, "Potential t > 0");
  tray->add_option("--shift", o.ray_index, "Trace sigma^m(s) instead of s");

  auto* tparam = app.add_subcommand("trace-param", "Parameter ray G_s");
  tparam->add_option("address", o.address, "Strictly preperiodic address with s_1 = 0")->required();
  tparam->add_option("--t", o.param_t, "Single potential; default follows the ray to its landing point");
  tparam->add_option("--t-start", o.t_start, "Continuation start potential");
  tparam->add_option("--t-stop", o.t_stop, "Continuation end potential");

  auto* find = app.add_subcommand("find-lambda", "Postsingularly finite parameter of an address");
  find->add_option("address", o.address, "Strictly preperiodic address with s_1 = 0")->required();
  find->add_option("--t-start", o.t_start, "Continuation start potential");
  find->add_option("--t-stop", o.t_stop, "Continuation end potential");
  find->add_option("--tol", o.tolerance, "Newton tolerance on |z_{l+k} - z_l|");

  auto* search = app.add_subcommand("address-search", "Addresses whose parameter is lambda");
  search->add_option("--lambda", o.lambda_text, "Parameter as a+bi")->required();
  search->add_option("--l", o.l, "Preperiod")->required();
  search->add_option("--k", o.k, "Period")->required();
  search->add_option("--bound", o.bound, "Entry bound");
  search->add_option("--threads", o.threads, "Worker threads");

  auto* scan = app.add_subcommand("scan", "Convergence classes over a parameter rectangle");
  scan->add_option("--rect", o.rect, "re_min,re_max,im_min,im_max")->delimiter(',')->expected(4);
  scan->add_option("--width", o.width, "Columns");
  scan->add_option("--height", o.height, "Rows");
  scan->add_option("--max-iter", o.max_iter, "Orbit length");
  scan->add_option("--tol", o.conv_tol, "Coincidence tolerance");
  scan->add_option("--threads", o.threads, "Worker threads");
  scan->add_option("--pgm", o.pgm_path, "Write an 8-bit PGM image");
  scan->add_option("--csv", o.csv_path, "Write per-pixel CSV");

  auto* conv = app.add_subcommand("classify-convergence", "Fate of the singular orbit");
  conv->add_option("--lambda", o.lambda_text, "Parameter as a+bi")->required();
  conv->add_option("--max-iter", o.max_iter, "Orbit length");
  conv->add_option("--tol", o.conv_tol, "Coincidence tolerance");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }
  if (o.verbose) err << version() << "\n";

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (name == "itinerary") cmd_itinerary(o, out);
    else if (name == "kneading") cmd_kneading(o, out);
    else if (name == "recover") cmd_recover(o, out);
    else if (name == "classify") cmd_classify(o, out);
    else if (name == "graph") cmd_graph(o, out);
    else if (name == "trace-ray") cmd_trace_ray(o, out);
    else if (name == "trace-param") cmd_trace_param(o, out);
    else if (name == "find-lambda") cmd_find_lambda(o, out);
    else if (name == "address-search") cmd_address_search(o, out);
    else if (name == "scan") cmd_scan(o, out);
    else if (name == "classify-convergence") cmd_classify_convergence(o, out);
  } catch (const Error& e) {
    if (o.format == Format::json) {
      err << error_to_json(e);
    } else {
      err << "error[" << to_string(e.kind()) << "]";
      if (e.kind() == ErrorKind::stage_failure) err << "[" << to_string(e.cause()) << "]";
      err << ": " << e.what() << "\n";
    }
    return kExitDomain;
  }
  return kExitOk;
}

}  // namespace psf::cli
