#include "quickinv/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "quickinv/errors.hpp"
#include "quickinv/report_io.hpp"

namespace quickinv::cli {

using nlohmann::json;

namespace {

std::vector<std::string> split(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    std::string item(text.substr(pos, comma - pos));
    if (!item.empty()) out.push_back(item);
    pos = comma + 1;
  }
  return out;
}

double parse_double(std::string_view s, std::string_view what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(s), &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw UsageError("invalid " + std::string(what) + ": '" + std::string(s) + "'");
  }
}

OutputFormat parse_format(std::string_view s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  if (s == "both") return OutputFormat::Both;
  throw UsageError("format must be csv, json or both");
}

bool wants_json(OutputFormat f) { return f != OutputFormat::Csv; }
bool wants_csv(OutputFormat f) { return f != OutputFormat::Json; }

std::filesystem::path prepare(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw Error("cannot create output directory " + cfg.out_dir.string() + ": " + ec.message());
  return cfg.out_dir;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  f << content;
  if (!f) throw Error("cannot write " + path.string());
}

std::string report_stem(const IdentityReport& r) {
  return std::string(to_string(r.identity)) + "_" + r.function_id;
}

int exit_code(const std::vector<IdentityReport>& reports) {
  bool doubt = false;
  for (const IdentityReport& r : reports) {
    if (r.verdict == Verdict::Fail) return kExitFail;
    if (r.verdict == Verdict::Inconclusive) doubt = true;
  }
  return doubt ? kExitInconclusive : kExitPass;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

GridSpec GridSpec::parse(std::string_view text) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t colon = text.find(':', pos);
    parts.emplace_back(text.substr(pos, colon == std::string_view::npos ? std::string_view::npos : colon - pos));
    if (colon == std::string_view::npos) break;
    pos = colon + 1;
  }
  if (parts.size() < 3 || parts.size() > 4) throw UsageError("grid must be start:stop:count[:geom]");
  GridSpec g;
  g.start = parse_double(parts[0], "grid start");
  g.stop = parse_double(parts[1], "grid stop");
  const double count = parse_double(parts[2], "grid count");
  if (count != std::floor(count) || count < 1 || count > 1e6) throw UsageError("grid count must be an integer >= 1");
  g.count = static_cast<int>(count);
  if (parts.size() == 4) {
    if (parts[3] != "geom") throw UsageError("grid spacing flag must be 'geom'");
    g.geometric = true;
  }
  if (!(g.start > 0.0) || !(g.stop > 0.0)) throw UsageError("grid points must be positive");
  return g;
}

std::vector<double> GridSpec::points() const {
  std::vector<double> v;
  for (int i = 0; i < count; ++i) {
    if (count == 1) {
      v.push_back(start);
    } else if (geometric) {
      v.push_back(start * std::pow(stop / start, static_cast<double>(i) / (count - 1)));
    } else {
      v.push_back(start + (stop - start) * i / (count - 1));
    }
  }
  return v;
}

void RunConfig::validate() const {
  try {
    verify_config().validate();
  } catch (const InvalidConfig& e) {
    throw UsageError(e.what());
  }
  if (workers < 1) throw UsageError("workers must be >= 1");
}

VerifyConfig RunConfig::verify_config() const {
  VerifyConfig v;
  v.quad = quad;
  v.grid = grid;
  v.tol = tol;
  v.floor = floor;
  return v;
}

json RunConfig::effective() const {
  const VerifyConfig v = verify_config();
  return {
      {"quad",
       {{"rel_tol", quad.rel_tol},
        {"abs_tol", quad.abs_tol},
        {"max_subdiv", quad.max_subdiv},
        {"max_halfperiods", quad.max_halfperiods},
        {"accel_order", quad.accel_order},
        {"trunc_safety", quad.trunc_safety}}},
      {"grid", grid},
      {"tol", tol},
      {"floor", floor},
      {"prop1_eps", v.prop1_eps},
      {"prop1_tol", v.prop1_tol},
      {"prop2_radii", v.prop2_radii},
      {"tail_cutoffs", v.tail_cutoffs},
      {"tail_x", v.tail_x},
      {"tail_tol", v.tail_tol},
      {"decay_points", v.decay_points},
  };
}

void RunConfig::merge(const json& j) {
  if (!j.is_object()) throw UsageError("config: top level must be an object");
  try {
    for (const auto& [key, val] : j.items()) {
      if (key == "quad") {
        if (!val.is_object()) throw UsageError("config: quad must be an object");
        for (const auto& [k, v] : val.items()) {
          if (k == "rel_tol") quad.rel_tol = v.get<double>();
          else if (k == "abs_tol") quad.abs_tol = v.get<double>();
          else if (k == "max_subdiv") quad.max_subdiv = v.get<int>();
          else if (k == "max_halfperiods") quad.max_halfperiods = v.get<int>();
          else if (k == "accel_order") quad.accel_order = v.get<int>();
          else if (k == "trunc_safety") quad.trunc_safety = v.get<double>();
          else throw UsageError("config: unknown quad key '" + k + "'");
        }
      } else if (key == "grid") {
        grid = val.is_string() ? GridSpec::parse(val.get<std::string>()).points() : val.get<std::vector<double>>();
      } else if (key == "tol") {
        tol = val.get<double>();
      } else if (key == "floor") {
        floor = val.get<double>();
      } else if (key == "out") {
        out_dir = val.get<std::string>();
      } else if (key == "format") {
        format = parse_format(val.get<std::string>());
      } else if (key == "workers") {
        workers = val.get<int>();
      } else {
        throw UsageError("config: unknown key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
}

std::filesystem::path default_out_dir() {
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') return env;
  return "quickinv_out";
}

std::vector<IdentityId> select_identities(std::string_view text) {
  if (text == "all") return all_identities();
  std::vector<IdentityId> ids;
  for (const std::string& name : split(text)) {
    const auto id = parse_identity(name);
    if (!id) {
      std::string valid;
      for (IdentityId i : all_identities()) valid += " " + std::string(to_string(i));
      throw UsageError("unknown identity '" + name + "'; valid:" + valid);
    }
    ids.push_back(*id);
  }
  return ids;
}

std::vector<TestFunction> select_functions(std::string_view text) {
  if (text == "all") return builtin_corpus();
  std::vector<TestFunction> fns;
  for (const std::string& name : split(text)) {
    const TestFunction* f = find_function(name);
    if (f == nullptr) {
      std::string valid;
      for (const TestFunction& g : builtin_corpus()) valid += " " + g.id;
      throw UsageError("unknown function '" + name + "'; valid:" + valid + " zero");
    }
    fns.push_back(*f);
  }
  return fns;
}

int cmd_list(const std::vector<TestFunction>& functions, std::ostream& out) {
  out << "id,formula,condition_1_1,s_at_0_is_0,zero_mean,closed_forms\n";
  for (const TestFunction& f : functions) {
    std::string forms;
    auto add = [&forms](bool present, const char* name) {
      if (!present) return;
      if (!forms.empty()) forms += ';';
      forms += name;
    };
    add(f.closed_laplace.has_value(), "laplace");
    add(f.closed_laplace_complex.has_value(), "laplace_complex");
    add(f.closed_fcos.has_value(), "fourier_cos");
    add(f.closed_fsin.has_value(), "fourier_sin");
    add(f.closed_halffourier.has_value(), "half_fourier");
    out << csv_field(f.id) << ',' << csv_field(f.formula) << ',' << std::boolalpha << f.satisfies_11 << ','
        << f.s_at_0_is_0 << ',' << f.zero_mean << ',' << forms << '\n';
  }
  return kExitPass;
}

int cmd_check(const std::vector<IdentityId>& ids, const std::vector<TestFunction>& functions,
              const RunConfig& cfg, std::ostream& out) {
  const std::vector<IdentityReport> reports = run_suite(ids, functions, cfg.verify_config(), cfg.workers);
  const std::filesystem::path dir = prepare(cfg);
  const json config = cfg.effective();
  for (const IdentityReport& r : reports) {
    if (wants_json(cfg.format)) write_file(dir / (report_stem(r) + ".json"), dump_json(report_to_json(r, config)));
    if (wants_csv(cfg.format)) {
      std::ostringstream os;
      write_plot_csv(os, r);
      write_file(dir / (report_stem(r) + ".csv"), os.str());
    }
  }
  std::ostringstream summary;
  write_summary_csv(summary, reports);
  if (wants_csv(cfg.format)) write_file(dir / "summary.csv", summary.str());
  out << summary.str();
  return exit_code(reports);
}

int cmd_invert(const InversionMethod& method, const TestFunction& f, const RunConfig& cfg, std::ostream& out) {
  const InversionResult r = invert_grid(method, f, cfg.grid, cfg.quad);
  std::ostringstream os;
  write_inversion_csv(os, r, f.id);
  const std::filesystem::path dir = prepare(cfg);
  write_file(dir / ("invert_" + std::string(to_string(method.kind)) + "_" + f.id + ".csv"), os.str());
  out << os.str();
  for (const std::string& e : r.errors) {
    if (!e.empty()) return kExitRuntime;
  }
  return kExitPass;
}

int cmd_bench(const std::vector<IdentityId>& ids, const std::vector<TestFunction>& functions,
              const RunConfig& cfg, std::ostream& out) {
  const VerifyConfig vc = cfg.verify_config();
  std::ostringstream table;
  table << "identity,function,wall_seconds,s_evaluations,verdict\n";
  // Each check starts from empty caches, so its count includes every stage
  // it needs and does not depend on the order of the rows.
  for (IdentityId id : ids) {
    for (const TestFunction& f : functions) {
      const auto t0 = std::chrono::steady_clock::now();
      const Verifier v(f, vc);
      const IdentityReport r = v.check(id);
      const double wall = seconds_since(t0);
      table << to_string(id) << ',' << csv_field(f.id) << ',' << format_number(wall) << ','
            << v.ops().s_evaluations() << ',' << to_string(r.verdict) << '\n';
    }
  }
  std::ostringstream ops_table;
  ops_table << "operator,function,wall_seconds,integrand_evaluations\n";
  for (const TestFunction& f : ids.empty() ? std::vector<TestFunction>{} : functions) {
    const Operators ops(f, cfg.quad);
    auto time_op = [&](const char* name, auto fn) {
      const auto t0 = std::chrono::steady_clock::now();
      std::int64_t evals = 0;
      for (double x : cfg.grid) evals += fn(x).n_evals;
      ops_table << name << ',' << csv_field(f.id) << ',' << format_number(seconds_since(t0)) << ',' << evals
                << '\n';
    };
    time_op("laplace", [&](double x) { return ops.laplace(x); });
    time_op("double_laplace", [&](double x) { return ops.double_laplace(x); });
    time_op("fourier_cos", [&](double x) { return ops.fourier_cos(x); });
    time_op("fourier_sin", [&](double x) { return ops.fourier_sin(x); });
    time_op("half_fourier_plus", [&](double x) { return ops.half_fourier(x, Sign::Plus); });
    time_op("half_fourier_minus", [&](double x) { return ops.half_fourier(x, Sign::Minus); });
    time_op("k_direct_plus", [&](double x) { return ops.k_direct(x, Sign::Plus); });
    time_op("k_alt_plus", [&](double x) { return ops.k_alt(x, Sign::Plus); });
    time_op("k_direct_minus", [&](double x) { return ops.k_direct(x, Sign::Minus); });
    time_op("k_alt_minus", [&](double x) { return ops.k_alt(x, Sign::Minus); });
  }
  const std::filesystem::path dir = prepare(cfg);
  write_file(dir / "bench.csv", table.str());
  write_file(dir / "bench_operators.csv", ops_table.str());
  out << table.str();
  return kExitPass;
}

int cmd_plotdata(IdentityId id, const TestFunction& f, const RunConfig& cfg, std::ostream& out) {
  const IdentityReport r = Verifier(f, cfg.verify_config()).check(id);
  std::ostringstream os;
  write_plot_csv(os, r);
  const std::filesystem::path dir = prepare(cfg);
  write_file(dir / ("plot_" + report_stem(r) + ".csv"), os.str());
  out << os.str();
  return kExitPass;
}

namespace {

struct Flags {
  std::string identity = "all";
  std::string function = "f1,f3,f5";
  std::string grid;
  std::string format;
  std::string out;
  std::string config;
  std::string method = "talbot";
  double tol = 0.0;
  double floor = 0.0;
  int workers = 0;
  double c = 1.0;
  int n = 14;
  int m = 32;
};

struct Options {
  CLI::Option* identity = nullptr;
  CLI::Option* function = nullptr;
  CLI::Option* grid = nullptr;
  CLI::Option* tol = nullptr;
  CLI::Option* floor = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* format = nullptr;
  CLI::Option* workers = nullptr;
  CLI::Option* config = nullptr;
};

Options add_run_options(CLI::App* app, Flags& f, bool with_identity) {
  Options o;
  if (with_identity) o.identity = app->add_option("--identity", f.identity, "identity tags, comma-separated, or all");
  o.function = app->add_option("--function", f.function, "corpus ids, comma-separated, or all");
  o.grid = app->add_option("--grid", f.grid, "start:stop:count[:geom]");
  o.tol = app->add_option("--tol", f.tol, "relative residual tolerance");
  o.floor = app->add_option("--floor", f.floor, "floor on |rhs|");
  o.out = app->add_option("--out", f.out, "output directory");
  o.format = app->add_option("--format", f.format, "csv, json or both");
  o.workers = app->add_option("--workers", f.workers, "worker threads");
  o.config = app->add_option("--config", f.config, "JSON configuration file");
  return o;
}

// defaults < config file < flags
RunConfig resolve(const Flags& f, const Options& o) {
  RunConfig cfg;
  cfg.out_dir = default_out_dir();
  if (o.config->count() > 0) {
    std::ifstream in(f.config);
    if (!in) throw UsageError("cannot read config file " + f.config);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw UsageError("config: " + std::string(e.what()));
    }
    cfg.merge(j);
  }
  if (o.grid->count() > 0) cfg.grid = GridSpec::parse(f.grid).points();
  if (o.tol->count() > 0) cfg.tol = f.tol;
  if (o.floor->count() > 0) cfg.floor = f.floor;
  if (o.out->count() > 0) cfg.out_dir = f.out;
  if (o.format->count() > 0) cfg.format = parse_format(f.format);
  if (o.workers->count() > 0) cfg.workers = f.workers;
  cfg.validate();
  return cfg;
}

const TestFunction& single(const std::vector<TestFunction>& fns) {
  if (fns.size() != 1) throw UsageError("exactly one --function is required");
  return fns.front();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Laplace/Fourier operator toolkit and identity checker"};
  app.require_subcommand(1);
  Flags f;
  CLI::App* list = app.add_subcommand("list", "list the test-function corpus");
  std::string list_filter = "all";
  list->add_option("--function", list_filter, "corpus ids, comma-separated, or all");
  CLI::App* check = app.add_subcommand("check", "run identity checks and write reports");
  const Options check_o = add_run_options(check, f, true);
  CLI::App* invert = app.add_subcommand("invert", "invert a corpus function's Laplace image on a grid");
  const Options invert_o = add_run_options(invert, f, false);
  invert->add_option("--method", f.method, "quick, theorem4, stehfest or talbot");
  invert->add_option("-c", f.c, "quick-inverse constant");
  invert->add_option("-n", f.n, "Stehfest terms");
  invert->add_option("-m", f.m, "Talbot nodes");
  CLI::App* bench = app.add_subcommand("bench", "time identity checks and operators");
  const Options bench_o = add_run_options(bench, f, true);
  CLI::App* plot = app.add_subcommand("plotdata", "write plot-ready residual data");
  const Options plot_o = add_run_options(plot, f, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (list->parsed()) return cmd_list(select_functions(list_filter), out);
    if (check->parsed()) {
      const RunConfig cfg = resolve(f, check_o);
      return cmd_check(select_identities(f.identity), select_functions(f.function), cfg, out);
    }
    if (invert->parsed()) {
      const RunConfig cfg = resolve(f, invert_o);
      const auto kind = parse_inversion_kind(f.method);
      if (!kind) throw UsageError("unknown method '" + f.method + "'; valid: quick theorem4 stehfest talbot");
      InversionMethod method{*kind, f.c, f.n, f.m};
      try {
        method.validate();
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      return cmd_invert(method, single(select_functions(f.function)), cfg, out);
    }
    if (bench->parsed()) {
      const RunConfig cfg = resolve(f, bench_o);
      return cmd_bench(select_identities(f.identity), select_functions(f.function), cfg, out);
    }
    if (plot->parsed()) {
      const RunConfig cfg = resolve(f, plot_o);
      const std::vector<IdentityId> ids = select_identities(f.identity);
      if (ids.size() != 1) throw UsageError("exactly one --identity is required");
      return cmd_plotdata(ids.front(), single(select_functions(f.function)), cfg, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace quickinv::cli
