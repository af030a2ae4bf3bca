#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "slice/report.hpp"

namespace {

using slice::report::json;
using slice::report::RunConfig;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CliOptions {
  std::string config_path;
  std::string system;
  std::string golden;
  std::string point;
  std::string covector;
  std::string eta;
  std::string s;
  std::vector<std::string> params;
  double fd_step = 0.0;
  double rank_tol = 0.0;
  double check_tol = -1.0;
  std::string out;
  std::string format;
  bool all_bundled = false;
  int samples = 10;
};

void add_point_options(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--config", o.config_path, "TOML or JSON config file");
  cmd->add_option("--system", o.system, "registered system key");
  cmd->add_option("--golden", o.golden, "use a registered golden point of the system");
  cmd->add_option("--param", o.params, "system parameter as key=value")->take_all();
  cmd->add_option("--point", o.point, "chart point x, e.g. 0,0,1");
  cmd->add_option("--covector", o.covector, "covector p_x");
  cmd->add_option("--eta", o.eta, "algebra element eta (with --s)");
  cmd->add_option("--s", o.s, "slice velocity s in chart coordinates (with --eta)");
  cmd->add_option("--fd-step", o.fd_step, "relative finite-difference step");
  cmd->add_option("--rank-tol", o.rank_tol, "relative rank tolerance");
  cmd->add_option("--out", o.out, "write the report here instead of stdout");
  cmd->add_option("--format", o.format, "json or text")->check(CLI::IsMember({"json", "text"}));
}

// Flags override the config file.
RunConfig build_config(const CliOptions& o) {
  RunConfig file;
  if (!o.config_path.empty()) file = slice::report::load_config(o.config_path);
  RunConfig flags;
  flags.system = o.system;
  if (!o.golden.empty()) flags.golden = o.golden;
  for (const auto& kv : o.params) {
    auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw slice::ConfigError("--param expects key=value, got '" + kv + "'");
    }
    slice::Vec v = slice::report::parse_vector(kv.substr(eq + 1));
    if (v.size() != 1) throw slice::ConfigError("--param value must be one number: '" + kv + "'");
    flags.params[kv.substr(0, eq)] = v(0);
  }
  if (!o.point.empty()) flags.x = slice::report::parse_vector(o.point);
  if (!o.covector.empty()) flags.p = slice::report::parse_vector(o.covector);
  if (!o.eta.empty()) flags.eta = slice::report::parse_vector(o.eta);
  if (!o.s.empty()) flags.s = slice::report::parse_vector(o.s);
  if (o.fd_step > 0.0) flags.numerics.fd_step = o.fd_step;
  if (o.rank_tol > 0.0) flags.numerics.rank_tol = o.rank_tol;
  if (o.check_tol >= 0.0) flags.numerics.check_tol = o.check_tol;
  if (!o.out.empty()) flags.out = o.out;
  if (!o.format.empty()) flags.format = o.format;
  RunConfig cfg = slice::report::merge(file, flags);
  // An explicit point on the command line replaces a golden point from the file.
  if (flags.x && !flags.golden) cfg.golden.reset();
  if (flags.p) {
    cfg.eta.reset();
    cfg.s.reset();
  } else if (flags.eta || flags.s) {
    cfg.p.reset();
  }
  if (cfg.format && *cfg.format != "json" && *cfg.format != "text") {
    throw slice::ConfigError("format must be json or text");
  }
  return cfg;
}

void emit(const std::string& text, const std::optional<std::string>& out) {
  if (!out) {
    std::cout << text;
    return;
  }
  std::ofstream f(*out, std::ios::binary);
  if (!f) throw slice::ConfigError("cannot write '" + *out + "'");
  f << text;
}

std::string render(const json& doc) {
  slice::report::ensure_finite(doc);
  return doc.dump(2) + "\n";
}

bool want_json(const RunConfig& cfg) { return !cfg.format || *cfg.format == "json"; }

int cmd_describe(const CliOptions& o) {
  RunConfig cfg = build_config(o);
  auto rp = slice::report::resolve(cfg);
  auto ctx = slice::verify::make_context(rp.system, rp.x, rp.p, rp.label, rp.golden);
  json doc = slice::report::describe_json(*ctx, cfg.numerics);
  if (want_json(cfg)) {
    emit(render(doc), cfg.out);
  } else {
    emit(slice::report::describe_text(*ctx), cfg.out);
  }
  // The report is still written so the failing quantities can be inspected.
  for (const auto& r : doc["residuals"]) {
    if (!r["pass"].get<bool>()) {
      std::cerr << "numerical failure: " << r["name"].get<std::string>() << " residual "
                << r["residual"].dump() << " exceeds " << r["tolerance"].get<double>() << "\n";
      return kExitNumerical;
    }
  }
  return kExitOk;
}

int cmd_verify(const CliOptions& o) {
  RunConfig cfg = build_config(o);
  std::vector<slice::report::ResolvedPoint> points;
  if (o.all_bundled) {
    points = slice::report::all_bundled(cfg.numerics);
  } else {
    points.push_back(slice::report::resolve(cfg));
  }
  slice::verify::SuiteOptions opt;
  opt.samples = o.samples;
  opt.check_tol = cfg.numerics.check_tol;
  opt.threads = slice::verify::thread_budget();
  std::vector<slice::report::VerifiedPoint> results;
  bool ok = true;
  for (const auto& rp : points) {
    slice::report::VerifiedPoint vp{rp.system.label(), rp.label, {}, rp.x, rp.p, {}};
    if (rp.golden) vp.params = rp.golden->params;
    if (!o.all_bundled) vp.params = cfg.params;
    vp.checks = slice::verify::run_point_suite(rp.system, rp.x, rp.p, opt, rp.golden);
    for (const auto& r : vp.checks) ok = ok && r.pass;
    results.push_back(std::move(vp));
  }
  if (want_json(cfg)) {
    emit(render(slice::report::verify_json(results, cfg.numerics)), cfg.out);
  } else {
    emit(slice::report::verify_text(results), cfg.out);
  }
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_list(const CliOptions& o) {
  std::optional<std::string> out;
  if (!o.out.empty()) out = o.out;
  if (o.format == "text") {
    emit(slice::report::list_text(), out);
  } else {
    emit(render(slice::report::list_json()), out);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symplectic normal spaces of cotangent-lifted actions"};
  app.require_subcommand(1);
  CliOptions opts;

  auto* describe = app.add_subcommand("describe", "analyze one point and print the report");
  add_point_options(describe, opts);

  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  add_point_options(verify, opts);
  verify->add_flag("--all-bundled", opts.all_bundled, "verify every registered golden point");
  verify->add_option("--check-tol", opts.check_tol, "override every check tolerance");
  verify->add_option("--samples", opts.samples, "random samples per sampled check")
      ->check(CLI::Range(1, 1000));

  auto* list = app.add_subcommand("list", "list registered systems and golden points");
  list->add_option("--format", opts.format, "json or text")->check(CLI::IsMember({"json", "text"}));
  list->add_option("--out", opts.out, "write the listing here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*describe) return cmd_describe(opts);
    if (*verify) return cmd_verify(opts);
    return cmd_list(opts);
  } catch (const slice::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const slice::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << " (residual " << e.residual() << ")\n";
    return kExitNumerical;
  } catch (const slice::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
