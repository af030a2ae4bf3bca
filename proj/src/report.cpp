#include "slice/report.hpp"

#include <Eigen/Core>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <toml.hpp>

#ifndef SLICE_VERSION
#define SLICE_VERSION "0.0.0"
#endif

namespace slice::report {

namespace {

json vec_json(const Vec& v) {
  json out = json::array();
  // Adding 0.0 maps -0.0 to 0.0.
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i) + 0.0);
  return out;
}

json mat_json(const Mat& m) {
  json out = json::array();
  for (Index i = 0; i < m.rows(); ++i) out.push_back(vec_json(m.row(i).transpose()));
  return out;
}

// Subspaces are written as arrays of basis vectors (the columns of `basis`).
json basis_json(const Mat& basis) {
  json out = json::array();
  for (Index j = 0; j < basis.cols(); ++j) out.push_back(vec_json(basis.col(j)));
  return out;
}

json report_json(const verify::ResidualReport& r) {
  json out = {{"name", r.name},
              {"tolerance", r.tolerance},
              {"pass", r.pass},
              {"context", r.context}};
  out["residual"] = std::isfinite(r.residual) ? json(r.residual) : json(nullptr);
  return out;
}

json params_json(const ParamMap& params) {
  json out = json::object();
  for (const auto& [k, v] : params) out[k] = v;
  return out;
}

json toml_to_json(const toml::node& node) {
  if (auto* t = node.as_table()) {
    json out = json::object();
    for (const auto& [k, v] : *t) out[std::string(k.str())] = toml_to_json(v);
    return out;
  }
  if (auto* a = node.as_array()) {
    json out = json::array();
    for (const auto& v : *a) out.push_back(toml_to_json(v));
    return out;
  }
  if (auto v = node.value_exact<int64_t>()) return *v;
  if (auto v = node.value_exact<double>()) return *v;
  if (auto v = node.value_exact<bool>()) return *v;
  if (auto v = node.value_exact<std::string>()) return *v;
  throw ConfigError("config: unsupported TOML value type");
}

Vec json_vector(const json& j, const std::string& key) {
  if (!j.is_array()) throw ConfigError("config: '" + key + "' must be an array of numbers");
  Vec v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError("config: '" + key + "' must be an array of numbers");
    v(static_cast<Index>(i)) = j[i].get<double>();
  }
  return v;
}

double json_number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("config: '" + key + "' must be a number");
  return j.get<double>();
}

std::string json_string(const json& j, const std::string& key) {
  if (!j.is_string()) throw ConfigError("config: '" + key + "' must be a string");
  return j.get<std::string>();
}

void check_length(const Vec& v, Index n, const std::string& what) {
  if (v.size() != n) {
    throw DimensionMismatch(what + " has length " + std::to_string(v.size()) + ", expected " +
                            std::to_string(n));
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << std::scientific << v;
  return os.str();
}

std::string fmt_vec(const Vec& v) {
  std::ostringstream os;
  os << "(";
  for (Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
  os << ")";
  return os.str();
}

}  // namespace

RunConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be a table");
  RunConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    if (key == "system") {
      cfg.system = json_string(value, key);
    } else if (key == "golden") {
      cfg.golden = json_string(value, key);
    } else if (key == "params") {
      if (!value.is_object()) throw ConfigError("config: 'params' must be a table");
      for (const auto& [pk, pv] : value.items()) cfg.params[pk] = json_number(pv, "params." + pk);
    } else if (key == "point" || key == "x") {
      cfg.x = json_vector(value, key);
    } else if (key == "covector" || key == "p") {
      cfg.p = json_vector(value, key);
    } else if (key == "eta") {
      cfg.eta = json_vector(value, key);
    } else if (key == "s") {
      cfg.s = json_vector(value, key);
    } else if (key == "out") {
      cfg.out = json_string(value, key);
    } else if (key == "format") {
      cfg.format = json_string(value, key);
    } else if (key == "numerics") {
      if (!value.is_object()) throw ConfigError("config: 'numerics' must be a table");
      NumericsOverrides& n = cfg.numerics;
      for (const auto& [nk, nv] : value.items()) {
        std::string name = "numerics." + nk;
        if (nk == "fd_step") {
          n.fd_step = json_number(nv, name);
        } else if (nk == "mixed_step") {
          n.mixed_step = json_number(nv, name);
        } else if (nk == "richardson_levels") {
          if (!nv.is_number_integer()) throw ConfigError("config: '" + name + "' must be an integer");
          n.richardson_levels = nv.get<int>();
        } else if (nk == "rank_tol") {
          n.rank_tol = json_number(nv, name);
        } else if (nk == "check_tol") {
          n.check_tol = json_number(nv, name);
        } else if (nk == "exact_derivatives") {
          if (!nv.is_boolean()) throw ConfigError("config: '" + name + "' must be a boolean");
          n.exact_derivatives = nv.get<bool>();
        } else {
          throw ConfigError("config: unknown key '" + name + "'");
        }
      }
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  bool is_json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
  if (is_json) {
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("config: '" + path + "' is not valid JSON");
    return config_from_json(doc);
  }
  try {
    toml::table table = toml::parse(in, path);
    return config_from_json(toml_to_json(table));
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "config: " << e.description() << " at " << e.source().begin;
    throw ConfigError(os.str());
  }
}

RunConfig merge(RunConfig base, const RunConfig& o) {
  if (!o.system.empty()) base.system = o.system;
  for (const auto& [k, v] : o.params) base.params[k] = v;
  if (o.golden) base.golden = o.golden;
  if (o.x) base.x = o.x;
  if (o.p) base.p = o.p;
  if (o.eta) base.eta = o.eta;
  if (o.s) base.s = o.s;
  if (o.out) base.out = o.out;
  if (o.format) base.format = o.format;
  const NumericsOverrides& n = o.numerics;
  if (n.fd_step) base.numerics.fd_step = n.fd_step;
  if (n.mixed_step) base.numerics.mixed_step = n.mixed_step;
  if (n.richardson_levels) base.numerics.richardson_levels = n.richardson_levels;
  if (n.rank_tol) base.numerics.rank_tol = n.rank_tol;
  if (n.check_tol) base.numerics.check_tol = n.check_tol;
  if (n.exact_derivatives) base.numerics.exact_derivatives = n.exact_derivatives;
  return base;
}

Vec parse_vector(const std::string& text) {
  std::string t;
  for (char ch : text) {
    if (ch == '[' || ch == ']') continue;
    t += (ch == ',') ? ' ' : ch;
  }
  std::istringstream is(t);
  std::vector<double> vals;
  std::string tok;
  while (is >> tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw ConfigError("cannot parse number '" + tok + "' in '" + text + "'");
    vals.push_back(v);
  }
  return Eigen::Map<const Vec>(vals.data(), static_cast<Index>(vals.size()));
}

NumericsConfig numerics_config(const NumericsOverrides& o) {
  NumericsConfig n;
  if (o.fd_step) n.fd.step = *o.fd_step;
  if (o.mixed_step) n.fd.mixed_step = *o.mixed_step;
  if (o.richardson_levels) n.fd.richardson_levels = *o.richardson_levels;
  if (o.rank_tol) n.rank_tol = *o.rank_tol;
  if (o.exact_derivatives) n.use_exact_derivatives = *o.exact_derivatives;
  if (!(n.fd.step > 0.0) || !(n.fd.mixed_step > 0.0)) {
    throw ConfigError("numerics: finite-difference steps must be positive");
  }
  if (n.fd.richardson_levels < 0 || n.fd.richardson_levels > 4) {
    throw ConfigError("numerics: richardson_levels must be in [0, 4]");
  }
  if (!(n.rank_tol > 0.0) || n.rank_tol >= 1.0) {
    throw ConfigError("numerics: rank_tol must be in (0, 1)");
  }
  if (o.check_tol && !(*o.check_tol >= 0.0)) {
    throw ConfigError("numerics: check_tol must be non-negative");
  }
  return n;
}

ResolvedPoint resolve(const RunConfig& cfg) {
  if (cfg.system.empty()) throw ConfigError("config: no system given");
  const SystemDescriptor& desc = find_system(cfg.system);
  ParamMap params = cfg.params;
  std::optional<GoldenPoint> golden;
  if (cfg.golden) {
    for (const auto& gp : desc.golden_points) {
      if (gp.label == *cfg.golden) golden = gp;
    }
    if (!golden) {
      throw ConfigError("config: system '" + cfg.system + "' has no golden point '" +
                        *cfg.golden + "'");
    }
    for (const auto& [k, v] : golden->params) params.try_emplace(k, v);
  }
  MechanicalGSystem system = instantiate(cfg.system, params, numerics_config(cfg.numerics));
  const Index n = system.chart_dim();
  const Index m = system.algebra().dim();

  std::optional<Vec> x = cfg.x;
  if (!x && golden) x = golden->x;
  if (!x) throw ConfigError("config: no point given");
  check_length(*x, n, "point");
  if (!system.in_domain(*x)) throw ConfigError("config: point lies outside the chart domain");

  bool has_p = cfg.p.has_value();
  bool has_pair = cfg.eta.has_value() || cfg.s.has_value();
  if (has_p && has_pair) throw ConfigError("config: give either a covector or (eta, s), not both");
  if (cfg.eta.has_value() != cfg.s.has_value()) {
    throw ConfigError("config: eta and s must be given together");
  }
  Vec p;
  if (has_p) {
    p = *cfg.p;
    check_length(p, n, "covector");
  } else if (has_pair) {
    check_length(*cfg.eta, m, "eta");
    check_length(*cfg.s, n, "s");
    p = covector_from_velocity(system, *x, *cfg.eta, *cfg.s);
  } else if (golden && !cfg.x) {
    p = golden->p;
  } else {
    throw ConfigError("config: no covector given");
  }
  for (Index i = 0; i < x->size(); ++i) {
    if (!std::isfinite((*x)(i))) throw ConfigError("config: point has non-finite entries");
  }
  for (Index i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p(i))) throw ConfigError("config: covector has non-finite entries");
  }

  // A point that coincides with a golden fixture is checked against it.
  if (!golden) {
    for (const auto& gp : desc.golden_points) {
      ParamMap merged = desc.default_params;
      for (const auto& [k, v] : gp.params) merged[k] = v;
      ParamMap mine = desc.default_params;
      for (const auto& [k, v] : params) mine[k] = v;
      if (merged == mine && gp.x == *x && gp.p == p) golden = gp;
    }
  }
  std::string label = golden ? golden->label : "custom";
  return {std::move(system), *x, p, label, golden};
}

std::vector<ResolvedPoint> all_bundled(const NumericsOverrides& o) {
  std::vector<ResolvedPoint> out;
  for (const auto& desc : list_systems()) {
    for (const auto& gp : desc.golden_points) {
      RunConfig cfg;
      cfg.system = desc.key;
      cfg.golden = gp.label;
      cfg.numerics = o;
      out.push_back(resolve(cfg));
    }
  }
  return out;
}

json versions() {
  return {{"slice", SLICE_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                        "." + std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"tomlplusplus", std::to_string(TOML_LIB_MAJOR) + "." + std::to_string(TOML_LIB_MINOR) +
                               "." + std::to_string(TOML_LIB_PATCH)}};
}

json numerics_json(const NumericsConfig& n, const NumericsOverrides& o) {
  json out = {{"fd_step", n.fd.step},
              {"mixed_step", n.fd.mixed_step},
              {"richardson_levels", n.fd.richardson_levels},
              {"rank_tol", n.rank_tol},
              {"exact_derivatives", n.use_exact_derivatives},
              {"invariance_tol", n.invariance_tol}};
  if (o.check_tol) out["check_tol"] = *o.check_tol;
  return out;
}

json describe_json(const verify::PointContext& c, const NumericsOverrides& o) {
  const PointData& pd = c.pd();
  const CoadjointSplitting& sp = pd.splitting;
  const NormalSpaceResult& ns = c.ns;
  const Mat& sb = pd.frame.S.basis();
  json doc;
  doc["schema"] = kSchemaVersion;
  doc["kind"] = "describe";
  doc["versions"] = versions();
  doc["numerics"] = numerics_json(c.system.numerics(), o);
  doc["system"] = {{"key", c.system.label()}, {"algebra", c.system.algebra().label()}};
  doc["point"] = {{"label", c.label}, {"x", vec_json(c.x)}, {"p", vec_json(c.p)}};
  doc["momentum"] = {{"mu", vec_json(pd.mu)},
                     {"alpha", vec_json(pd.alpha)},
                     {"eta", vec_json(pd.eta_algebra())},
                     {"s", vec_json(pd.s_chart())}};
  json dims = json::object();
  for (const auto& [k, v] : verify::computed_dims(c)) dims[k] = v;
  doc["dims"] = dims;
  // Algebra subspaces in g coordinates, orbit data in g* coordinates,
  // slice data in chart coordinates, V in stacked (xi_r, a, nu, beta) coordinates.
  doc["bases"] = {
      {"h", basis_json(pd.frame.h.basis())},
      {"r", basis_json(pd.frame.r.basis())},
      {"S", basis_json(sb)},
      {"g_mu", basis_json(sp.g_mu.basis())},
      {"h_mu", basis_json(sp.h_mu.basis())},
      {"p", basis_json(sp.p.basis())},
      {"q_mu", basis_json(sp.q_mu.basis())},
      {"k", basis_json(sp.k.basis())},
      {"g_px", basis_json(pd.g_px.basis())},
      {"orbit", basis_json(sp.orbit.basis())},
      {"h_mu_orbit", basis_json(sp.h_mu_orbit.basis())},
      {"V_mu", basis_json(sp.V_mu.basis())},
      {"W", basis_json(sp.W.basis())},
      {"B", basis_json(sb * pd.B.basis())},
      {"h_mu_s_perp", basis_json(sb * pd.h_mu_s_perp.basis())},
      {"h_alpha_annihilator", basis_json(sb * pd.h_alpha_ann.basis())},
      {"V", basis_json(ns.V_basis)},
  };
  doc["blocks"] = {{"N_mu", ns.dim_N}, {"B", ns.dim_B}, {"B_star", ns.dim_B}};
  doc["omega"] = mat_json(ns.omega);
  json flags = json::array();
  for (CaseFlag f : ns.case_flags) flags.push_back(to_string(f));
  doc["case_flags"] = flags;
  doc["j"] = {{"domain_dim", ns.j.domain.dim()},
              {"codomain_dim", ns.j.codomain.dim()},
              {"matrix", mat_json(ns.j.matrix)},
              {"domain_basis", basis_json(sb * ns.j.domain.basis())},
              {"codomain_basis", basis_json(ns.j.codomain.basis())}};
  json jn = json::array();
  for (std::size_t z = 0; z < ns.JN_tensor.size(); ++z) {
    jn.push_back({{"zeta", vec_json(pd.g_px.vector(static_cast<Index>(z)))},
                  {"matrix", mat_json(ns.JN_tensor[z])}});
  }
  doc["JN_tensor"] = jn;
  json res = json::array();
  for (const auto& r : {verify::check_normal_form(c), verify::check_dimension_law(c),
                        verify::check_containment(c), verify::check_complementarity(c),
                        verify::check_special_cases_j(c), verify::check_special_cases_B(c),
                        verify::check_V_invariance(c), verify::check_witt_artin(c),
                        verify::check_frame_invariance(c)}) {
    res.push_back(report_json(r));
  }
  doc["residuals"] = res;
  return doc;
}

std::string describe_text(const verify::PointContext& c) {
  const PointData& pd = c.pd();
  const NormalSpaceResult& ns = c.ns;
  std::ostringstream os;
  os << "system " << c.system.label() << "  point " << c.label << "\n";
  os << "x = " << fmt_vec(c.x) << "\np = " << fmt_vec(c.p) << "\n";
  os << "mu = " << fmt_vec(pd.mu) << "\n";
  os << "dims:";
  for (const auto& [k, v] : verify::computed_dims(c)) os << " " << k << "=" << v;
  os << "\nblocks: N_mu=" << ns.dim_N << " B=" << ns.dim_B << " B*=" << ns.dim_B << "\n";
  os << "flags:";
  for (CaseFlag f : ns.case_flags) os << " " << to_string(f);
  double jmax = ns.j.matrix.size() ? ns.j.matrix.cwiseAbs().maxCoeff() : 0.0;
  os << "\n|j|_max = " << fmt(jmax) << "\nomega =\n";
  Eigen::IOFormat f(6, 0, " ", "\n", "  [", "]");
  if (ns.omega.size()) os << ns.omega.format(f) << "\n";
  os << "block residual = " << fmt(ns.block_residual) << "\n";
  return os.str();
}

json verify_json(const std::vector<VerifiedPoint>& points, const NumericsOverrides& o) {
  json doc;
  doc["schema"] = kSchemaVersion;
  doc["kind"] = "verify";
  doc["versions"] = versions();
  doc["numerics"] = numerics_json(numerics_config(o), o);
  json arr = json::array();
  int total = 0;
  int failed = 0;
  for (const auto& vp : points) {
    json checks = json::array();
    bool ok = true;
    for (const auto& r : vp.checks) {
      checks.push_back(report_json(r));
      ++total;
      if (!r.pass) {
        ++failed;
        ok = false;
      }
    }
    arr.push_back({{"system", vp.system},
                   {"label", vp.label},
                   {"params", params_json(vp.params)},
                   {"x", vec_json(vp.x)},
                   {"p", vec_json(vp.p)},
                   {"pass", ok},
                   {"checks", checks}});
  }
  doc["points"] = arr;
  doc["summary"] = {{"checks", total}, {"failed", failed}, {"pass", failed == 0}};
  return doc;
}

std::string verify_text(const std::vector<VerifiedPoint>& points) {
  std::ostringstream os;
  int total = 0;
  int failed = 0;
  for (const auto& vp : points) {
    os << vp.system << " / " << vp.label << "\n";
    for (const auto& r : vp.checks) {
      ++total;
      if (!r.pass) ++failed;
      os << "  " << (r.pass ? "PASS" : "FAIL") << "  " << std::left << std::setw(30) << r.name
         << " residual " << fmt(r.residual) << "  tol " << fmt(r.tolerance);
      if (!r.context.empty()) os << "  " << r.context;
      os << "\n";
    }
  }
  os << total - failed << "/" << total << " checks passed\n";
  return os.str();
}

json list_json() {
  json doc;
  doc["schema"] = kSchemaVersion;
  doc["kind"] = "list";
  doc["versions"] = versions();
  json systems = json::array();
  for (const auto& d : list_systems()) {
    MechanicalGSystem sys = instantiate(d.key);
    json gps = json::array();
    for (const auto& gp : d.golden_points) {
      json dims = json::object();
      for (const auto& [k, v] : gp.dims) dims[k] = v;
      json flags = json::array();
      for (CaseFlag f : gp.flags) flags.push_back(to_string(f));
      gps.push_back({{"label", gp.label},
                     {"params", params_json(gp.params)},
                     {"x", vec_json(gp.x)},
                     {"p", vec_json(gp.p)},
                     {"dims", dims},
                     {"case_flags", flags},
                     {"j_nonzero", gp.j_nonzero}});
    }
    systems.push_back({{"key", d.key},
                       {"description", d.description},
                       {"algebra", sys.algebra().label()},
                       {"algebra_dim", sys.algebra().dim()},
                       {"chart_dim", sys.chart_dim()},
                       {"default_params", params_json(d.default_params)},
                       {"golden_points", gps}});
  }
  doc["systems"] = systems;
  return doc;
}

std::string list_text() {
  std::ostringstream os;
  for (const auto& d : list_systems()) {
    os << d.key << "  " << d.description << "\n";
    for (const auto& gp : d.golden_points) {
      os << "    " << gp.label << "  x=" << fmt_vec(gp.x) << " p=" << fmt_vec(gp.p) << "\n";
    }
  }
  return os.str();
}

void ensure_finite(const json& doc) {
  std::function<void(const json&, const std::string&)> walk = [&](const json& j,
                                                                  const std::string& path) {
    if (j.is_number_float() && !std::isfinite(j.get<double>())) {
      throw NumericalError("report: non-finite number at " + path);
    }
    if (j.is_object()) {
      for (const auto& [k, v] : j.items()) walk(v, path + "/" + k);
    } else if (j.is_array()) {
      for (std::size_t i = 0; i < j.size(); ++i) walk(j[i], path + "/" + std::to_string(i));
    }
  };
  walk(doc, "");
}

}  // namespace slice::report
