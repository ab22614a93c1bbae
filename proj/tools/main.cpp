#include <CLI11.hpp>
#include <json.hpp>

#include <unistd.h>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "susylame/susylame.h"

namespace {

enum ExitCode { kOk = 0, kClaimFailure = 1, kUsage = 2, kNumerical = 3 };

enum class Format { csv, json, table };

struct OutputSpec {
  Format format = Format::table;
  std::string format_name;
  std::string path;
  int precision = 12;
};

struct CliError {
  int code;
  std::string message;
};

int exit_code_for(sl_status s) {
  switch (s) {
    case SL_OK: return kOk;
    case SL_ERR_DOMAIN:
    case SL_ERR_UNSUPPORTED:
    case SL_ERR_INVALID_ARGUMENT: return kUsage;
    default: return kNumerical;
  }
}

void check(sl_status s, const std::string& hint = {}) {
  if (s == SL_OK) return;
  std::string msg = sl_last_error();
  if (!hint.empty()) msg += " (" + hint + ")";
  throw CliError{exit_code_for(s), msg};
}

// Fixed notation with `precision` decimals, trailing zeros dropped.
std::string num(double v, int precision) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[512];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
  std::string s(buf, res.ptr);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

std::string sci(double v, int digits) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, digits);
  return {buf, res.ptr};
}

nlohmann::ordered_json jnum(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

bool use_color(const OutputSpec& out) {
  return out.path.empty() && std::getenv("NO_COLOR") == nullptr && isatty(STDOUT_FILENO) != 0;
}

void emit(const OutputSpec& out, const std::string& text) {
  if (out.path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(out.path, std::ios::binary);
  if (!f) throw CliError{kUsage, "cannot open output file " + out.path};
  f << text;
  if (!f) throw CliError{kNumerical, "failed writing " + out.path};
}

// Plain-text table with right-aligned columns.
std::string render_table(const std::vector<std::string>& head,
                         const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(head.size());
  for (std::size_t c = 0; c < head.size(); ++c) width[c] = head[c].size();
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) os << "  ";
      os << std::string(width[c] - r[c].size(), ' ') << r[c];
    }
    os << '\n';
  };
  line(head);
  std::vector<std::string> rule;
  for (auto w : width) rule.emplace_back(w, '-');
  line(rule);
  for (const auto& r : rows) line(r);
  return os.str();
}

std::string render_csv(const std::vector<std::string>& head,
                       const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << r[c];
    os << '\n';
  };
  line(head);
  for (const auto& r : rows) line(r);
  return os.str();
}

struct Potential {
  sl_potential* p = nullptr;
  Potential() = default;
  Potential(const Potential&) = delete;
  Potential& operator=(const Potential&) = delete;
  ~Potential() { sl_potential_destroy(p); }
};

const std::map<std::string, sl_family> kFamilies{
    {"vminus", SL_FAMILY_VMINUS}, {"vplus", SL_FAMILY_VPLUS}, {"w", SL_FAMILY_W}};

constexpr std::size_t kPartnerGrid = 512;

// V-, V+ or W for (j, m); numeric builds V- from the shifted Lamé potential and
// V+ from it by the numerical SUSY transform.
void build_potential(Potential& out, const std::string& family, int j, double m, bool numeric) {
  if (!numeric) {
    const auto guidance = j > 3 ? "pass --numeric" : "";
    check(sl_potential_closed(kFamilies.at(family), j, m, &out.p), guidance);
    return;
  }
  if (family == "w") throw CliError{kUsage, "family w has no numeric path; use vminus or vplus"};
  if (family == "vminus") {
    check(sl_potential_lame_shifted(j, m, &out.p));
    return;
  }
  Potential base;
  check(sl_potential_lame_shifted(j, m, &base.p));
  check(sl_potential_numeric_partner(base.p, kPartnerGrid, &out.p));
}

std::string render_samples(const OutputSpec& out, const std::vector<double>& xs,
                           const std::vector<double>& vs, nlohmann::ordered_json meta) {
  if (out.format == Format::json) {
    meta["x"] = nlohmann::ordered_json::array();
    meta["value"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      meta["x"].push_back(jnum(xs[i]));
      meta["value"].push_back(jnum(vs[i]));
    }
    return meta.dump(2) + "\n";
  }
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < xs.size(); ++i)
    rows.push_back({num(xs[i], out.precision), num(vs[i], out.precision)});
  return out.format == Format::csv ? render_csv({"x", "value"}, rows)
                                   : render_table({"x", "value"}, rows);
}

sl_solver_options solver_options(double rtol) {
  sl_solver_options o = sl_solver_options_default();
  o.relative_tolerance = rtol;
  o.absolute_tolerance = rtol * 1e-2;
  o.energy_tolerance = rtol * 0.1;
  return o;
}

std::vector<sl_band_edge> edges_of(const sl_potential* v, int count, double rtol) {
  std::vector<sl_band_edge> edges(static_cast<std::size_t>(count));
  const auto opts = solver_options(rtol);
  check(sl_band_edges(v, count, std::nan(""), &opts, edges.data()));
  return edges;
}

const char* boundary_name(sl_boundary b) { return b == SL_PERIODIC ? "periodic" : "antiperiodic"; }

// --- subcommands ------------------------------------------------------------

struct EllipticArgs {
  double x = 0.0;
  double m = 0.0;
};

std::string cmd_elliptic(const EllipticArgs& a, const OutputSpec& out) {
  double sn = 0, cn = 0, dn = 0, k = 0;
  check(sl_jacobi(a.x, a.m, &sn, &cn, &dn));
  if (a.m == 1.0) {
    k = std::numeric_limits<double>::infinity();
  } else {
    check(sl_complete_k(a.m, &k));
  }
  const int p = out.precision;
  switch (out.format) {
    case Format::json: {
      nlohmann::ordered_json j{{"x", a.x}, {"m", a.m},   {"sn", jnum(sn)},
                               {"cn", jnum(cn)}, {"dn", jnum(dn)}, {"K", jnum(k)}};
      return j.dump(2) + "\n";
    }
    case Format::csv:
      return render_csv({"x", "m", "sn", "cn", "dn", "K"},
                        {{num(a.x, p), num(a.m, p), num(sn, p), num(cn, p), num(dn, p), num(k, p)}});
    case Format::table:
      break;
  }
  return "sn=" + num(sn, p) + " cn=" + num(cn, p) + " dn=" + num(dn, p) + " K=" + num(k, p) + "\n";
}

struct PotentialArgs {
  int j = 2;
  double m = 0.5;
  std::string family = "vminus";
  int grid_n = 512;
  bool numeric = false;
};

std::string cmd_potential(const PotentialArgs& a, const OutputSpec& out) {
  Potential v;
  build_potential(v, a.family, a.j, a.m, a.numeric);
  double period = 0;
  check(sl_potential_period(v.p, &period));
  std::vector<double> xs, vs;
  for (int i = 0; i < a.grid_n; ++i) {
    const double x = period * i / a.grid_n;
    double value = 0;
    check(sl_potential_eval(v.p, x, &value));
    xs.push_back(x);
    vs.push_back(value);
  }
  return render_samples(out, xs, vs,
                        {{"j", a.j}, {"m", a.m}, {"family", a.family}, {"numeric", a.numeric},
                         {"period", period}});
}

struct StatesArgs {
  int j = 2;
  double m = 0.5;
  std::string partner = "minus";
  int level = 0;
  int grid_n = 512;
  bool numeric = false;
  double rtol = 1e-13;
};

std::string cmd_states(const StatesArgs& a, const OutputSpec& out) {
  if (a.level < 0 || a.level > 2 * a.j)
    throw CliError{kUsage, "level must lie in 0.." + std::to_string(2 * a.j)};
  const std::string family = a.partner == "minus" ? "vminus" : "vplus";
  Potential v;
  build_potential(v, family, a.j, a.m, a.numeric);
  double period = 0;
  check(sl_potential_period(v.p, &period));
  std::vector<double> xs(static_cast<std::size_t>(a.grid_n)), psi(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = period * static_cast<double>(i) / a.grid_n;
  double energy = std::nan("");
  if (a.numeric) {
    const auto edges = edges_of(v.p, 2 * a.j + 1, a.rtol);
    const auto& e = edges[static_cast<std::size_t>(a.level)];
    energy = e.energy;
    const auto opts = solver_options(a.rtol);
    check(sl_bloch_edge_state(v.p, &e, xs.size(), &opts, psi.data(), nullptr));
  } else {
    const auto p = a.partner == "minus" ? SL_PARTNER_MINUS : SL_PARTNER_PLUS;
    for (std::size_t i = 0; i < xs.size(); ++i)
      check(sl_psi(p, a.j, a.level, a.m, xs[i], &psi[i]), "closed-form states cover j = 2 and the "
                                                           "j = 3 ground state; pass --numeric");
    check(sl_band_edge_energy(a.j, a.m, a.level, &energy));
  }
  return render_samples(out, xs, psi,
                        {{"j", a.j}, {"m", a.m}, {"partner", a.partner}, {"level", a.level},
                         {"energy", jnum(energy)}, {"numeric", a.numeric}});
}

struct BandsArgs {
  int j = 2;
  double m = 0.5;
  std::string family = "vminus";
  bool both = false;
  bool numeric = false;
  double rtol = 1e-13;
};

std::string cmd_bands(const BandsArgs& a, const OutputSpec& out) {
  if (a.family == "w") throw CliError{kUsage, "bands needs a potential: vminus or vplus"};
  const int count = 2 * a.j + 1;
  const bool numeric = a.numeric || a.j > 3;
  const int p = out.precision;
  Potential first;
  build_potential(first, a.both ? "vminus" : a.family, a.j, a.m, numeric);
  const auto e1 = edges_of(first.p, count, a.rtol);

  if (!a.both) {
    if (out.format == Format::json) {
      auto arr = nlohmann::ordered_json::array();
      for (const auto& e : e1)
        arr.push_back({{"n", e.n}, {"energy", jnum(e.energy)}, {"boundary", boundary_name(e.boundary)},
                       {"degenerate", e.degenerate != 0}});
      return nlohmann::ordered_json{{"j", a.j}, {"m", a.m}, {"family", a.family}, {"edges", arr}}
                 .dump(2) + "\n";
    }
    std::vector<std::vector<std::string>> rows;
    for (const auto& e : e1) {
      std::vector<std::string> r{std::to_string(e.n), num(e.energy, p), boundary_name(e.boundary)};
      if (out.format == Format::table && e.degenerate) r[2] += " (closed gap)";
      rows.push_back(std::move(r));
    }
    return out.format == Format::csv ? render_csv({"n", "energy", "boundary"}, rows)
                                     : render_table({"n", "energy", "boundary"}, rows);
  }

  Potential second;
  build_potential(second, "vplus", a.j, a.m, numeric);
  const auto e2 = edges_of(second.p, count, a.rtol);
  double worst = 0;
  for (std::size_t i = 0; i < e1.size(); ++i)
    worst = std::max(worst, std::abs(e1[i].energy - e2[i].energy));
  if (out.format == Format::json) {
    auto arr = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < e1.size(); ++i)
      arr.push_back({{"n", e1[i].n}, {"energy_minus", jnum(e1[i].energy)},
                     {"energy_plus", jnum(e2[i].energy)},
                     {"diff", jnum(std::abs(e1[i].energy - e2[i].energy))},
                     {"boundary", boundary_name(e1[i].boundary)}});
    return nlohmann::ordered_json{{"j", a.j}, {"m", a.m}, {"edges", arr}, {"max_abs_diff", worst}}
               .dump(2) + "\n";
  }
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < e1.size(); ++i)
    rows.push_back({std::to_string(e1[i].n), num(e1[i].energy, p), num(e2[i].energy, p),
                    sci(std::abs(e1[i].energy - e2[i].energy), 2), boundary_name(e1[i].boundary)});
  const std::vector<std::string> head{"n", "energy_minus", "energy_plus", "diff", "boundary"};
  if (out.format == Format::csv) return render_csv(head, rows);
  return render_table(head, rows) + "max |diff| = " + sci(worst, 2) + "\n";
}

struct VerifyArgs {
  std::string scope = "all";
  std::vector<double> m_list{0.1, 0.5, 0.9};
};

// "j=2 m=0.5 n=3 partner=plus" from the context object.
std::string where(const nlohmann::json& ctx) {
  std::string s;
  for (const char* key : {"j", "m", "n", "partner", "family"}) {
    if (!ctx.contains(key)) continue;
    const auto& v = ctx[key];
    std::string text = v.is_string() ? v.get<std::string>()
                       : v.is_number_float() ? num(v.get<double>(), 12)
                                             : v.dump();
    s += (s.empty() ? "" : " ") + std::string(key) + "=" + text;
  }
  return s;
}

int cmd_verify(const VerifyArgs& a, const OutputSpec& out) {
  static const std::map<std::string, sl_scope> scopes{{"all", SL_SCOPE_ALL},
                                                      {"table1", SL_SCOPE_TABLE1},
                                                      {"limits", SL_SCOPE_LIMITS},
                                                      {"iso", SL_SCOPE_ISO},
                                                      {"selfiso", SL_SCOPE_SELFISO}};
  sl_report* raw = nullptr;
  check(sl_verify(scopes.at(a.scope), a.m_list.data(), a.m_list.size(), &raw));
  std::unique_ptr<sl_report, void (*)(sl_report*)> report(raw, sl_report_destroy);
  const bool ok = sl_report_all_passed(report.get()) != 0;
  const std::size_t n = sl_report_size(report.get());

  if (out.format == Format::json) {
    emit(out, std::string(sl_report_json(report.get())) + "\n");
    return ok ? kOk : kClaimFailure;
  }
  std::vector<std::vector<std::string>> rows;
  std::size_t failed = 0;
  const bool color = out.format == Format::table && use_color(out);
  for (std::size_t i = 0; i < n; ++i) {
    sl_claim c{};
    check(sl_report_claim(report.get(), i, &c));
    failed += c.passed ? 0 : 1;
    const auto ctx = nlohmann::json::parse(c.context_json);
    if (out.format == Format::csv) {
      rows.push_back({c.claim_id, sci(c.measured, 16), sci(c.tolerance, 16),
                      c.passed ? "true" : "false", "\"" + where(ctx) + "\""});
      continue;
    }
    std::string status = c.passed ? "PASS" : "FAIL";
    if (color) status = (c.passed ? "\x1b[32m" : "\x1b[31m") + status + "\x1b[0m";
    std::string label = c.claim_id;
    if (ctx.contains("verdict")) label += " [" + ctx["verdict"].get<std::string>() + "]";
    rows.push_back({label, where(ctx), sci(c.measured, 3), sci(c.tolerance, 1), status});
  }
  if (out.format == Format::csv) {
    emit(out, render_csv({"claim_id", "measured", "tolerance", "passed", "where"}, rows));
  } else {
    // left-align the text columns by padding before rendering
    std::size_t w0 = 5, w1 = 5;
    for (const auto& r : rows) {
      w0 = std::max(w0, r[0].size());
      w1 = std::max(w1, r[1].size());
    }
    for (auto& r : rows) {
      r[0] += std::string(w0 - r[0].size(), ' ');
      r[1] += std::string(w1 - r[1].size(), ' ');
    }
    std::string head0 = "claim" + std::string(w0 - 5, ' ');
    std::string head1 = "where" + std::string(w1 - 5, ' ');
    emit(out, render_table({head0, head1, "measured", "tolerance", "status"}, rows) +
                  std::to_string(n) + " claims, " + std::to_string(failed) + " failed\n");
  }
  return ok ? kOk : kClaimFailure;
}

void add_output_options(CLI::App* sub, OutputSpec& out, const std::string& default_format) {
  out.format_name = default_format;
  sub->add_option("--format", out.format_name, "output format")
      ->check(CLI::IsMember({"csv", "json", "table"}))
      ->capture_default_str();
  sub->parse_complete_callback([&out] {
    out.format = out.format_name == "csv"    ? Format::csv
                 : out.format_name == "json" ? Format::json
                                             : Format::table;
  });
  sub->add_option("-o,--output", out.path, "write to file instead of standard output");
  sub->add_option("--precision", out.precision, "decimal digits printed")
      ->check(CLI::Range(4, 17));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lamé potentials, their SUSY partners and band structure"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sl_version()));

  const auto jcheck = CLI::Range(1, 5);
  const auto mcheck = CLI::Range(0.0, 1.0);
  const std::vector<std::string> family_names{"vminus", "vplus", "w"};

  EllipticArgs ea;
  OutputSpec eo;
  auto* elliptic = app.add_subcommand("elliptic", "Jacobi sn, cn, dn at (x, m) and K(m)");
  elliptic->add_option("-x,--x", ea.x, "argument")->required();
  // range is checked by the library so the error carries its message
  elliptic->add_option("-m,--m", ea.m, "parameter in [0, 1]")->required();
  add_output_options(elliptic, eo, "table");

  PotentialArgs pa;
  OutputSpec po;
  auto* potential = app.add_subcommand("potential", "sample V-, V+ or W over one period");
  potential->add_option("-j", pa.j, "Lamé index")->required()->check(jcheck);
  potential->add_option("-m,--m", pa.m, "elliptic parameter")->required();
  potential->add_option("--family", pa.family)->check(CLI::IsMember(family_names));
  potential->add_option("-n,--grid", pa.grid_n, "number of samples")->check(CLI::Range(1, 1 << 22));
  potential->add_flag("--numeric", pa.numeric, "build from the numerical SUSY transform");
  add_output_options(potential, po, "csv");

  StatesArgs sa;
  OutputSpec so;
  auto* states = app.add_subcommand("states", "sample a band-edge eigenstate of V- or V+");
  states->add_option("-j", sa.j, "Lamé index")->required()->check(jcheck);
  states->add_option("-m,--m", sa.m, "elliptic parameter")->required();
  states->add_option("--partner", sa.partner)->check(CLI::IsMember({"minus", "plus"}));
  states->add_option("-l,--level", sa.level, "band-edge index n");
  states->add_option("-n,--grid", sa.grid_n, "number of samples")->check(CLI::Range(1, 1 << 22));
  states->add_flag("--numeric", sa.numeric, "compute the Bloch state numerically");
  states->add_option("--rtol", sa.rtol, "integrator relative tolerance")
      ->check(CLI::Range(1e-15, 1e-3));
  add_output_options(states, so, "csv");

  BandsArgs ba;
  OutputSpec bo;
  auto* bands = app.add_subcommand("bands", "band-edge energies of V- or V+");
  bands->add_option("-j", ba.j, "Lamé index")->required()->check(jcheck);
  bands->add_option("-m,--m", ba.m, "elliptic parameter")->required();
  bands->add_option("--family", ba.family)->check(CLI::IsMember({"vminus", "vplus"}));
  bands->add_flag("--both", ba.both, "V- and V+ side by side");
  bands->add_flag("--numeric", ba.numeric, "use the numerical pipeline (implied for j > 3)");
  bands->add_option("--rtol", ba.rtol, "integrator relative tolerance")
      ->check(CLI::Range(1e-15, 1e-3));
  add_output_options(bands, bo, "table");

  VerifyArgs va;
  OutputSpec vo;
  auto* verify = app.add_subcommand("verify", "run the verification suites");
  verify->add_option("--scope", va.scope)
      ->check(CLI::IsMember({"all", "table1", "limits", "iso", "selfiso"}));
  verify->add_option("-m,--m", va.m_list, "moduli to test")->delimiter(',')->check(mcheck);
  add_output_options(verify, vo, "table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*elliptic) emit(eo, cmd_elliptic(ea, eo));
    if (*potential) emit(po, cmd_potential(pa, po));
    if (*states) emit(so, cmd_states(sa, so));
    if (*bands) emit(bo, cmd_bands(ba, bo));
    if (*verify) return cmd_verify(va, vo);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.code;
  }
  return kOk;
}
