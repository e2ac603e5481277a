// sigma: command-line front end over scenarios and the certificate store
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "sgm/properties.hpp"
#include "sgm/store.hpp"

using namespace sgm;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kFail = 1, kParse = 2, kUnknown = 3, kVerify = 4 };

struct Opts {
  std::string scenario, dir, end, join, point, out;
  int n = 1;
  std::optional<int> window, samples, jobs;
  std::optional<std::string> trunc, nu;
  std::optional<uint64_t> seed;
  std::vector<std::string> files;
};

Q positive_q(const std::string& s, const char* flag) {
  Q q;
  try {
    q = parse_scalar(s);
  } catch (const std::exception&) {
    throw ParseError(std::string(flag) + ": not a rational number: " + s);
  }
  if (q <= 0) throw ParseError(std::string(flag) + " must be positive");
  return q;
}

Scenario load(const Opts& o) {
  Scenario s = load_scenario(o.scenario);
  auto pos = [](const std::optional<int>& v, const char* flag) {
    if (v && *v < 1) throw ParseError(std::string(flag) + " must be positive");
    return v;
  };
  if (pos(o.window, "--window")) s.budgets.window = *o.window;
  if (pos(o.samples, "--samples")) s.samples = *o.samples;
  if (pos(o.jobs, "--jobs")) s.jobs = *o.jobs;
  if (o.trunc) s.budgets.T = positive_q(*o.trunc, "--trunc");
  if (o.nu) s.budgets.nu = positive_q(*o.nu, "--nu");
  if (o.seed) s.seed = *o.seed;
  if (o.n < 0) throw ParseError("--n must be >= 0");
  return s;
}

bool has_direction(const Opts& o) { return !o.dir.empty() || !o.end.empty() || !o.join.empty(); }

Dir direction(const Scenario& s, const Opts& o) {
  if (!has_direction(o)) throw ParseError("a direction is required (--dir, --end or --join)");
  return parse_direction(s, o.dir, o.end, o.join);
}

CertStore open_store(const Opts& o) { return CertStore(o.out.empty() ? CertStore::default_dir() : o.out); }

std::string shown(const CertStore& st, const std::string& name) { return (fs::path(st.dir()) / name).string(); }

// certificates of a verdict, then the verdict document itself
std::string record(CertStore& st, const Scenario& s, const Verdict& v) {
  json certs = json::array();
  if (v.push) certs.push_back(st.put(s, "push", &v.e, v.n, push_to_json(s.cm, *v.push)));
  if (v.obstruction)
    certs.push_back(st.put(s, "obstruction", &*v.obstruction_at, v.n,
                           obstruction_to_json(s.cm, *v.obstruction_at, v.n, *v.obstruction)));
  json doc = verdict_to_json(v);
  doc["scenario"] = s.name;
  doc["certificates"] = certs;
  return st.put(s, "verdict", &v.e, v.n, doc);
}

json report(const Scenario& s, const std::string& kind, int n) {
  return {{"schema", "sigma.report"}, {"schema_version", kSchemaVersion}, {"kind", kind},
          {"scenario", s.name},       {"digest", s.digest()},            {"n", n}};
}

void print_verdict(const Verdict& v) {
  std::cout << verdict_name(v.kind) << "  " << v.e.str() << "  n=" << v.n;
  if (v.push) std::cout << "  gsh=" << val_str(v.push->report.gsh);
  if (v.obstruction) std::cout << "  obstruction k=" << v.obstruction->k << " at " << v.obstruction_at->str();
  if (!v.note.empty()) std::cout << "  (" << v.note << ")";
  std::cout << "\n";
}

int cmd_member(const Opts& o) {
  auto s = load(o);
  Dir e = direction(s, o);
  auto st = open_store(o);
  auto v = membership(s.cm, e, o.n, s.budgets);
  auto name = record(st, s, v);
  st.flush();
  print_verdict(v);
  std::cout << "verdict: " << shown(st, name) << "\n";
  return v.kind == Verdict::Kind::Unknown ? kUnknown : kOk;
}

int cmd_scan(const Opts& o) {
  auto s = load(o);
  auto dirs = sample_directions(*s.cm.M, s.samples, s.seed);
  auto vs = parallel_map<Verdict>(dirs.size(), s.jobs, [&](size_t i) { return membership(s.cm, dirs[i], o.n, s.budgets); });
  auto st = open_store(o);
  json doc = report(s, "scan", o.n), rows = json::array();
  size_t counts[3] = {0, 0, 0};
  for (auto& v : vs) {
    print_verdict(v);
    rows.push_back({{"direction", v.e.str()}, {"verdict", verdict_name(v.kind)}, {"file", record(st, s, v)}});
    counts[static_cast<int>(v.kind)]++;
  }
  doc["rows"] = rows;
  auto name = st.put(s, "scan", nullptr, o.n, doc);
  st.flush();
  std::cout << counts[0] << " member, " << counts[1] << " non-member, " << counts[2] << " unknown\n";
  std::cout << "report: " << shown(st, name) << "\n";
  return counts[2] == vs.size() ? kUnknown : kOk;
}

int cmd_push(const Opts& o) {
  auto s = load(o);
  Dir e = direction(s, o);
  std::string why;
  auto p = find_push(s.cm, e, o.n, s.budgets, &why);
  if (!p) {
    std::cout << "no push at " << e.str() << ": " << why << "\n";
    return kUnknown;
  }
  auto st = open_store(o);
  auto name = st.put(s, "push", &e, o.n, push_to_json(s.cm, *p));
  st.flush();
  std::cout << "push at " << e.str() << "  radius=" << p->radius << "  gsh=" << val_str(p->report.gsh)
            << (p->report.exact ? " (exact)" : " (windowed)");
  if (p->sigma) std::cout << "  |sigma|^2=" << scalar_str(p->sigma_norm2);
  std::cout << "\ncertificate: " << shown(st, name) << "\n";
  return kOk;
}

void print_lag(const LagEstimate& est) {
  for (auto& l : est.levels)
    std::cout << "  i=" << l.i << " s=" << scalar_str(l.s) << " cycles=" << l.cycles
              << (l.bounded ? " lag=" + scalar_str(l.lag) : std::string(" unbounded in window")) << "\n";
  if (est.lambda2) std::cout << "  constant lag^2 bound " << scalar_str(*est.lambda2) << "\n";
}

int cmd_ca(const Opts& o) {
  auto s = load(o);
  Dir e = direction(s, o);
  auto st = open_store(o);
  auto p = find_push(s.cm, e, o.n, s.budgets);
  LagEstimate est;
  if (p && p->sigma) {
    st.put(s, "push", &e, o.n, push_to_json(s.cm, *p));
    try {
      est = lag_from_push(s.cm, *p, s.budgets);
    } catch (const Error& err) {
      std::cout << "lag bound violated: " << err.what() << "\n";
      return kVerify;
    }
  } else {
    est = ca_check(s.cm, e, o.n, s.budgets.levels, Window{s.budgets.lag_window, {}}, s.budgets.lag_margin);
  }
  auto name = st.put(s, "lag", &e, o.n, lag_to_json(s.cm, e, o.n, est));
  st.flush();
  std::cout << "CA^" << o.n - 1 << " over " << e.str() << ": max lag " << scalar_str(est.max_lag()) << "\n";
  print_lag(est);
  std::cout << "certificate: " << shown(st, name) << "\n";
  bool any = false;
  for (auto& l : est.levels) any |= l.bounded;
  return any ? kOk : kUnknown;
}

int cmd_ca_point(const Opts& o) {
  auto s = load(o);
  Point b;
  try {
    b = o.point.empty() ? s.cm.M->origin() : s.cm.M->parse_point(o.point);
  } catch (const Error& err) {
    throw ParseError(std::string("--point: ") + err.what());
  }
  Window w{s.budgets.lag_window, {}};
  auto rows = ca_over_point(s.cm, b, o.n, w, s.budgets.lag_margin);
  std::vector<AVec> as;
  for (int j = 0; j < s.cm.F->rankA; ++j) {
    AVec a(s.cm.F->rankA, Scalar(0));
    a[j] = 1;
    as.push_back(a);
  }
  auto support = bounded_support_check(s.cm, b, as, s.budgets.lag_window);
  json doc = report(s, "ca-point", o.n), jr = json::array();
  doc["point"] = point_to_json(b);
  doc["window"] = w.R;
  bool any = false;
  std::cout << "CA over " << s.cm.M->point_str(b) << "\n";
  for (auto& r : rows) {
    any |= r.bounded;
    jr.push_back({{"i", r.i}, {"radius2", scalar_str(r.radius2)}, {"cycles", r.cycles}, {"bounded", r.bounded},
                  {"lag", scalar_str(r.lag)}});
    std::cout << "  i=" << r.i << " r^2<=" << scalar_str(r.radius2) << " cycles=" << r.cycles
              << (r.bounded ? " lag=" + scalar_str(r.lag) : std::string(" unbounded")) << "\n";
  }
  doc["rows"] = jr;
  doc["support_radius2"] = support ? json(scalar_str(*support)) : json(nullptr);
  std::cout << "  bounded support r^2=" << (support ? scalar_str(*support) : "none in budget") << "\n";
  auto st = open_store(o);
  auto name = st.put(s, "ca-point", nullptr, o.n, doc);
  st.flush();
  std::cout << "report: " << shown(st, name) << "\n";
  return any ? kOk : kUnknown;
}

int cmd_novikov(const Opts& o) {
  auto s = load(o);
  Dir e = direction(s, o);
  auto prof = tor_profile(s.cm, e, o.n, NovikovOptions{s.budgets.T, s.budgets.novikov_window});
  auto st = open_store(o);
  json doc = report(s, "novikov", o.n), rows = json::array(), certs = json::array();
  doc["direction"] = e.str();
  bool known = false;
  for (auto& r : prof) {
    std::cout << "Tor_" << r.k << " at T=" << scalar_str(r.T) << ": " << status_name(r.status);
    if (!r.reason.empty()) std::cout << "  (" << r.reason << ")";
    std::cout << "\n";
    known |= r.status != TorResult::Status::Unknown;
    rows.push_back({{"k", r.k}, {"status", status_name(r.status)}, {"reason", r.reason}});
    if (r.status == TorResult::Status::Obstruction) {
      auto name = st.put(s, "obstruction", &e, o.n, obstruction_to_json(s.cm, e, o.n, r));
      certs.push_back(name);
      std::cout << "certificate: " << shown(st, name) << "\n";
    }
  }
  doc["rows"] = rows;
  doc["certificates"] = certs;
  st.put(s, "novikov", &e, o.n, doc);
  st.flush();
  return known ? kOk : kUnknown;
}

int cmd_product(const Opts& o) {
  auto s = load(o);
  if (!s.is_product()) throw ParseError(o.scenario + " is not a product scenario");
  std::vector<Dir> joins;
  if (has_direction(o))
    joins.push_back(direction(s, o));
  else
    joins = sample_directions(*s.cm.M, s.samples, s.seed);
  auto rep = product_complement_check(s.left->cm, s.right->cm, s.cm, o.n, joins, s.budgets, s.jobs);
  auto st = open_store(o);
  json doc = report(s, "product", o.n), rows = json::array();
  for (size_t i = 0; i < rep.rows.size(); ++i) {
    auto& r = rep.rows[i];
    auto file = record(st, s, rep.verdicts[i]);
    std::cout << (r.ok ? "ok   " : "FAIL ") << r.join.str() << "  " << verdict_name(r.verdict) << "  predicted "
              << (r.predicted_member ? "member" : "complement") << "  [" << r.factors << "]\n";
    rows.push_back({{"join", r.join.str()},
                    {"verdict", verdict_name(r.verdict)},
                    {"predicted_member", r.predicted_member},
                    {"factors", r.factors},
                    {"ok", r.ok},
                    {"file", file}});
  }
  doc["rows"] = rows;
  doc["mismatches"] = rep.mismatches;
  doc["undetermined"] = rep.undetermined;
  auto name = st.put(s, "product", nullptr, o.n, doc);
  st.flush();
  std::cout << rep.rows.size() << " joins, " << rep.mismatches << " mismatches, " << rep.undetermined
            << " undetermined\nreport: " << shown(st, name) << "\n";
  if (rep.mismatches) return kVerify;
  return rep.undetermined == rep.rows.size() ? kUnknown : kOk;
}

int cmd_expand(const Opts& o) {
  auto s = load(o);
  std::vector<Dir> dirs;
  if (has_direction(o))
    dirs.push_back(direction(s, o));
  else
    dirs = sample_directions(*s.cm.M, s.samples, s.seed);
  ZeroLag zl;
  try {
    zl = zero_lag_transform(s.cm, dirs, o.n, s.budgets);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& err) {
    std::cout << "expansion not available: " << err.what() << "\n";
    return kUnknown;
  }
  Scenario x = s;
  x.name = s.name + "-expanded";
  x.cm = zl.cm;
  std::vector<Q> levels;
  for (int k = 0; k < 8; ++k) levels.push_back(k);
  auto st = open_store(o);
  json doc = report(s, "expand", o.n), rows = json::array(), certs = json::array();
  doc["expansions"] = zl.expansions;
  doc["setting"] = zl.cm.to_json();
  Q worst = 0;
  for (auto& e : dirs) {
    auto est = ca_check(zl.cm, e, o.n, levels, Window{s.budgets.lag_window, {}}, s.budgets.lag_margin);
    auto name = st.put(x, "lag", &e, o.n, lag_to_json(zl.cm, e, o.n, est));
    certs.push_back(name);
    worst = std::max<Q>(worst, est.max_lag());
    rows.push_back({{"direction", e.str()}, {"max_lag", scalar_str(est.max_lag())}, {"bounded", est.all_bounded()}});
    std::cout << e.str() << "  max lag " << scalar_str(est.max_lag()) << (est.all_bounded() ? "" : "  (unbounded level)")
              << "\n";
  }
  doc["rows"] = rows;
  doc["certificates"] = certs;
  auto name = st.put(s, "expand", nullptr, o.n, doc);
  st.flush();
  std::cout << zl.expansions << " expansions, worst lag " << scalar_str(worst) << "\nreport: " << shown(st, name) << "\n";
  return kOk;
}

int cmd_verify(const Opts& o) {
  int code = kOk;
  for (auto& f : o.files) {
    std::string why;
    bool ok;
    try {
      ok = verify_file(f, &why);
    } catch (const ParseError& err) {
      std::cout << "ERROR " << f << ": " << err.what() << "\n";
      if (code == kOk) code = kParse;
      continue;
    }
    std::cout << (ok ? "OK   " : "FAIL ") << f << (ok ? "" : ": " + why) << "\n";
    if (!ok) code = kVerify;
  }
  return code;
}

int cmd_selftest(const Opts& o) {
  uint64_t seed = o.seed.value_or(1);
  int scale = o.samples.value_or(1);
  std::vector<PropertyReport> all;
  auto add = [&](std::vector<PropertyReport> r) { all.insert(all.end(), r.begin(), r.end()); };
  add(valuation_laws(200 * scale, seed));
  add(shift_laws(40 * scale, seed));
  add(comparison_laws(10 * scale, seed));
  add(novikov_laws(20 * scale, seed));
  bool ok = true;
  for (auto& r : all) {
    std::cout << (r.ok() ? "ok   " : "FAIL ") << r.name << "  " << r.cases << " cases";
    if (r.failures) std::cout << ", " << r.failures << " failures; first: " << r.first_failure;
    std::cout << "\n";
    ok &= r.ok();
  }
  return ok ? kOk : kVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sigma invariants over CAT(0) models: pushes, lags and Novikov obstructions"};
  app.require_subcommand(1);
  Opts o;

  auto budget_flags = [&](CLI::App* c) {
    c->add_option("--n", o.n, "dimension n (default 1)");
    c->add_option("--window", o.window, "largest ball radius for push searches");
    c->add_option("--trunc", o.trunc, "Novikov truncation T");
    c->add_option("--nu", o.nu, "required push");
    c->add_option("--samples", o.samples, "number of sampled directions");
    c->add_option("--seed", o.seed, "sampling seed");
    c->add_option("--jobs", o.jobs, "worker threads");
    c->add_option("--out", o.out, "certificate directory (default $SIGMA_CERT_DIR or ./sigma-certs)");
  };
  auto dir_flags = [&](CLI::App* c) {
    c->add_option("--dir", o.dir, "direction: x,y[,...] (product: \"dirA;dirB\")");
    c->add_option("--end", o.end, "tree end: omega or an edge word");
    c->add_option("--join", o.join, "join weights w,w' for product scenarios");
  };
  std::map<std::string, std::function<int(const Opts&)>> run{
      {"member", cmd_member},   {"scan", cmd_scan},       {"push", cmd_push},       {"ca", cmd_ca},
      {"ca-point", cmd_ca_point}, {"novikov", cmd_novikov}, {"product", cmd_product}, {"expand", cmd_expand}};
  std::map<std::string, std::string> help{{"member", "verdict for one direction"},
                                          {"scan", "verdicts for sampled directions"},
                                          {"push", "search for a push certificate"},
                                          {"ca", "controlled acyclicity over a direction, with lags"},
                                          {"ca-point", "controlled acyclicity over a point (--point)"},
                                          {"novikov", "truncated Novikov Tor profile"},
                                          {"product", "check the product formula on joins"},
                                          {"expand", "zero-lag transform, then lags at 8 levels"}};
  for (auto& [name, h] : help) {
    auto* c = app.add_subcommand(name, h);
    c->add_option("scenario", o.scenario, "scenario TOML file")->required();
    budget_flags(c);
    if (name == "ca-point")
      c->add_option("--point", o.point, "base point (default the model origin)");
    else if (name != "scan")
      dir_flags(c);
  }
  auto* verify = app.add_subcommand("verify", "re-check certificate, verdict or report files");
  verify->add_option("files", o.files, "JSON files")->required();
  auto* self = app.add_subcommand("selftest", "randomized law checks");
  self->add_option("--seed", o.seed, "seed");
  self->add_option("--samples", o.samples, "scale factor for case counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParse;
  }

  try {
    if (verify->parsed()) return cmd_verify(o);
    if (self->parsed()) return cmd_selftest(o);
    for (auto* c : app.get_subcommands()) return run.at(c->get_name())(o);
  } catch (const ParseError& e) {
    std::cerr << "sigma: " << e.what() << "\n";
    return kParse;
  } catch (const Error& e) {
    std::cerr << "sigma: " << e.what() << "\n";
    return kFail;
  }
  return kParse;
}
