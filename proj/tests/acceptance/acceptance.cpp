// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "sgm/properties.hpp"
#include "sgm/store.hpp"

using namespace sgm;
namespace fs = std::filesystem;

#ifndef SGM_SCENARIO_DIR
#define SGM_SCENARIO_DIR "scenarios"
#endif

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

std::string scen(const char* name) { return std::string(SGM_SCENARIO_DIR) + "/" + name; }

// certificates from criteria 4-7 carrying σ, for the lag check
struct Stored {
  const ControlledModel* cm;
  PushCertificate cert;
  std::string label;
};

struct Run {
  CertStore store;
  std::map<std::string, Scenario> scenarios;
  std::vector<Stored> with_sigma;
  std::vector<PushCertificate> z2_certs;

  explicit Run(const std::string& dir) : store(dir) {}

  const Scenario& get(const char* file) {
    auto it = scenarios.find(file);
    if (it == scenarios.end()) it = scenarios.emplace(file, load_scenario(scen(file))).first;
    return it->second;
  }
  void keep_push(const Scenario& s, const PushCertificate& c, const std::string& label) {
    store.put(s, "push", &c.e, c.n, push_to_json(s.cm, c));
    if (c.sigma) with_sigma.push_back({&s.cm, c, label});
  }
  void keep_obstruction(const Scenario& s, const Dir& e, int n, const TorResult& r) {
    store.put(s, "obstruction", &e, n, obstruction_to_json(s.cm, e, n, r));
  }
};

Outcome reports_ok(const std::vector<PropertyReport>& reps, size_t min_cases) {
  Outcome o;
  std::ostringstream os;
  for (auto& r : reps) {
    os << r.name << ": " << r.cases << "; ";
    if (!r.ok() || r.cases < min_cases) {
      o.ok = false;
      os << "[" << r.failures << " failures" << (r.first_failure.empty() ? "" : ", first: " + r.first_failure) << "] ";
    }
  }
  o.detail = os.str();
  return o;
}

Outcome c1(Run&) { return reports_ok(valuation_laws(1000, 11), 1000); }

Outcome c2(Run&) { return reports_ok(shift_laws(200, 12), 200); }

Outcome c3(Run&) {
  auto reps = comparison_laws(50, 13);
  auto o = reports_ok(reps, 50);
  return o;
}

Outcome c4(Run& run) {
  const auto& s = run.get("z2.toml");
  Budgets b = s.budgets;
  b.nu = 1;
  auto dirs = sample_directions(*s.cm.M, 64, s.seed);
  Outcome o;
  size_t pushes = 0, vanish = 0;
  for (auto& e : dirs) {
    std::string why;
    auto c = find_push(s.cm, e, 1, b, &why);
    if (!c || !verify_push(s.cm, *c, &why)) {
      o.ok = false;
      o.detail = "no verified push at " + e.str() + ": " + why;
      return o;
    }
    ++pushes;
    run.keep_push(s, *c, "Z^2 " + e.str());
    run.z2_certs.push_back(*c);
    for (Q T : {Q(8), Q(16)})
      for (int k = 0; k <= 1; ++k) {
        auto r = tor_vanishing_test(s.cm, e, k, NovikovOptions{T, b.novikov_window});
        if (r.status != TorResult::Status::Vanishes) {
          o.ok = false;
          o.detail = "Tor_" + std::to_string(k) + " at T=" + scalar_str(T) + " toward " + e.str() + ": " +
                     status_name(r.status) + " " + r.reason;
          return o;
        }
        ++vanish;
      }
  }
  o.detail = std::to_string(dirs.size()) + " directions, " + std::to_string(pushes) + " verified pushes, " +
             std::to_string(vanish) + " vanishing Tor tests";
  o.ok = dirs.size() == 64;
  return o;
}

// (a-1)^{-1} as a truncated series whose floor is the first omitted term
NovElem inverse_series(const NovikovRing& R, const GroupRing& A, int gen, const Q& chi, const Q& T) {
  Q step = chi > 0 ? chi : -chi;
  Q ratio = T / step;
  mpz_class K = ratio.get_num() / ratio.get_den() + 2;
  long k = K.get_si();
  const auto& G = *A.group();
  GRElem s;
  for (long i = 0; i <= k; ++i) {
    if (chi > 0)
      s = A.add(s, A.mono(G.gen(gen, i), -1));  // -(1 + a + a^2 + ...)
    else if (i >= 1)
      s = A.add(s, A.mono(G.gen(gen, -i), 1));  // a^-1 + a^-2 + ...
  }
  return R.from(s, Val(step * (k + 1)));
}

Outcome c5(Run& run) {
  const auto& s = run.get("f2.toml");
  Budgets b = s.budgets;
  b.window = 4;
  const auto& F = *s.cm.F;
  auto dirs = sample_directions(*s.cm.M, 16, s.seed);
  GroupRing A(F.G, F.K);
  int ia = F.index_of(1, "x_a"), ib = F.index_of(1, "x_b");
  Outcome o;
  for (auto& e : dirs) {
    if (find_push(s.cm, e, 1, b)) return {false, "unexpected push at " + e.str()};
    NovikovOptions opt{b.T, b.novikov_window};
    auto r = tor_vanishing_test(s.cm, e, 1, opt);
    std::string why;
    if (r.status != TorResult::Status::Obstruction || !verify_obstruction(s.cm, e, r, &why))
      return {false, "no verified obstruction at " + e.str() + ": " + r.reason + why};
    run.keep_obstruction(s, e, 1, r);
    auto v = membership(s.cm, e, 1, b);
    if (v.kind != Verdict::Kind::NonMember) return {false, std::string("verdict ") + verdict_name(v.kind) + " at " + e.str()};

    // series oracle: the kernel of (x_a, x_b) -> (a-1) x_a + (b-1) x_b is spanned by ((1-b)(a-1)^{-1}, 1)
    auto chi = *discrete_character(*s.cm.M, e);
    NovikovRing R(F.G, F.K, chi);
    Q ca = chi.on_gens[0], cb = chi.on_gens[1];
    Q big = b.T + 2 * (abs(ca) + abs(cb));
    auto deep = tor_vanishing_test(s.cm, e, 1, NovikovOptions{big, b.novikov_window});
    if (deep.status != TorResult::Status::Obstruction) return {false, "no deep witness at " + e.str()};
    bool use_a = ca != 0;
    int num = use_a ? ia : ib, den = use_a ? ib : ia;
    const Elem other = F.G->gen(use_a ? 1 : 0);
    NovElem one_minus = R.from(A.sub(A.one(), A.mono(other, 1)));
    NovElem series = inverse_series(R, A, use_a ? 0 : 1, use_a ? ca : cb, big);
    NovElem predicted = R.mul(deep.witness[den], R.mul(one_minus, series));
    Q f = b.T;
    for (auto* u : {&deep.witness[num], &predicted})
      if (u->floor && *u->floor < f) f = *u->floor;
    if (f < b.T) return {false, "oracle comparison too shallow at " + e.str()};
    if (!R.agree_below(deep.witness[num], predicted, b.T))
      return {false, "witness differs from the series oracle at " + e.str()};
  }
  o.detail = "16 directions: no push on ball(4), verified obstruction in dimension 1 matching the series oracle, NonMember";
  return o;
}

Outcome c6(Run& run) {
  const auto& s = run.get("bs2-euclid.toml");
  int members = 0, obstructed = 0;
  std::string which;
  for (const char* d : {"1", "-1"}) {
    Dir e = s.cm.M->parse_dir(d);
    auto c = find_push(s.cm, e, 1, s.budgets);
    if (c && verify_push(s.cm, *c)) {
      ++members;
      which = d;
      run.keep_push(s, *c, std::string("BS(1,2) ") + d);
      continue;
    }
    auto r = tor_vanishing_test(s.cm, e, 1, NovikovOptions{s.budgets.T, s.budgets.novikov_window});
    if (r.status == TorResult::Status::Obstruction && verify_obstruction(s.cm, e, r)) {
      ++obstructed;
      run.keep_obstruction(s, e, 1, r);
    }
  }
  bool ok = members == 1 && obstructed == 1;
  return {ok, std::to_string(members) + " member, " + std::to_string(obstructed) + " obstructed; member sign " + which};
}

Outcome product_case(Run& run, const char* file, int samples, bool mixed_only_member) {
  const auto& s = run.get(file);
  auto joins = sample_directions(*s.cm.M, samples, s.seed);
  auto rep = product_complement_check(s.left->cm, s.right->cm, s.cm, 1, joins, s.budgets, s.jobs);
  std::ostringstream os;
  size_t mixed = 0, pure = 0;
  for (size_t i = 0; i < rep.rows.size(); ++i) {
    auto& r = rep.rows[i];
    auto& v = rep.verdicts[i];
    bool is_mixed = r.join.w1 > 0 && r.join.w2 > 0;
    (is_mixed ? mixed : pure)++;
    if (v.push) {
      if (!verify_push(s.cm, *v.push)) return {false, "unverified push at " + r.join.str()};
      run.keep_push(s, *v.push, std::string(file) + " " + r.join.str());
    }
    if (v.obstruction) run.keep_obstruction(s, *v.obstruction_at, 1, *v.obstruction);
    bool want_member = is_mixed || !mixed_only_member;
    if ((v.kind == Verdict::Kind::Member) != want_member || v.kind == Verdict::Kind::Unknown)
      return {false, std::string(file) + ": " + r.join.str() + " is " + verdict_name(v.kind)};
  }
  if (rep.mismatches || rep.undetermined) return {false, std::string(file) + ": formula mismatches or undetermined joins"};
  os << file << ": " << mixed << " mixed, " << pure << " pure joins";
  return {true, os.str()};
}

Outcome c7(Run& run) {
  auto a = product_case(run, "f2xf2.toml", 12, true);
  if (!a.ok) return a;
  auto z = product_case(run, "zxz.toml", 12, false);
  return {z.ok, a.detail + "; " + z.detail};
}

Outcome c8(Run& run) {
  // the default control gives ‖σ‖ = 0; the boundary control adds certificates with ‖σ‖ > 0
  const auto& zb = run.get("z2-boundary.toml");
  for (auto& e : sample_directions(*zb.cm.M, 16, zb.seed))
    if (auto c = find_push(zb.cm, e, 1, zb.budgets)) run.keep_push(zb, *c, "Z^2 boundary " + e.str());
  size_t checked = 0, bounding = 0;
  Q worst = 0, largest = 0;
  for (auto& st : run.with_sigma) {
    largest = std::max<Q>(largest, st.cert.sigma_norm2);
    const auto& cm = *st.cm;
    Budgets b;
    LagEstimate est;
    try {
      est = lag_from_push(cm, st.cert, b);
    } catch (const Error& e) {
      return {false, st.label + ": " + e.what()};
    }
    // lag_from_push already throws on excess; recheck against ‖σ‖ here in squared form
    Q s2 = st.cert.sigma_norm2 * cm.M->scale2(st.cert.e);
    for (auto& c : est.certs) {
      ++bounding;
      if (c.lag * c.lag > s2) return {false, st.label + ": lag " + scalar_str(c.lag) + " exceeds ‖σ‖"};
      worst = std::max<Q>(worst, c.lag);
    }
    ++checked;
  }
  if (checked == 0) return {false, "no certificates with σ"};
  return {true, std::to_string(checked) + " certificates, " + std::to_string(bounding) + " bounding chains, worst lag " +
                    scalar_str(worst) + ", largest ‖σ‖² " + scalar_str(largest)};
}

Outcome c9(Run& run) {
  const auto& s = run.get("z2-boundary.toml");
  auto dirs = sample_directions(*s.cm.M, 8, s.seed);
  auto zl = zero_lag_transform(s.cm, dirs, 1, s.budgets);
  std::vector<Q> levels;
  for (int k = 0; k < 8; ++k) levels.push_back(k);
  size_t cycles = 0;
  Q before = 0;
  for (auto& e : dirs) {
    before = std::max<Q>(before, ca_check(s.cm, e, 1, levels, Window{2, {}}, 2).max_lag());
    auto est = ca_check(zl.cm, e, 1, levels, Window{2, {}}, 2);
    for (auto& l : est.levels) {
      if (l.i != 0) continue;
      if (l.cycles == 0) return {false, "no 0-cycles at level " + scalar_str(l.s) + " toward " + e.str()};
      if (!l.bounded || l.lag != 0)
        return {false, "lag " + scalar_str(l.lag) + " at level " + scalar_str(l.s) + " toward " + e.str()};
      cycles += l.cycles;
    }
  }
  return {true, std::to_string(zl.expansions) + " expansions, " + std::to_string(cycles) +
                    " horoball 0-cycles at 8 levels bound with lag 0 (worst lag before: " + scalar_str(before) + ")"};
}

Outcome c10(Run& run) {
  const auto& t = run.get("zxz.toml");  // tensor_complex(F(Z), F(Z))
  auto G = t.cm.F->G;
  Presentation pr;
  pr.G = G;
  pr.relators = {{{0, 1}, {1, 1}, {0, -1}, {1, -1}}};
  auto M = std::make_shared<EuclideanModel>(G, std::vector<std::vector<Q>>{{1, 0}, {0, 1}});
  auto fox = ControlledModel::standard(M, fox_resolution(pr));
  auto tensor = ControlledModel::standard(M, t.cm.F);
  auto moved = ControlledModel::standard(M, fox.F, Point{Q(1, 2), Q(-1, 3)});
  auto dirs = sample_directions(*M, 16, 3);
  Budgets b = t.budgets;
  auto r1 = invariance_crosscheck(fox, tensor, dirs, 1, b, 4);
  auto r2 = invariance_crosscheck(fox, moved, dirs, 1, b, 4);
  int bad = 0, transported = 0;
  for (auto* r : {&r1, &r2})
    for (auto& row : r->rows) {
      if (row.v1 != row.v2) ++bad;
      transported += row.transported;
      if (row.transported && row.gsh < row.bound) ++bad;
    }
  bool ok = dirs.size() == 16 && r1.agree && r2.agree && r1.transports_ok && r2.transports_ok && bad == 0;
  return {ok, "16 directions x (fox vs tensor, base 0 vs (1/2,-1/3)); " + std::to_string(transported) +
                  " transported pushes verified"};
}

Outcome c11(Run& run) {
  const auto& s = run.get("bs2-tree.toml");
  const auto& G = *s.cm.F->G;
  std::vector<Elem> gs;
  std::set<Point> seen;
  for (auto& g : G.ball(3)) {
    auto p = s.cm.M->act(g, s.cm.M->origin());
    if (seen.insert(p).second) gs.push_back(g);
    if (gs.size() == 8) break;
  }
  if (gs.size() < 8) return {false, "fewer than 8 vertices"};
  std::map<int, std::set<Q>> lags;
  for (auto& g : gs) {
    auto b = s.cm.M->act(g, s.cm.M->origin());
    auto rows = ca_over_point(s.cm, b, 1, Window{s.budgets.lag_window, g}, s.budgets.lag_margin);
    for (auto& r : rows) {
      if (r.i != -1 && r.i != 0) continue;
      if (!r.bounded) return {false, "unbounded at " + s.cm.M->point_str(b) + " in dimension " + std::to_string(r.i)};
      lags[r.i].insert(r.lag);
    }
  }
  if (!lags.count(-1) || !lags.count(0)) return {false, "missing dimensions"};
  Q lam = 0;
  for (auto& [i, ls] : lags) lam = std::max<Q>(lam, *ls.rbegin());
  bool uniform = lags[-1].size() == 1 && lags[0].size() == 1;
  return {uniform, "8 vertices, lag per dimension {" + scalar_str(*lags[-1].rbegin()) + ", " + scalar_str(*lags[0].rbegin()) +
                       "}, uniform bound " + scalar_str(lam) + (uniform ? "" : " (varies between vertices)")};
}

Outcome c12(Run& run) {
  const auto& s = run.get("z2.toml");
  if (run.z2_certs.empty()) return {false, "criterion 4 produced no certificates"};
  size_t samples = 0;
  for (auto& c : run.z2_certs) {
    auto rep = tits_openness_probe(s.cm, c, Q(1), 3);
    if (!rep.ok || rep.margin2 <= 0) return {false, "probe fails at " + c.e.str()};
    samples += rep.samples.size();
  }
  Dir e = s.cm.M->parse_dir("1,0");
  auto c = find_push(s.cm, e, 1, s.budgets);
  if (!c) return {false, "no push at (1,0)"};
  auto bad = *c;
  bad.phi = FinitaryMap::right_mult(s.cm.F, s.cm.F->G->parse("b"), 1);
  auto rb = tits_openness_probe(s.cm, bad, Q(1), 3);
  bool ok = !rb.ok && rb.margin2 == 0;
  return {ok, std::to_string(run.z2_certs.size()) + " certificates, " + std::to_string(samples) +
                  " perturbed directions positive; mult-by-b reports " + (rb.ok ? "no failure" : "a boundary failure")};
}

Outcome c13(Run& run) {
  run.store.flush();
  // (scenario digest, direction) -> highest push dimension / lowest obstruction degree
  std::map<std::pair<std::string, std::string>, int> push_n, obs_k;
  size_t certs = 0;
  for (auto& [name, entry] : run.store.index()["entries"].items()) {
    auto kind = entry.value("kind", "");
    if (kind != "push" && kind != "obstruction") continue;
    std::ifstream in(fs::path(run.store.dir()) / name);
    json j = json::parse(in);
    std::string why;
    if (!verify_certificate(j, &why)) return {false, name + " no longer verifies: " + why};
    ++certs;
    std::pair<std::string, std::string> key{entry.value("digest", ""), dir_from_json(j.at("direction")).str()};
    if (kind == "push") {
      int n = j.at("n");
      auto [it, fresh] = push_n.emplace(key, n);
      if (!fresh) it->second = std::max(it->second, n);
    } else {
      int k = j.at("tor").at("k");
      auto [it, fresh] = obs_k.emplace(key, k);
      if (!fresh) it->second = std::min(it->second, k);
    }
  }
  size_t bad = 0;
  for (auto& [key, k] : obs_k) {
    auto it = push_n.find(key);
    if (it != push_n.end() && k <= it->second) ++bad;
  }
  return {bad == 0 && certs > 0, std::to_string(certs) + " stored certificates, " + std::to_string(bad) + " conflicts"};
}

}  // namespace

int main(int argc, char** argv) {
  std::string dir = argc > 1 ? argv[1] : "acceptance-certs";
  fs::remove_all(dir);
  Run run(dir);
  std::vector<std::pair<const char*, std::function<Outcome(Run&)>>> crit{
      {"valuation laws", c1},          {"shift arithmetic", c2},        {"constructive comparison", c3},
      {"Z^2 full sphere", c4},         {"F2 empty Sigma^1", c5},        {"BS(1,2) exactly one", c6},
      {"product formula", c7},         {"constant-lag bound", c8},      {"zero-lag transform", c9},
      {"invariance", c10},             {"CA over tree vertices", c11},  {"Tits openness probe", c12},
      {"containment-chain consistency", c13}};
  int failed = 0;
  for (size_t i = 0; i < crit.size(); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = crit[i].second(run);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.ok;
    std::printf("%s %2zu %s (%.1fs): %s\n", o.ok ? "PASS" : "FAIL", i + 1, crit[i].first, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
