#include <algorithm>
#include <map>
#include <set>

#include "sgm/sigma.hpp"

namespace sgm {

const char* verdict_name(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::Member: return "member";
    case Verdict::Kind::NonMember: return "non-member";
    default: return "unknown";
  }
}

Verdict membership(const ControlledModel& cm, const Dir& e, int n, const Budgets& b) {
  Verdict v;
  v.e = e;
  v.n = n;
  cm.M->check_dir(e);
  if (n < 0) {
    v.kind = Verdict::Kind::Member;
    v.note = "Σ^-1 is the whole boundary";
    return v;
  }
  if (n > cm.F->top()) throw Error("the resolution stops at dimension " + std::to_string(cm.F->top()));
  std::string why;
  auto push = find_push(cm, e, n, b, &why);
  v.tried.push_back("push search on balls up to radius " + std::to_string(b.window) + (push ? "" : ": " + why));
  if (push) {
    v.kind = Verdict::Kind::Member;
    v.push = std::move(push);
  }
  if (v.push && !b.crosscheck) return v;
  std::vector<Dir> closure;
  if (cm.M->translation_action())
    closure.push_back(e);
  else
    closure = orbit_closure_sample(*cm.M, e, b.orbit_depth);
  NovikovOptions opt{b.T, b.novikov_window};
  for (auto& eh : closure) {
    for (auto& r : tor_profile(cm, eh, n, opt)) {
      if (r.status == TorResult::Status::Obstruction && !v.obstruction) {
        v.obstruction = r;
        v.obstruction_at = eh;
      } else if (r.status == TorResult::Status::Unknown) {
        v.tried.push_back("Tor_" + std::to_string(r.k) + " at " + eh.str() + ": " + r.reason);
      }
    }
    if (v.obstruction) break;
  }
  if (v.obstruction) {
    if (v.push)
      v.note = "conflict: push found and Tor_" + std::to_string(v.obstruction->k) + " does not vanish";
    else
      v.kind = Verdict::Kind::NonMember;
  } else if (!v.push) {
    v.note = "no push within budget and no obstruction found";
  }
  return v;
}

ZeroLag zero_lag_transform(const ControlledModel& cm, const std::vector<Dir>& dirs, int n, const Budgets& b) {
  if (n < 1) throw Error("the zero-lag transform needs n >= 1");
  if (dirs.empty()) throw Error("no directions sampled");
  ZeroLag out;
  for (auto& e : dirs) {
    auto v = membership(cm, e, n - 1, b);
    if (v.kind != Verdict::Kind::Member || !v.push)
      throw Error("hypothesis unverified: " + e.str() + " is not certified in Σ^" + std::to_string(n - 1));
    if (!v.push->sigma) throw Error("push at " + e.str() + " has no homotopy");
    out.pushes.push_back(*v.push);
  }
  ComplexPtr F = cm.F;
  ControlledModel cur = cm;
  const int r0 = cm.F->rank(0);
  std::vector<std::vector<Chain>> xi(r0);
  for (int k = 0; k <= n - 1; ++k)
    for (int x = 0; x < cm.F->rank(k); ++x)
      for (auto& p : out.pushes) {
        Chain cx = cm.F->basis(k, x);
        Chain c = p.phi.apply(cx);
        if (k >= 1) cm.F->add_to(c, p.sigma->apply(cm.F->boundary(cx)));
        Chain d = p.sigma->apply(cx);
        auto ex = elementary_expansion(*F, cx, c, d);
        cur = cur.expanded(ex, cx, c, d);
        F = ex.F;
        ++out.expansions;
        if (k == 0) xi[x].push_back(F->basis(1, ex.xi));
      }
  out.F = F;
  out.cm = cur;
  out.homotopy.src = out.homotopy.dst = F;
  out.homotopy.degree = 1;
  out.homotopy.table.assign(1, std::vector<std::vector<Chain>>(F->rank(0)));
  for (int x = 0; x < r0; ++x) out.homotopy.table[0][x] = xi[x];
  return out;
}

namespace {

struct FactorTable {
  const ControlledModel* cm;
  const Budgets* b;
  std::map<std::pair<std::string, int>, Verdict::Kind> memo;
  Verdict::Kind get(const Dir& e, int p) {
    auto key = std::make_pair(e.str(), p);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    auto k = membership(*cm, e, p, *b).kind;
    memo.emplace(key, k);
    return k;
  }
};

}  // namespace

ProductReport product_complement_check(const ControlledModel& cmA, const ControlledModel& cmB, const ControlledModel& cmP,
                                       int n, const std::vector<Dir>& joins, const Budgets& b, int jobs) {
  if (!cmP.F->K.is_field()) throw Error("the product formula needs a field of coefficients");
  FactorTable fa{&cmA, &b, {}}, fb{&cmB, &b, {}};
  for (auto& j : joins) {
    if (j.kind != Dir::Kind::Join || j.sub.size() != 2) throw Error("expected join directions");
    if (j.w1 > 0 && fa.get(j.sub[0], 0) != Verdict::Kind::Member)
      throw Error("Σ^0 is not full on the left factor at " + j.sub[0].str());
    if (j.w2 > 0 && fb.get(j.sub[1], 0) != Verdict::Kind::Member)
      throw Error("Σ^0 is not full on the right factor at " + j.sub[1].str());
  }
  using K = Verdict::Kind;
  ProductReport rep;
  std::vector<std::optional<bool>> predicted(joins.size());
  for (size_t t = 0; t < joins.size(); ++t) {
    auto& j = joins[t];
    ProductRow row;
    row.join = j;
    std::string summary;
    std::optional<bool> comp;
    if (j.w2 == 0 || j.w1 == 0) {
      bool left = j.w2 == 0;
      auto k = left ? fa.get(j.sub[0], n) : fb.get(j.sub[1], n);
      summary = std::string(left ? "A" : "B") + ":Σ^" + std::to_string(n) + "=" + verdict_name(k);
      if (k != K::Unknown) comp = k == K::NonMember;
    } else {
      bool any_comp = false, all_member = true;
      for (int p = 0; p <= n; ++p) {
        auto ka = fa.get(j.sub[0], p), kb = fb.get(j.sub[1], n - p);
        summary += (p ? " " : "") + std::string("A:Σ^") + std::to_string(p) + "=" + verdict_name(ka) + ",B:Σ^" +
                   std::to_string(n - p) + "=" + verdict_name(kb);
        if (ka == K::NonMember && kb == K::NonMember) any_comp = true;
        if (ka != K::Member && kb != K::Member) all_member = false;
      }
      if (any_comp)
        comp = true;
      else if (all_member)
        comp = false;
    }
    row.factors = summary;
    predicted[t] = comp;
    row.predicted_member = comp.has_value() && !*comp;
    rep.rows.push_back(row);
  }
  rep.verdicts = parallel_map<Verdict>(joins.size(), jobs, [&](size_t t) { return membership(cmP, joins[t], n, b); });
  for (size_t t = 0; t < joins.size(); ++t) {
    auto& row = rep.rows[t];
    row.verdict = rep.verdicts[t].kind;
    if (!predicted[t] || row.verdict == K::Unknown) {
      ++rep.undetermined;
      continue;
    }
    bool member = row.verdict == K::Member;
    row.ok = member == row.predicted_member;
    if (!row.ok) ++rep.mismatches;
  }
  return rep;
}

TitsReport tits_openness_probe(const ControlledModel& cm, const PushCertificate& cert, const Q& radius, int samples) {
  if (cm.M->kind() != "euclidean") throw Error("the openness probe works on Euclidean models");
  if (!cert.phi.equivariant()) throw Error("the openness probe needs an equivariant push");
  const auto& F = *cm.F;
  const auto& u = cert.e.u;
  const size_t d = u.size();
  TitsReport rep;
  std::set<std::vector<Q>> forms;
  for (int k = 0; k <= cert.n; ++k)
    for (int x = 0; x < F.rank(k); ++x) {
      auto img = cert.phi.table[k][x];
      if (img.zero()) continue;
      for (auto& q : cm.points(k, Cell{x, F.G->id()}))
        for (auto& p : cm.points(img)) {
          std::vector<Q> l(d);
          for (size_t i = 0; i < d; ++i) l[i] = p[i] - q[i];
          forms.insert(l);
        }
    }
  rep.forms.assign(forms.begin(), forms.end());
  Q uu = dot(u, u);
  bool positive = true;
  std::optional<Q> m2;
  for (auto& l : rep.forms) {
    Q lu = dot(l, u);
    if (lu <= 0) {
      positive = false;
      break;
    }
    Q r = lu * lu / (dot(l, l) * uu);
    if (!m2 || r < *m2) m2 = r;
  }
  // a zero map pushes arbitrarily far everywhere
  rep.margin2 = positive ? (m2 ? *m2 : Q(1)) : Q(0);

  auto gsh = [&](const std::vector<Q>& w) {
    return shift_report(cm, cm, Dir::vec(w), cert.phi, Window{1, {}}, 0, cert.n).gsh;
  };
  auto record = [&](const std::vector<Q>& w) {
    Val g = gsh(w);
    Dir dw = Dir::vec(w);
    rep.samples.emplace_back(dw, g ? *g : Q(-1));
    if (g && *g <= 0) rep.failing.push_back(dw);
  };
  record(u);
  if (radius > 0 && positive && samples > 0) {
    Q rho2 = std::min<Q>(radius * radius, rep.margin2) * Q(99, 100);
    for (size_t j = 0; j < d; ++j) {
      // e_j projected onto u^⊥
      std::vector<Q> v(d, Q(0));
      v[j] = 1;
      Q c = u[j] / uu;
      for (size_t i = 0; i < d; ++i) v[i] -= c * u[i];
      Q vv = dot(v, v);
      if (vv == 0) continue;
      Q X = rho2 * uu / vv;
      Q t0 = X / sqrt_upper(X);
      for (int s = 1; s <= samples; ++s)
        for (int sg : {1, -1}) {
          Q t = t0 * s / samples * sg;
          std::vector<Q> w(d);
          for (size_t i = 0; i < d; ++i) w[i] = u[i] + t * v[i];
          record(w);
        }
    }
  }
  rep.ok = positive && rep.failing.empty();
  return rep;
}

InvarianceReport invariance_crosscheck(const ControlledModel& cm1, const ControlledModel& cm2, const std::vector<Dir>& dirs,
                                       int n, const Budgets& b, int jobs) {
  if (!cm1.F->G->same_as(*cm2.F->G)) throw Error("the two complexes resolve different groups");
  Chooser ch{std::nullopt, nullptr, true};
  auto alpha = lift_finitary(cm1.F, cm2.F, ch, {b.homotopy_radius, 0, n});
  auto beta = lift_finitary(cm2.F, cm1.F, ch, {b.homotopy_radius, 0, n});
  Q na2 = norm2(cm1, cm2, alpha), nb2 = norm2(cm2, cm1, beta);
  InvarianceReport rep;
  rep.rows = parallel_map<InvarianceRow>(dirs.size(), jobs, [&](size_t t) {
    const Dir& e = dirs[t];
    InvarianceRow row;
    row.e = e;
    auto v1 = membership(cm1, e, n, b), v2 = membership(cm2, e, n, b);
    row.v1 = v1.kind;
    row.v2 = v2.kind;
    if (v1.push && v1.push->report.exact && v1.push->report.gsh) {
      Q g = *v1.push->report.gsh;
      Q s2 = cm1.M->scale2(e);
      Q L = sqrt_upper(na2 * s2) + sqrt_upper(nb2 * s2);
      Q kq = L / g;
      mpz_class fl;
      mpz_fdiv_q(fl.get_mpz_t(), kq.get_num_mpz_t(), kq.get_den_mpz_t());
      row.k = static_cast<int>(fl.get_si()) + 1;
      row.bound = row.k * g - L;
      auto psi = compose(alpha, compose(iterate(v1.push->phi, row.k), beta));
      auto rp = shift_report(cm2, cm2, e, psi, Window{1, {}}, 0, n);
      row.gsh = rp.gsh ? *rp.gsh : Q(0);
      row.transported = is_chain_map(psi) && lifts_identity(psi) && rp.gsh && *rp.gsh >= row.bound && *rp.gsh > 0;
      if (!rp.gsh) row.transported = is_chain_map(psi) && lifts_identity(psi);
    } else {
      row.transported = !v1.push;  // nothing to transport
    }
    return row;
  });
  for (auto& r : rep.rows) {
    if (r.v1 != r.v2) rep.agree = false;
    if (!r.transported) rep.transports_ok = false;
  }
  return rep;
}

}  // namespace sgm
