#include "sgm/sigma.hpp"

namespace sgm {

namespace {

json header(const char* kind, const ControlledModel& cm, const Dir& e, int n) {
  return {{"schema", kCertSchema}, {"schema_version", kSchemaVersion}, {"kind", kind},
          {"setting", cm.to_json()},  {"direction", dir_to_json(e)},      {"n", n}};
}

json val_json(const Val& v) { return val_str(v); }

Val val_from(const json& j) {
  auto s = j.get<std::string>();
  if (s == "inf") return std::nullopt;
  return parse_scalar(s);
}

json avec_json(const AVec& a) {
  json out = json::array();
  for (auto& x : a) out.push_back(scalar_str(x));
  return out;
}

NovElem nov_from_json(const Group& G, const json& j) {
  NovElem u;
  for (auto& t : j.at("terms")) {
    Scalar c = parse_scalar(t.at(1).get<std::string>());
    if (c != 0) u.t[G.parse(t.at(0).get<std::string>())] = c;
  }
  u.floor = val_from(j.at("floor"));
  return u;
}

TorResult tor_from_json(const ChainComplex& F, const json& j) {
  TorResult r;
  r.k = j.at("k").get<int>();
  r.T = parse_scalar(j.at("T").get<std::string>());
  if (j.at("status").get<std::string>() != status_name(TorResult::Status::Obstruction))
    throw Error("Tor entry is not an obstruction");
  r.status = TorResult::Status::Obstruction;
  if (r.k < 0 || r.k > F.top()) throw Error("Tor degree out of range");
  r.witness.assign(F.rank(r.k), NovElem{{}, Val(r.T)});
  for (auto& [name, v] : j.at("witness").items()) {
    int i = F.index_of(r.k, name);
    r.witness[i] = nov_from_json(*F.G, v);
  }
  r.boundary_floor = val_from(j.at("boundary_floor"));
  auto& im = j.at("image");
  if (im.is_string()) {
    if (im.get<std::string>() != "exact") throw Error("unknown image claim");
    r.image_exact = true;
  } else {
    r.image_window = im.at("window").get<int>();
  }
  if (j.contains("transcript")) r.transcript = j.at("transcript").get<std::vector<std::string>>();
  return r;
}

}  // namespace

json push_to_json(const ControlledModel& cm, const PushCertificate& c) {
  json j = header("push", cm, c.e, c.n);
  j["nu"] = scalar_str(c.nu);
  j["radius"] = c.radius;
  j["phi"] = c.phi.to_json();
  j["shift"] = c.report.to_json();
  j["gsh"] = val_str(c.report.gsh);
  j["exact"] = c.report.exact;
  if (c.sigma) {
    j["sigma"] = c.sigma->to_json();
    j["sigma_norm2"] = scalar_str(c.sigma_norm2);
  } else {
    j["sigma"] = nullptr;
  }
  return j;
}

json obstruction_to_json(const ControlledModel& cm, const Dir& e, int n, const TorResult& r) {
  auto chi = discrete_character(*cm.M, e);
  if (!chi) throw Error("obstructions need a discrete character");
  NovikovRing R(cm.F->G, cm.F->K, *chi);
  json j = header("obstruction", cm, e, n);
  j["tor"] = r.to_json(R, *cm.F);
  return j;
}

json lag_to_json(const ControlledModel& cm, const Dir& e, int n, const LagEstimate& est) {
  json j = header("lag", cm, e, n);
  json lv = json::array();
  for (auto& l : est.levels)
    lv.push_back({{"i", l.i}, {"level", scalar_str(l.s)}, {"cycles", l.cycles}, {"bounded", l.bounded},
                  {"lag", scalar_str(l.lag)}});
  j["levels"] = lv;
  json bc = json::array();
  for (auto& c : est.certs) {
    json x = {{"i", c.i},     {"level", scalar_str(c.level)}, {"c", chain_to_json(*cm.F, c.c)}, {"vz", val_json(c.vz)},
              {"vc", val_json(c.vc)}, {"lag", scalar_str(c.lag)}, {"source", c.source}};
    if (c.i < 0)
      x["a"] = avec_json(c.a);
    else
      x["z"] = chain_to_json(*cm.F, c.z);
    bc.push_back(x);
  }
  j["bounding"] = bc;
  j["constant"] = est.constant;
  if (est.lambda2) j["lambda2"] = scalar_str(*est.lambda2);
  return j;
}

json verdict_to_json(const Verdict& v) {
  json j = {{"schema", "sigma.verdict"}, {"schema_version", kSchemaVersion}, {"verdict", verdict_name(v.kind)},
            {"direction", dir_to_json(v.e)}, {"direction_text", v.e.str()}, {"n", v.n},
            {"tried", v.tried}, {"note", v.note}};
  if (v.push) j["push_gsh"] = val_str(v.push->report.gsh);
  if (v.obstruction) {
    j["obstruction_degree"] = v.obstruction->k;
    j["obstruction_at"] = v.obstruction_at->str();
  }
  return j;
}

bool verify_certificate(const json& j, std::string* why) {
  auto fail = [&](const std::string& s) {
    if (why) *why = s;
    return false;
  };
  try {
    if (j.value("schema", "") != kCertSchema) return fail("not a certificate document");
    if (j.value("schema_version", 0) != kSchemaVersion)
      return fail("unsupported schema version " + std::to_string(j.value("schema_version", 0)));
    auto cm = ControlledModel::from_json(j.at("setting"));
    Dir e = dir_from_json(j.at("direction"));
    int n = j.at("n").get<int>();
    cm.M->check_dir(e);
    auto kind = j.at("kind").get<std::string>();
    if (kind == "push") {
      PushCertificate c;
      c.e = e;
      c.n = n;
      c.nu = parse_scalar(j.at("nu").get<std::string>());
      c.radius = j.at("radius").get<int>();
      c.phi = FinitaryMap::from_json(cm.F, cm.F, j.at("phi"));
      c.report.gsh = val_from(j.at("gsh"));
      c.report.exact = j.at("exact").get<bool>();
      if (!j.at("sigma").is_null()) {
        c.sigma = FinitaryMap::from_json(cm.F, cm.F, j.at("sigma"));
        c.sigma_norm2 = parse_scalar(j.at("sigma_norm2").get<std::string>());
      }
      return verify_push(cm, c, why);
    }
    if (kind == "obstruction") {
      auto r = tor_from_json(*cm.F, j.at("tor"));
      if (r.k > n) return fail("obstruction degree exceeds n");
      return verify_obstruction(cm, e, r, why);
    }
    if (kind == "lag") {
      const auto& F = *cm.F;
      std::optional<Q> l2;
      if (j.contains("lambda2")) l2 = parse_scalar(j.at("lambda2").get<std::string>());
      for (auto& x : j.at("bounding")) {
        int i = x.at("i").get<int>();
        Q level = parse_scalar(x.at("level").get<std::string>());
        Chain c = chain_from_json(F, x.at("c"));
        Val vz;
        if (i < 0) {
          AVec a;
          for (auto& s : x.at("a")) a.push_back(parse_scalar(s.get<std::string>()));
          if (c.dim != 0 || F.augment(c) != a) return fail("ε(c) ≠ a at level " + scalar_str(level));
          vz = level;
        } else {
          Chain z = chain_from_json(F, x.at("z"));
          if (c.dim != i + 1 || F.boundary(c) != z) return fail("∂c ≠ z in dimension " + std::to_string(i));
          if (!(i == 0 ? F.augment(z) == AVec(F.rankA, Scalar(0)) : F.boundary(z).zero()))
            return fail("z is not a cycle");
          vz = cm.valuation(e, z);
          if (val_less(vz, Val(level))) return fail("z lies below its level");
          if (vz != val_from(x.at("vz"))) return fail("recorded v(z) does not match");
        }
        Val vc = cm.valuation(e, c);
        if (vc != val_from(x.at("vc"))) return fail("recorded v(c) does not match");
        Q lag = (vc && vz && *vz > *vc) ? *vz - *vc : Q(0);
        if (lag != parse_scalar(x.at("lag").get<std::string>())) return fail("recorded lag does not match");
        if (l2 && lag * lag > *l2) return fail("lag exceeds the recorded constant");
      }
      return true;
    }
    return fail("unknown certificate kind " + kind);
  } catch (const std::exception& ex) {
    return fail(std::string("malformed certificate: ") + ex.what());
  }
}

}  // namespace sgm
