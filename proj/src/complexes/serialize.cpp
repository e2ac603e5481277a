#include "sgm/complexes.hpp"

namespace sgm {

json group_to_json(const Group& G) {
  json j;
  switch (G.kind()) {
    case Group::Kind::FreeAbelian:
      j = {{"kind", "FreeAbelian"}, {"rank", G.rank()}, {"names", G.gen_names()}};
      break;
    case Group::Kind::Free:
      j = {{"kind", "Free"}, {"rank", G.rank()}, {"names", G.gen_names()}};
      break;
    case Group::Kind::BS:
      j = {{"kind", "BaumslagSolitar"}, {"m", G.bs_m()}, {"names", G.gen_names()}};
      break;
    case Group::Kind::Product:
      j = {{"kind", "DirectProduct"}, {"left", group_to_json(*G.left())}, {"right", group_to_json(*G.right())}};
      break;
  }
  return j;
}

GroupPtr group_from_json(const json& j) {
  std::string k = j.at("kind");
  auto names = j.value("names", std::vector<std::string>{});
  if (k == "FreeAbelian") return Group::free_abelian(j.at("rank"), names);
  if (k == "Free") return Group::free_group(j.at("rank"), names);
  if (k == "BaumslagSolitar") return Group::baumslag_solitar(j.at("m"), names);
  if (k == "DirectProduct") return Group::product(group_from_json(j.at("left")), group_from_json(j.at("right")));
  throw Error("unknown group kind '" + k + "'");
}

json chain_to_json(const ChainComplex& F, const Chain& c) {
  json terms = json::array();
  for (auto& [cell, a] : c.t)
    terms.push_back({F.names.at(c.dim).at(cell.x), F.G->format(cell.g), a.get_str()});
  return {{"dim", c.dim}, {"terms", terms}};
}

Chain chain_from_json(const ChainComplex& F, const json& j) {
  Chain c;
  c.dim = j.at("dim");
  for (auto& t : j.at("terms")) {
    int x = F.index_of(c.dim, t.at(0).get<std::string>());
    if (x < 0) throw Error("unknown basis symbol " + t.at(0).get<std::string>());
    Chain one;
    one.dim = c.dim;
    one.t.emplace(Cell{x, F.G->parse(t.at(1).get<std::string>())}, Scalar(1));
    F.add_to(c, one, parse_scalar(t.at(2).get<std::string>()));
  }
  c.dim = j.at("dim");
  return c;
}

json complex_to_json(const ChainComplex& F) {
  json bd = json::array();
  for (int k = 1; k <= F.top(); ++k) {
    json row = json::array();
    for (auto& c : F.bd[k]) row.push_back(chain_to_json(F, c));
    bd.push_back(row);
  }
  json eps = json::array();
  for (auto& e : F.eps) {
    json v = json::array();
    for (auto& a : e) v.push_back(a.get_str());
    eps.push_back(v);
  }
  return {{"schema_version", kSchemaVersion}, {"type", "complex"},  {"origin", F.origin},
          {"group", group_to_json(*F.G)},     {"ring", F.K.name()}, {"rankA", F.rankA},
          {"basis", F.names},                 {"boundary", bd},     {"augmentation", eps}};
}

ComplexPtr complex_from_json(const json& j) {
  if (j.value("schema_version", 0) != kSchemaVersion) throw Error("unsupported complex schema_version");
  auto F = std::make_shared<ChainComplex>();
  F->G = group_from_json(j.at("group"));
  F->K = Ring::parse(j.at("ring"));
  F->rankA = j.at("rankA");
  F->names = j.at("basis").get<std::vector<std::vector<std::string>>>();
  F->origin = j.value("origin", "tables");
  F->bd.resize(F->names.size());
  auto& bd = j.at("boundary");
  for (int k = 1; k <= F->top(); ++k)
    for (auto& c : bd.at(k - 1)) F->bd[k].push_back(chain_from_json(*F, c));
  for (auto& e : j.at("augmentation")) {
    AVec v;
    for (auto& a : e) v.push_back(F->K.norm(parse_scalar(a.get<std::string>())));
    F->eps.push_back(v);
  }
  F->validate();
  return F;
}

}  // namespace sgm
