#include <set>

#include "sgm/geometry.hpp"

namespace sgm {

namespace {

void add_points(std::vector<Point>& out, const std::vector<Point>& pts) {
  for (auto& p : pts)
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
}

}  // namespace

ControlledModel ControlledModel::standard(ModelPtr M, ComplexPtr F, std::optional<Point> base) {
  ControlledModel cm;
  cm.M = std::move(M);
  cm.F = std::move(F);
  if (!cm.M->G->same_as(*cm.F->G)) throw Error("model and complex are over different groups");
  cm.base = base ? *base : cm.M->origin();
  if (cm.base.size() != cm.M->point_dim()) throw Error("base point has wrong dimension");
  cm.h.resize(cm.F->top() + 1);
  for (int k = 0; k <= cm.F->top(); ++k) cm.h[k].assign(cm.F->rank(k), {cm.base});
  return cm;
}

ControlledModel ControlledModel::boundary_preset(ModelPtr M, ComplexPtr F, std::optional<Point> base) {
  ControlledModel cm = standard(std::move(M), std::move(F), std::move(base));
  for (int k = 1; k <= cm.F->top(); ++k)
    for (int i = 0; i < cm.F->rank(k); ++i) {
      auto pts = cm.points(cm.F->bd[k][i]);
      if (!pts.empty()) cm.h[k][i] = pts;  // zero boundary keeps {b}: control maps are centerless
    }
  return cm;
}

std::vector<Point> ControlledModel::points(int dim, const Cell& c) const {
  std::vector<Point> out;
  for (auto& p : h.at(dim).at(c.x)) out.push_back(M->act(c.g, p));
  return out;
}

std::vector<Point> ControlledModel::points(const Chain& c) const {
  std::vector<Point> out;
  for (auto& [cell, a] : c.t) add_points(out, points(c.dim, cell));
  return out;
}

Val ControlledModel::valuation(const Dir& e, int dim, const Cell& c) const {
  Val v;
  for (auto& p : points(dim, c)) {
    Q b = beta(e, p);
    if (!v || b < *v) v = b;
  }
  return v;
}

Val ControlledModel::valuation(const Dir& e, const Chain& c) const {
  Val v;
  for (auto& [cell, a] : c.t) {
    Val w = valuation(e, c.dim, cell);
    if (val_less(w, v)) v = w;
  }
  return v;
}

Q ControlledModel::dist2_to(const Point& b, const Chain& c) const {
  Q best = 0;
  for (auto& p : points(c)) {
    Q d = M->dist2(p, b);
    if (d > best) best = d;
  }
  return best;
}

ControlledModel ControlledModel::expanded(const Expansion& ex, const Chain& x, const Chain& c, const Chain& d) const {
  ControlledModel cm = *this;
  cm.F = ex.F;
  int k = x.dim;
  cm.h.resize(ex.F->top() + 1);
  auto hx = points(x);
  add_points(hx, points(c));
  auto heta = hx;
  add_points(heta, points(d));
  cm.h[k + 1].resize(ex.F->rank(k + 1), {base});
  cm.h[k + 2].resize(ex.F->rank(k + 2), {base});
  cm.h[k + 1][ex.xi] = hx;
  cm.h[k + 2][ex.eta] = heta;
  cm.check();
  return cm;
}

void ControlledModel::check() const {
  if (static_cast<int>(h.size()) != F->top() + 1) throw Error("control table does not cover the complex");
  for (int k = 0; k <= F->top(); ++k) {
    if (static_cast<int>(h[k].size()) != F->rank(k)) throw Error("control table size mismatch in dim " + std::to_string(k));
    for (int i = 0; i < F->rank(k); ++i) {
      if (h[k][i].empty()) throw Error("h(" + F->names[k][i] + ") is empty");
      for (auto& p : h[k][i])
        if (p.size() != M->point_dim()) throw Error("h(" + F->names[k][i] + ") has a malformed point");
    }
  }
}

json ControlledModel::to_json() const {
  json hj = json::array();
  for (auto& dim : h) {
    json row = json::array();
    for (auto& pts : dim) {
      json ps = json::array();
      for (auto& p : pts) ps.push_back(point_to_json(p));
      row.push_back(ps);
    }
    hj.push_back(row);
  }
  return {{"model", M->to_json()}, {"complex", complex_to_json(*F)}, {"base", point_to_json(base)}, {"h", hj}};
}

ControlledModel ControlledModel::from_json(const json& j) {
  ControlledModel cm;
  cm.F = complex_from_json(j.at("complex"));
  cm.M = model_from_json(cm.F->G, j.at("model"));
  cm.base = point_from_json(j.at("base"));
  for (auto& row : j.at("h")) {
    std::vector<std::vector<Point>> dim;
    for (auto& pts : row) {
      std::vector<Point> ps;
      for (auto& p : pts) ps.push_back(point_from_json(p));
      dim.push_back(ps);
    }
    cm.h.push_back(dim);
  }
  cm.check();
  return cm;
}

}  // namespace sgm
