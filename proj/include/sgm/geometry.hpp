#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sgm/complexes.hpp"

namespace sgm {

using Q = mpq_class;
using Point = std::vector<Q>;  // Euclidean: coordinates; tree vertex: (level k, center s); product: concatenation

struct Dir {
  enum class Kind { Vec, End, Join };
  Kind kind = Kind::Vec;
  std::vector<Q> u;      // Vec: unnormalized direction
  bool omega = false;    // End: the fixed end of the Bass-Serre tree
  Q x;                   // End: point of Q ⊂ Q_m (eventually periodic digit word)
  Q w1, w2;              // Join weights
  std::vector<Dir> sub;  // Join factors

  static Dir vec(std::vector<Q> u);
  static Dir end_omega();
  static Dir end_at(Q x);
  static Dir join(Q w1, Q w2, Dir a, Dir b);
  bool operator==(const Dir& o) const;
  std::string str() const;
};

// +inf is nullopt
using Val = std::optional<Q>;
bool val_less(const Val& a, const Val& b);
std::string val_str(const Val& v);

class Model;
using ModelPtr = std::shared_ptr<const Model>;

class Model {
 public:
  virtual ~Model() = default;
  GroupPtr G;

  virtual std::string kind() const = 0;
  virtual size_t point_dim() const = 0;
  virtual Point origin() const = 0;
  virtual Point act(const Elem& g, const Point& p) const = 0;
  virtual Dir act_dir(const Elem& g, const Dir& e) const = 0;
  // β_e(p) - β_e(q)
  virtual Q busemann_delta(const Dir& e, const Point& p, const Point& q) const = 0;
  virtual Q dist2(const Point& p, const Point& q) const = 0;
  // β_e is scale(e) times a unit-speed Busemann function; scale2 = scale^2
  virtual Q scale2(const Dir& e) const = 0;
  virtual void check_dir(const Dir& e) const = 0;
  // canonical representative (positive rescaling)
  virtual Dir canonical(const Dir& e) const = 0;
  // χ(g) = β_e(g p) - β_e(p) when independent of p (translation actions), else nullopt
  virtual std::optional<Q> character(const Dir& e, const Elem& g) const = 0;
  virtual bool translation_action() const = 0;
  virtual json to_json() const = 0;
  virtual std::string point_str(const Point& p) const;
  virtual Point parse_point(const std::string& s) const;
  virtual Dir parse_dir(const std::string& s) const = 0;
};

class EuclideanModel : public Model {
 public:
  EuclideanModel(GroupPtr G, std::vector<std::vector<Q>> tau);
  int d = 0;
  std::vector<std::vector<Q>> tau;  // translation vector per generator
  std::vector<Q> translation(const Elem& g) const;

  std::string kind() const override { return "euclidean"; }
  size_t point_dim() const override { return d; }
  Point origin() const override { return Point(d, Q(0)); }
  Point act(const Elem& g, const Point& p) const override;
  Dir act_dir(const Elem&, const Dir& e) const override { return e; }
  Q busemann_delta(const Dir& e, const Point& p, const Point& q) const override;
  Q dist2(const Point& p, const Point& q) const override;
  Q scale2(const Dir& e) const override;
  void check_dir(const Dir& e) const override;
  Dir canonical(const Dir& e) const override;
  std::optional<Q> character(const Dir& e, const Elem& g) const override;
  bool translation_action() const override { return true; }
  json to_json() const override;
  Dir parse_dir(const std::string& s) const override;
};

// Bass-Serre tree of BS(1,m). Vertex g<a> is the ball m^k Z_m + s of Q_m where g(x) = m^k x + s.
class TreeModel : public Model {
 public:
  explicit TreeModel(GroupPtr G);
  int64_t m = 2;
  Point vertex(int64_t k, const Q& s) const;  // canonical
  static int64_t val_m(int64_t m, const Q& y);  // m-adic valuation, y != 0
  int64_t dist(const Point& p, const Point& q) const;
  Q beta(const Dir& e, const Point& p) const;

  std::string kind() const override { return "tree"; }
  size_t point_dim() const override { return 2; }
  Point origin() const override { return {Q(0), Q(0)}; }
  Point act(const Elem& g, const Point& p) const override;
  Dir act_dir(const Elem& g, const Dir& e) const override;
  Q busemann_delta(const Dir& e, const Point& p, const Point& q) const override;
  Q dist2(const Point& p, const Point& q) const override;
  Q scale2(const Dir&) const override { return 1; }
  void check_dir(const Dir& e) const override;
  Dir canonical(const Dir& e) const override { return e; }
  // only ω is G-fixed: β_ω(g p) - β_ω(p) = -(t-exponent of g); other ends have no character
  std::optional<Q> character(const Dir& e, const Elem& g) const override;
  bool translation_action() const override { return false; }
  json to_json() const override;
  std::string point_str(const Point& p) const override;
  Point parse_point(const std::string& s) const override;
  Dir parse_dir(const std::string& s) const override;
  // "u" steps up, digits step down; "(...)" marks the periodic part
  Dir end_from_word(const std::string& w) const;
};

class ProductModel : public Model {
 public:
  ProductModel(ModelPtr A, ModelPtr B);
  ModelPtr A, B;
  std::pair<Point, Point> split(const Point& p) const;

  std::string kind() const override { return "product"; }
  size_t point_dim() const override { return A->point_dim() + B->point_dim(); }
  Point origin() const override;
  Point act(const Elem& g, const Point& p) const override;
  Dir act_dir(const Elem& g, const Dir& e) const override;
  Q busemann_delta(const Dir& e, const Point& p, const Point& q) const override;
  Q dist2(const Point& p, const Point& q) const override;
  Q scale2(const Dir& e) const override;
  void check_dir(const Dir& e) const override;
  Dir canonical(const Dir& e) const override;
  std::optional<Q> character(const Dir& e, const Elem& g) const override;
  bool translation_action() const override { return A->translation_action() && B->translation_action(); }
  json to_json() const override;
  Dir parse_dir(const std::string& s) const override;  // "w,w' ; dirA ; dirB"
};

ModelPtr model_from_json(GroupPtr G, const json& j);
json dir_to_json(const Dir& e);
Dir dir_from_json(const json& j);
json point_to_json(const Point& p);
Point point_from_json(const json& j);

// control map table h|X plus base point
class ControlledModel {
 public:
  ModelPtr M;
  ComplexPtr F;
  Point base;
  std::vector<std::vector<std::vector<Point>>> h;  // h[k][i]

  static ControlledModel standard(ModelPtr M, ComplexPtr F, std::optional<Point> base = std::nullopt);
  // h(x) := h(∂x) on dimensions >= 1
  static ControlledModel boundary_preset(ModelPtr M, ComplexPtr F, std::optional<Point> base = std::nullopt);

  std::vector<Point> points(int dim, const Cell& c) const;
  std::vector<Point> points(const Chain& c) const;
  Q beta(const Dir& e, const Point& p) const { return M->busemann_delta(e, p, base); }
  Val valuation(const Dir& e, const Chain& c) const;
  Val valuation(const Dir& e, int dim, const Cell& c) const;
  // D_b(c)^2; 0 for c = 0
  Q dist2_to(const Point& b, const Chain& c) const;
  // control after an elementary expansion
  ControlledModel expanded(const Expansion& ex, const Chain& x, const Chain& c, const Chain& d) const;
  void check() const;
  json to_json() const;
  static ControlledModel from_json(const json& j);
};

Q busemann_delta(const Model& M, const Dir& e, const Point& p, const Point& q);
Q hausdorff2(const Model& M, const std::vector<Point>& A, const std::vector<Point>& B);
std::vector<Dir> orbit_closure_sample(const Model& M, const Dir& e, int depth, std::vector<int> gens = {});

// deterministic direction samples
std::vector<Dir> sample_directions(const Model& M, int N, uint64_t seed = 0, int farey_order = 3);
std::vector<Q> farey_weights(int order);  // fractions in [0,1]

// exact helpers
Q dot(const std::vector<Q>& a, const std::vector<Q>& b);
// primitive integer vector with the same direction
std::vector<Q> primitive(const std::vector<Q>& u);

}  // namespace sgm
