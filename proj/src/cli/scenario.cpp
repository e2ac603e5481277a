#include "sgm/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

namespace sgm {

namespace {

namespace fs = std::filesystem;

const std::set<std::string> kSections{"scenario", "group", "module", "model", "resolution", "budgets"};

[[noreturn]] void bad(const std::string& s) { throw ParseError(s); }

const toml::table* section(const toml::table& t, const char* name) {
  auto* n = t.get(name);
  if (!n) return nullptr;
  if (!n->is_table()) bad(std::string("[") + name + "] must be a table");
  return n->as_table();
}

template <class T>
std::optional<T> get(const toml::table* t, const char* key) {
  if (!t) return std::nullopt;
  auto* n = t->get(key);
  if (!n) return std::nullopt;
  auto v = n->value<T>();
  if (!v) bad(std::string("key '") + key + "' has the wrong type");
  return v;
}

// numbers may be written as integers, floats with exact binary values are refused, strings hold rationals
Q get_q(const toml::node& n, const std::string& what) {
  if (auto i = n.value<int64_t>()) return Q(static_cast<long>(*i));
  if (auto s = n.value<std::string>()) {
    try {
      return parse_scalar(*s);
    } catch (const std::exception&) {
      bad(what + ": '" + *s + "' is not a rational number");
    }
  }
  bad(what + ": expected an integer or a rational in quotes");
}

std::optional<Q> get_q(const toml::table* t, const char* key) {
  if (!t || !t->get(key)) return std::nullopt;
  return get_q(*t->get(key), key);
}

std::vector<std::string> get_strings(const toml::table* t, const char* key) {
  std::vector<std::string> out;
  if (!t || !t->get(key)) return out;
  auto* a = t->get(key)->as_array();
  if (!a) bad(std::string("'") + key + "' must be an array");
  for (auto& x : *a) {
    auto s = x.value<std::string>();
    if (!s) bad(std::string("'") + key + "' must hold strings");
    out.push_back(*s);
  }
  return out;
}

int positive(const toml::table* t, const char* key, int dflt) {
  auto v = get<int64_t>(t, key);
  if (!v) return dflt;
  if (*v < 1) bad(std::string("budget '") + key + "' must be positive");
  return static_cast<int>(*v);
}

GroupPtr make_group(const toml::table* g) {
  auto kind = get<std::string>(g, "kind").value_or("free_abelian");
  auto names = get_strings(g, "names");
  int rank = static_cast<int>(get<int64_t>(g, "rank").value_or(names.empty() ? 2 : static_cast<int64_t>(names.size())));
  if (!names.empty() && static_cast<int>(names.size()) != rank) bad("[group] names and rank disagree");
  if (rank < 1) bad("[group] rank must be positive");
  try {
    if (kind == "free_abelian") return Group::free_abelian(rank, names);
    if (kind == "free") return Group::free_group(rank, names);
    if (kind == "bs") {
      int64_t m = get<int64_t>(g, "m").value_or(2);
      if (m < 2) bad("[group] BS(1,m) needs m >= 2");
      return Group::baumslag_solitar(m, names);
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    bad(std::string("[group] ") + e.what());
  }
  bad("[group] unknown kind '" + kind + "'");
}

ModelPtr make_model(GroupPtr G, const toml::table* m) {
  auto kind = get<std::string>(m, "kind").value_or("euclidean");
  try {
    if (kind == "tree") {
      if (G->kind() != Group::Kind::BS) bad("[model] the tree model needs a BS(1,m) group");
      return std::make_shared<TreeModel>(G);
    }
    if (kind == "euclidean") {
      std::vector<std::vector<Q>> tau;
      auto* n = m ? m->get("tau") : nullptr;
      if (!n) {
        // default: the abelianization with the standard basis
        for (int i = 0; i < G->ngens(); ++i) {
          std::vector<Q> v(G->ngens(), Q(0));
          v[i] = 1;
          tau.push_back(v);
        }
      } else {
        auto* a = n->as_array();
        if (!a) bad("[model] tau must be an array of vectors");
        for (auto& row : *a) {
          auto* r = row.as_array();
          if (!r) bad("[model] tau must be an array of vectors");
          std::vector<Q> v;
          for (auto& x : *r) v.push_back(get_q(x, "[model] tau"));
          tau.push_back(v);
        }
      }
      return std::make_shared<EuclideanModel>(G, tau);
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    bad(std::string("[model] ") + e.what());
  }
  bad("[model] unknown kind '" + kind + "'");
}

// P carries the names the scenario file was written with; G may rename them (words are index based)
ComplexPtr make_resolution(GroupPtr G, GroupPtr P, Ring K, int rankA, const toml::table* r, const Scenario* L,
                           const Scenario* R) {
  auto kind = get<std::string>(r, "kind").value_or(L ? "tensor" : "standard");
  int N = positive(r, "dims", 3);
  if (L && kind != "tensor") bad("[resolution] a product scenario uses kind = \"tensor\"");
  try {
    if (kind == "standard") {
      if (rankA != 1) bad("[resolution] standard resolutions resolve a rank-1 trivial module");
      return standard_resolution(G, K, N);
    }
    if (kind == "tensor") {
      if (!L) bad("[resolution] tensor needs a product scenario");
      if (!K.is_field()) bad("[resolution] tensor products need a field");
      return tensor_complex(*L->cm.F, *R->cm.F);
    }
    if (kind == "fox") {
      Presentation p;
      p.G = G;
      for (auto& s : get_strings(r, "relators")) p.relators.push_back(P->parse_word(s));
      if (p.relators.empty()) p = standard_presentation(G);
      if (rankA != 1) bad("[resolution] fox resolutions resolve a rank-1 trivial module");
      return fox_resolution(p, K, N);
    }
    if (kind == "tables") {
      auto* nm = r->get("names");
      if (!nm || !nm->as_array()) bad("[resolution] tables need names = [[...], ...]");
      ChainComplex scratch;
      scratch.G = P;
      scratch.K = K;
      for (auto& row : *nm->as_array()) {
        auto* a = row.as_array();
        if (!a) bad("[resolution] names must be arrays of strings");
        std::vector<std::string> v;
        for (auto& x : *a) v.push_back(x.value<std::string>().value_or(""));
        scratch.names.push_back(v);
      }
      std::vector<std::vector<Chain>> bd(scratch.names.size());
      if (auto* b = r->get("boundaries")) {
        auto* a = b->as_array();
        if (!a) bad("[resolution] boundaries must be arrays of chain strings");
        for (size_t k = 0; k < a->size(); ++k) {
          auto* row = (*a)[k].as_array();
          if (!row) bad("[resolution] boundaries must be arrays of chain strings");
          size_t dim = k + 1;
          if (dim >= scratch.names.size()) bad("[resolution] more boundary rows than dimensions");
          for (auto& x : *row) bd[dim].push_back(scratch.parse_chain(static_cast<int>(dim) - 1, x.value<std::string>().value_or("")));
        }
      }
      std::vector<AVec> eps;
      if (auto* e = r->get("eps")) {
        for (auto& row : *e->as_array()) {
          AVec v;
          if (auto* a = row.as_array())
            for (auto& x : *a) v.push_back(get_q(x, "[resolution] eps"));
          else
            v.push_back(get_q(row, "[resolution] eps"));
          if (static_cast<int>(v.size()) != rankA) bad("[resolution] eps entries must have the module's rank");
          eps.push_back(v);
        }
      }
      return resolution_from_tables(G, K, scratch.names, bd, eps, rankA);
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    bad(std::string("[resolution] ") + e.what());
  }
  bad("[resolution] unknown kind '" + kind + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

GroupPtr rename(GroupPtr G, const std::vector<std::string>& names) {
  if (names.empty()) return G;
  if (static_cast<int>(names.size()) != G->ngens()) bad("[group] renaming needs one name per generator");
  switch (G->kind()) {
    case Group::Kind::FreeAbelian: return Group::free_abelian(G->rank(), names);
    case Group::Kind::Free: return Group::free_group(G->rank(), names);
    case Group::Kind::BS: return Group::baumslag_solitar(G->bs_m(), names);
    default: bad("[group] cannot rename a product factor that is itself a product");
  }
}

Scenario build(const std::string& text, const std::string& base_dir, const std::string& name,
               const std::vector<std::string>& names);

std::shared_ptr<Scenario> load_factor(const std::string& path, const std::vector<std::string>& names) {
  auto p = fs::path(path);
  auto s = std::make_shared<Scenario>(build(read_file(path), p.parent_path().string(), p.stem().string(), names));
  s->path = path;
  return s;
}

}  // namespace

json Scenario::to_json() const {
  json b = {{"window", budgets.window},
            {"nu", scalar_str(budgets.nu)},
            {"trunc", scalar_str(budgets.T)},
            {"novikov_window", budgets.novikov_window},
            {"lag_window", budgets.lag_window},
            {"lag_margin", budgets.lag_margin},
            {"orbit_depth", budgets.orbit_depth},
            {"homotopy_radius", budgets.homotopy_radius},
            {"samples", samples},
            {"jobs", jobs}};
  json lv = json::array();
  for (auto& l : budgets.levels) lv.push_back(scalar_str(l));
  b["levels"] = lv;
  return {{"name", name}, {"seed", seed}, {"setting", cm.to_json()}, {"budgets", b}};
}

std::string Scenario::digest() const {
  // worker count does not change results
  json j = to_json();
  j["budgets"].erase("jobs");
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Scenario load_scenario(const std::string& path) {
  auto text = read_file(path);
  auto p = fs::path(path);
  auto s = parse_scenario(text, p.parent_path().string(), p.stem().string());
  s.path = path;
  return s;
}

Scenario parse_scenario(const std::string& text, const std::string& base_dir, const std::string& name) {
  return build(text, base_dir, name, {});
}

namespace {

Scenario build(const std::string& text, const std::string& base_dir, const std::string& name,
               const std::vector<std::string>& names) {
  toml::table t;
  try {
    t = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "TOML: " << e.description() << " at line " << e.source().begin.line;
    bad(os.str());
  }
  for (auto& [k, v] : t)
    if (!kSections.count(std::string(k.str()))) bad("unknown section [" + std::string(k.str()) + "]");
  Scenario s;
  auto* sc = section(t, "scenario");
  s.name = get<std::string>(sc, "name").value_or(name);
  s.seed = static_cast<uint64_t>(get<int64_t>(sc, "seed").value_or(0));

  auto* g = section(t, "group");
  auto* mod = section(t, "module");
  auto mkind = get<std::string>(mod, "kind").value_or("trivial");
  if (mkind != "trivial") bad("[module] only trivial modules K^r are supported, got '" + mkind + "'");
  Ring K;
  try {
    K = Ring::parse(get<std::string>(mod, "ring").value_or("Q"));
  } catch (const Error& e) {
    bad(std::string("[module] ") + e.what());
  }
  int rankA = positive(mod, "rank", 1);
  auto* res = section(t, "resolution");
  auto* mdl = section(t, "model");

  GroupPtr G;
  ModelPtr M;
  ComplexPtr F;
  if (get<std::string>(g, "kind").value_or("") == "product") {
    auto lp = get<std::string>(g, "left"), rp = get<std::string>(g, "right");
    if (!lp || !rp) bad("[group] a product needs left and right scenario files");
    auto resolve = [&](const std::string& p) { return (fs::path(base_dir) / p).string(); };
    auto L = load_factor(resolve(*lp), get_strings(g, "left_names"));
    auto R0 = load_factor(resolve(*rp), get_strings(g, "right_names"));
    // shared names: suffix the right factor with 2
    auto ln = L->cm.F->G->gen_names(), rn = R0->cm.F->G->gen_names();
    bool clash = false;
    for (auto& x : rn) clash |= std::find(ln.begin(), ln.end(), x) != ln.end();
    if (clash && get_strings(g, "right_names").empty()) {
      for (auto& x : rn) x += "2";
      R0 = load_factor(resolve(*rp), rn);
    }
    if (!(L->cm.F->K == R0->cm.F->K)) bad("product factors use different ground rings");
    if (mdl) bad("[model] a product scenario takes its model from the factors");
    if (!names.empty()) bad("nested products are not supported");
    F = make_resolution(nullptr, nullptr, L->cm.F->K, 1, res, L.get(), R0.get());
    G = F->G;
    auto PM = std::make_shared<ProductModel>(L->cm.M, R0->cm.M);
    M = model_from_json(G, PM->to_json());
    s.left = L;
    s.right = R0;
  } else {
    if (g && (g->get("left") || g->get("right"))) bad("[group] left/right only make sense with kind = \"product\"");
    auto P = make_group(g);
    G = rename(P, names);
    M = make_model(G, mdl);
    F = make_resolution(G, P, K, rankA, res, nullptr, nullptr);
  }
  std::optional<Point> base;
  if (auto b = get<std::string>(res, "base")) {
    try {
      base = M->parse_point(*b);
    } catch (const Error& e) {
      bad(std::string("[resolution] base: ") + e.what());
    }
  }
  auto control = get<std::string>(res, "control").value_or("default");
  if (control == "default")
    s.cm = ControlledModel::standard(M, F, base);
  else if (control == "boundary")
    s.cm = ControlledModel::boundary_preset(M, F, base);
  else
    bad("[resolution] control must be \"default\" or \"boundary\"");

  auto* bu = section(t, "budgets");
  s.budgets.window = positive(bu, "window", s.budgets.window);
  if (auto v = get_q(bu, "nu")) s.budgets.nu = *v;
  if (auto v = get_q(bu, "trunc")) s.budgets.T = *v;
  if (s.budgets.nu <= 0 || s.budgets.T <= 0) bad("[budgets] nu and trunc must be positive");
  s.budgets.novikov_window = positive(bu, "novikov_window", s.budgets.novikov_window);
  s.budgets.lag_window = positive(bu, "lag_window", s.budgets.lag_window);
  s.budgets.lag_margin = positive(bu, "lag_margin", s.budgets.lag_margin);
  s.budgets.orbit_depth = positive(bu, "orbit_depth", s.budgets.orbit_depth);
  s.budgets.homotopy_radius = positive(bu, "homotopy_radius", s.budgets.homotopy_radius);
  if (bu && bu->get("levels")) {
    s.budgets.levels.clear();
    auto* a = bu->get("levels")->as_array();
    if (!a) bad("[budgets] levels must be an array");
    for (auto& x : *a) s.budgets.levels.push_back(get_q(x, "[budgets] levels"));
  }
  s.samples = positive(bu, "samples", s.samples);
  s.jobs = positive(bu, "jobs", s.jobs);
  return s;
}

}  // namespace

Dir parse_direction(const Scenario& s, const std::string& dir, const std::string& end, const std::string& join) {
  const Model& M = *s.cm.M;
  int given = !dir.empty() + !end.empty();
  try {
    if (M.kind() == "product") {
      if (join.empty() || dir.empty())
        throw ParseError("product directions need --join w,w' and --dir \"dirA;dirB\"");
      Dir e = M.parse_dir(join + ";" + dir);
      M.check_dir(e);
      return e;
    }
    if (!join.empty()) throw ParseError("--join only applies to product scenarios");
    if (given != 1) throw ParseError("give exactly one of --dir or --end");
    Dir e;
    if (!end.empty()) {
      auto* T = dynamic_cast<const TreeModel*>(&M);
      if (!T) throw ParseError("--end needs a tree model");
      e = end == "omega" ? Dir::end_omega() : T->end_from_word(end);
    } else {
      e = M.parse_dir(dir);
    }
    M.check_dir(e);
    return e;
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("bad direction: ") + e.what());
  }
}

}  // namespace sgm
