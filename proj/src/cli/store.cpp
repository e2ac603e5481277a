#include "sgm/store.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace sgm {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kCertKinds{"push", "obstruction", "lag"};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + p.string());
  out << j.dump(1) << "\n";
}

}  // namespace

std::string dir_slug(const Dir& e) {
  std::string out;
  for (char c : e.str()) {
    bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.';
    char x = keep ? c : '_';
    if (x == '_' && (out.empty() || out.back() == '_')) continue;
    out += x;
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out.empty() ? "dir" : out;
}

std::string CertStore::default_dir() {
  const char* env = std::getenv("SIGMA_CERT_DIR");
  return env && *env ? env : "sigma-certs";
}

CertStore::CertStore(std::string dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
  auto p = fs::path(dir_) / "index.json";
  if (fs::exists(p)) {
    index_ = read_json(p.string());
    if (index_.value("schema", "") != "sigma.index") throw ParseError(p.string() + " is not a store index");
  } else {
    index_ = {{"schema", "sigma.index"}, {"schema_version", kSchemaVersion}, {"entries", json::object()}};
  }
}

std::string CertStore::put(const Scenario& s, const std::string& kind, const Dir* e, int n, json doc) {
  if (kCertKinds.count(kind)) {
    std::string why;
    if (!verify_certificate(doc, &why)) throw Error("refusing to store an unverified " + kind + " certificate: " + why);
  }
  std::string name = s.name + "-" + s.digest().substr(0, 8) + "-" + kind;
  if (n >= 0) name += "-n" + std::to_string(n);
  if (e) name += "-" + dir_slug(*e);
  name += ".json";
  write_json(fs::path(dir_) / name, doc);
  json entry = {{"scenario", s.name}, {"digest", s.digest()}, {"kind", kind}, {"n", n}};
  if (e) entry["direction"] = e->str();
  index_["entries"][name] = entry;
  return name;
}

void CertStore::flush() const { write_json(fs::path(dir_) / "index.json", index_); }

bool verify_file(const std::string& path, std::string* why) {
  auto fail = [&](const std::string& s) {
    if (why) *why = s;
    return false;
  };
  json j = read_json(path);
  if (!j.is_object()) return fail("not a sigma document");
  auto schema = j.value("schema", "");
  if (schema == kCertSchema) return verify_certificate(j, why);
  if (schema == "sigma.index") {
    // consistency only; the listed files are verified on their own
    json entries = j.value("entries", json::object());
    for (auto& [name, entry] : entries.items()) {
      auto p = fs::path(path).parent_path() / name;
      if (!fs::exists(p)) return fail("index lists a missing file " + name);
      json d = read_json(p.string());
      if (d.value("kind", entry.value("kind", "")) != entry.value("kind", "") && d.value("schema", "") == kCertSchema)
        return fail("index kind disagrees with " + name);
    }
    return true;
  }
  if (schema != "sigma.verdict" && schema != "sigma.report") return fail("unknown schema '" + schema + "'");
  if (j.value("schema_version", 0) != kSchemaVersion) return fail("unsupported schema version");
  auto base = fs::path(path).parent_path();
  std::set<std::string> kinds;
  for (auto& c : j.value("certificates", json::array())) {
    auto p = (base / c.get<std::string>()).string();
    std::string w;
    json cj;
    try {
      cj = read_json(p);
    } catch (const ParseError& err) {
      return fail(err.what());
    }
    if (!verify_certificate(cj, &w)) return fail(c.get<std::string>() + ": " + w);
    kinds.insert(cj.value("kind", ""));
  }
  if (schema == "sigma.verdict") {
    auto v = j.value("verdict", "");
    if (v == "member" && !kinds.count("push")) return fail("member verdict without a push certificate");
    if (v == "non-member" && !kinds.count("obstruction")) return fail("non-member verdict without an obstruction");
  }
  return true;
}

}  // namespace sgm
