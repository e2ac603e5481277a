#pragma once

#include <string>
#include <vector>

#include "sgm/scenario.hpp"

namespace sgm {

// Directory of JSON artifacts plus index.json keyed by file name.
// Certificates are re-verified before they are written.
class CertStore {
 public:
  explicit CertStore(std::string dir);
  static std::string default_dir();  // SIGMA_CERT_DIR, else ./sigma-certs

  // kind: push | obstruction | lag for certificates, anything else for verdict/report documents
  std::string put(const Scenario& s, const std::string& kind, const Dir* e, int n, json doc);
  void flush() const;
  const std::string& dir() const { return dir_; }
  const json& index() const { return index_; }

 private:
  std::string dir_;
  json index_;
};

std::string dir_slug(const Dir& e);

// certificate: full re-check; verdict/report: the certificates it names (same directory) re-check
// and a verdict agrees with them. Throws ParseError when the file is not JSON.
bool verify_file(const std::string& path, std::string* why = nullptr);

}  // namespace sgm
