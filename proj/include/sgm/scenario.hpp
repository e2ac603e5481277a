#pragma once

#include <memory>
#include <optional>
#include <string>

#include "sgm/sigma.hpp"

namespace sgm {

struct ParseError : Error {
  using Error::Error;
};

// A validated TOML scenario (format in docs/scenario.md).
struct Scenario {
  std::string name;
  std::string path;
  uint64_t seed = 0;
  ControlledModel cm;
  Budgets budgets;
  int samples = 16;
  int jobs = 1;
  std::shared_ptr<const Scenario> left, right;  // factors of a product scenario
  bool is_product() const { return left != nullptr; }
  json to_json() const;
  std::string digest() const;  // FNV-1a of the canonical JSON, hex
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& text, const std::string& base_dir, const std::string& name = "scenario");

// --dir x,y / --end word / --join w,w' (with factor directions "w,w';dirA;dirB")
Dir parse_direction(const Scenario& s, const std::string& dir, const std::string& end, const std::string& join);

}  // namespace sgm
