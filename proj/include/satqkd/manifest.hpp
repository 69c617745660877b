#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "satqkd/coherence.hpp"
#include "satqkd/keyrate.hpp"
#include "satqkd/noise.hpp"
#include "satqkd/params.hpp"

namespace satqkd {

// Reproducibility record: one manifest per command invocation; the resolved
// scenario snapshot plus seed and flags is enough to rerun bit-for-bit.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::string resolved_scenario;  // serialized ScenarioSet
  std::uint64_t seed = 0;
  std::string tool_version;
  int csv_schema = 0;
  std::string kernel_backend;
  std::vector<std::string> outputs;
  double duration_s = 0.0;

  std::string to_json() const;
};

// CSV emission (RFC-style quoting; numeric columns use round-trip formatting).
std::string gamma_csv(const CampaignResult& r);
std::string gamma_summary_json(const CampaignResult& r);
std::string keyrate_csv(const std::vector<KeyRateResult>& rows);
std::string budget_json(const NoiseBudget& b);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace satqkd
