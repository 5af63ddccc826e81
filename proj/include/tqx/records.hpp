#pragma once

#include <string>
#include <vector>

#include "tqx/tq.hpp"

namespace tqx {

inline constexpr int kRecordSchemaVersion = 1;

struct RunConfig {
  int n_sites = 3;
  double p = 0.25;
  double q = 0.5;
  double xi = -1.7320508075688772;  // -sqrt(3)
  double alpha = 0;                 // 0: derive from xi; presets pin it exactly
  Sign sign = Sign::plus;
  double tol_tq = 1e-8;
  double tol_energy = 1e-6;
  long long seed = 0;
  std::string output_path;

  void validate() const;  // throws UsageError with a diagnostic
  ChainSpec to_chain_spec() const;
};

// Serialized view of a solution record (what verify/table need back).
struct StoredLevel {
  int index = -1;
  double energy_direct = 0;
  double energy_bethe = 0;
  double tq_residual = 0;
  std::vector<Complex> roots;
  bool solved = false;
  std::string failure;
};

struct StoredRecord {
  RunConfig config;
  std::vector<StoredLevel> levels;
  bool all_solved = false;
};

std::string record_to_json_string(const CompletenessReport& rep, const RunConfig& cfg);

// Parses and schema-checks a solution record; throws UsageError on missing
// file, malformed JSON, wrong kind, or unknown schema version.
StoredRecord load_record(const std::string& path);

// Atomic write: temp file in the target directory, then rename.
void write_text_atomic(const std::string& text, const std::string& path);

// Two-column table (E | Bethe roots), rows sorted by ascending direct energy,
// conjugate pairs rendered as "a ± bi", 6 significant digits. Deterministic.
std::string render_table(const StoredRecord& rec, bool markdown);

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> failures;
};

// Recomputes everything checkable from parameters + stored roots: direct
// spectrum, per-level T-Q residuals, and energies, compared against the
// record within its stored tolerances.
VerifyReport verify_record(const StoredRecord& rec);

}  // namespace tqx
