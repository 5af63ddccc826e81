#include <cmath>
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "tqx/fusion.hpp"
#include "tqx/records.hpp"

namespace {

using tqx::Complex;
using tqx::Real;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitCompleteness = 3;
constexpr int kExitFusion = 4;

std::string default_out_dir() {
  const char* env = std::getenv("TQX_OUT_DIR");
  return env && *env ? env : ".";
}

std::string resolve_out(const std::string& given, const std::string& fallback_name) {
  if (!given.empty()) return given;
  return default_out_dir() + "/" + fallback_name;
}

void apply_preset(tqx::RunConfig& cfg, int n_sites) {
  cfg.n_sites = n_sites;
  cfg.p = 0.25;
  cfg.q = 0.5;
  cfg.xi = -std::sqrt(3.0);
  cfg.alpha = 2.0;  // exact: xi^2 = 3
  cfg.sign = tqx::Sign::plus;
}

int cmd_solve(tqx::RunConfig cfg) {
  cfg.validate();
  const std::string out = resolve_out(cfg.output_path, "solution.json");
  tqx::ChainSpec spec = cfg.to_chain_spec();
  tqx::CompletenessReport rep =
      tqx::completeness_scan(spec, Real(cfg.tol_tq), Real(cfg.tol_energy));
  tqx::write_text_atomic(tqx::record_to_json_string(rep, cfg), out);

  int solved = 0;
  for (const tqx::LevelRecord& lr : rep.levels) solved += lr.solved ? 1 : 0;
  std::cout << "levels solved: " << solved << "/" << rep.levels.size()
            << "  max |E_bethe - E_direct| = "
            << static_cast<double>(rep.max_energy_mismatch)
            << "  max T-Q residual = " << static_cast<double>(rep.max_residual)
            << "\nrecord: " << out << "\n";
  if (!rep.all_solved) {
    for (const tqx::LevelRecord& lr : rep.levels)
      if (!lr.solved)
        std::cout << "  unsolved level " << lr.index << ": " << lr.failure << "\n";
    return kExitCompleteness;
  }
  return kExitOk;
}

int cmd_table(const std::string& path, const std::string& format) {
  tqx::StoredRecord rec = tqx::load_record(path);
  std::cout << tqx::render_table(rec, format == "md");
  return kExitOk;
}

int cmd_verify(const std::string& path) {
  tqx::StoredRecord rec = tqx::load_record(path);
  tqx::VerifyReport rep = tqx::verify_record(rec);
  if (rep.ok) {
    std::cout << "verify: all " << rec.levels.size()
              << " levels reproduce within stored tolerances\n";
    return kExitOk;
  }
  std::cout << "verify: FAILED\n";
  for (const std::string& f : rep.failures) std::cout << "  " << f << "\n";
  return kExitCompleteness;
}

int cmd_fusion(int max_s, long long seed, bool corrupt_t21, std::string out_path) {
  if (max_s < 1 || max_s > 8)
    throw tqx::UsageError("fusion: --max-s must be between 1 and 8");
  const std::string out = resolve_out(out_path, "fusion.json");

  nlohmann::ordered_json report;
  report["schema_version"] = tqx::kRecordSchemaVersion;
  report["kind"] = "tqx.fusion";
  report["max_s"] = max_s;
  report["seed"] = seed;
  bool all_pass = true;
  auto check = [&all_pass](bool ok) {
    all_pass = all_pass && ok;
    return ok;
  };

  // Term counts against the generating series.
  std::vector<long long> expected{1, 3};
  while (static_cast<int>(expected.size()) <= max_s)
    expected.push_back(3 * expected[expected.size() - 1] - expected[expected.size() - 2]);
  nlohmann::ordered_json counts = nlohmann::ordered_json::array();
  bool counts_ok = true;
  for (int s = 0; s <= max_s; ++s) {
    const long long inhom = tqx::term_count(s, true);
    const long long diag = tqx::term_count(s, false);
    counts_ok = counts_ok && inhom == expected[s] && diag == s + 1;
    counts.push_back({{"s", s}, {"inhomogeneous", inhom}, {"diagonal", diag}});
  }
  report["term_counts"] = std::move(counts);
  report["term_counts_ok"] = check(counts_ok);

  // Diagonal reduction of the C = 0 expansion.
  const bool reduction_ok = tqx::reduction_check_diag(max_s);
  report["reduction_ok"] = check(reduction_ok);

  // Seeded numeric Hirota sweeps, generic boundary and diagonal (C = 0).
  tqx::Rng rng(static_cast<std::uint64_t>(seed));
  const double pp = rng.uniform(0.2, 2.0);
  const double qq = rng.uniform(0.2, 2.0);
  const double xx = rng.uniform(0.5, 2.0);
  nlohmann::ordered_json sweeps = nlohmann::ordered_json::array();
  const int hirota_max_s = std::min(max_s, 4);
  for (bool diagonal : {false, true}) {
    tqx::ChainSpec spec;
    spec.n_sites = 2;
    spec.params = tqx::BoundaryParams::make(Real(pp), Real(qq), diagonal ? 0 : Real(xx));
    tqx::Polynomial q = tqx::random_q(rng, 4);
    for (int s = 1; s <= hirota_max_s; ++s) {
      double max14 = 0, max15 = 0;
      nlohmann::ordered_json repro;
      for (int j = 0; j < 20; ++j) {
        Complex u;
        int tries = 0;
        do {
          u = Complex(Real(rng.uniform(0.1, 2.0)));
          if (++tries > 200)
            throw tqx::NumericError("fusion: no pole-free evaluation point found");
        } while (!tqx::safe_point(u, s + 3, q, spec));
        tqx::HirotaResidual r;
        if (corrupt_t21 && s == 1) {
          // Test hook: shift one factor of T_{2,1} by one unit and evaluate
          // the bilinear relation with the corrupted middle term.
          std::vector<tqx::TExpression> t1 = tqx::expand_w(2, true);
          tqx::TExpression t21 = tqx::t2s_expression(1);
          t21.monomials[0].factors[0].shift += 1;
          auto ev = [&](const tqx::TExpression& e, int n) {
            return tqx::eval_expression(tqx::shift_expression(e, n), q, spec, u);
          };
          const Complex lhs = ev(t1[1], 1) * ev(t1[1], -1);
          const Complex mid = ev(t21, 0);
          const Complex rhs = ev(t1[2], 0) * ev(t1[0], 0);
          r.r14 = lhs - mid - rhs;
          r.scale14 = std::max({std::abs(lhs), std::abs(mid), std::abs(rhs)});
          r.r15 = 0;
          r.scale15 = 1;
        } else {
          r = tqx::hirota_residual(s, q, spec, u);
        }
        const double rel14 =
            static_cast<double>(std::abs(r.r14) / std::max(r.scale14, Real(1e-300L)));
        const double rel15 =
            static_cast<double>(std::abs(r.r15) / std::max(r.scale15, Real(1e-300L)));
        if (rel14 > max14) {
          max14 = rel14;
          repro = {{"s", s},
                   {"u", static_cast<double>(u.real())},
                   {"q_coeffs", nlohmann::ordered_json::array()}};
          for (const Complex& c : q.coeffs)
            repro["q_coeffs"].push_back(static_cast<double>(c.real()));
        }
        max15 = std::max(max15, rel15);
      }
      const bool ok = max14 < 1e-10 && max15 < 1e-12;
      nlohmann::ordered_json entry{{"case", diagonal ? "diagonal" : "generic"},
                                   {"s", s},
                                   {"max_rel_residual_bilinear", max14},
                                   {"max_rel_residual_t2", max15},
                                   {"ok", ok}};
      if (!ok) entry["worst_point"] = repro;
      sweeps.push_back(std::move(entry));
      check(ok);
    }
  }
  report["hirota"] = std::move(sweeps);
  report["params"] = {{"p", pp}, {"q", qq}, {"xi", xx}, {"n_sites", 2}};
  report["all_pass"] = all_pass;

  tqx::write_text_atomic(report.dump(2) + "\n", out);
  std::cout << (all_pass ? "fusion checks passed" : "fusion checks FAILED")
            << "\nreport: " << out << "\n";
  if (!all_pass) {
    for (const auto& entry : report.at("hirota"))
      if (!entry.at("ok").get<bool>())
        std::cout << "  failing sweep: " << entry.dump() << "\n";
    return kExitFusion;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boundary XXX chain: T-Q completeness scans and fusion checks"};
  app.require_subcommand(1);

  tqx::RunConfig cfg;
  bool preset1 = false, preset2 = false;
  std::string sign_str = "+";

  CLI::App* solve = app.add_subcommand("solve", "solve every level and write a record");
  solve->add_option("--n", cfg.n_sites, "number of sites (2..10)");
  solve->add_option("--p", cfg.p, "boundary parameter p");
  solve->add_option("--q", cfg.q, "boundary parameter q");
  solve->add_option("--xi", cfg.xi, "boundary parameter xi (nonzero)");
  solve->add_option("--sign", sign_str, "T-Q branch sign")
      ->check(CLI::IsMember({"+", "-"}));
  solve->add_option("--tol-tq", cfg.tol_tq, "T-Q residual tolerance");
  solve->add_option("--tol-energy", cfg.tol_energy, "energy match tolerance");
  solve->add_option("--seed", cfg.seed, "seed echoed into the record");
  solve->add_option("--out", cfg.output_path, "output record path");
  solve->add_flag("--table1", preset1, "preset: N=3, p=1/4, q=1/2, xi=-sqrt(3)");
  solve->add_flag("--table2", preset2, "preset: N=4, p=1/4, q=1/2, xi=-sqrt(3)");

  std::string table_path, table_format = "md";
  CLI::App* table = app.add_subcommand("table", "render a record as a two-column table");
  table->add_option("path", table_path, "record file")->required();
  table->add_option("--format", table_format, "output format")
      ->check(CLI::IsMember({"csv", "md"}));

  int max_s = 4;
  long long fusion_seed = 1;
  bool corrupt = false;
  std::string fusion_out;
  CLI::App* fusion =
      app.add_subcommand("fusion", "symbolic expansion and Hirota residual checks");
  fusion->add_option("--max-s", max_s, "largest spin index (1..8)");
  fusion->add_option("--seed", fusion_seed, "seed for random Q and evaluation points");
  fusion->add_option("--out", fusion_out, "output report path");
  fusion->add_flag("--corrupt-t21", corrupt,
                   "test hook: corrupt one shift in the s=1 check (must fail)");

  std::string verify_path;
  CLI::App* verify = app.add_subcommand("verify", "recompute a record from parameters");
  verify->add_option("path", verify_path, "record file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (solve->parsed()) {
      if (preset1 && preset2) throw tqx::UsageError("choose one preset at most");
      if (preset1) apply_preset(cfg, 3);
      if (preset2) apply_preset(cfg, 4);
      cfg.sign = sign_str == "+" ? tqx::Sign::plus : tqx::Sign::minus;
      return cmd_solve(cfg);
    }
    if (table->parsed()) return cmd_table(table_path, table_format);
    if (fusion->parsed()) {
      try {
        return cmd_fusion(max_s, fusion_seed, corrupt, fusion_out);
      } catch (const tqx::UsageError&) {
        throw;
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFusion;
      }
    }
    if (verify->parsed()) return cmd_verify(verify_path);
  } catch (const tqx::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCompleteness;
  }
  return kExitUsage;
}
