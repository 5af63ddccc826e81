#include "tqx/records.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>

#include "json.hpp"
#include "tqx/spectrum.hpp"

namespace tqx {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json complex_json(const Complex& z) {
  return ordered_json{{"re", static_cast<double>(z.real())},
                      {"im", static_cast<double>(z.imag())}};
}

ordered_json complex_array(const std::vector<Complex>& zs) {
  ordered_json arr = ordered_json::array();
  for (const Complex& z : zs) arr.push_back(complex_json(z));
  return arr;
}

Complex complex_from_json(const ordered_json& j) {
  if (!j.is_object() || !j.contains("re") || !j.contains("im"))
    throw UsageError("record: complex values must be {re, im} objects");
  return Complex(Real(j.at("re").get<double>()), Real(j.at("im").get<double>()));
}

std::string sign_to_string(Sign s) { return s == Sign::plus ? "+" : "-"; }

Sign sign_from_string(const std::string& s) {
  if (s == "+") return Sign::plus;
  if (s == "-") return Sign::minus;
  throw UsageError("record: sign must be \"+\" or \"-\"");
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Renders a root multiset: reals plain, conjugate pairs as "a ± bi",
// unpaired complex roots with an explicit sign.
std::string render_roots(const std::vector<Complex>& roots) {
  const size_t n = roots.size();
  std::vector<bool> taken(n, false);
  std::string out;
  auto append = [&out](const std::string& s) {
    if (!out.empty()) out += ", ";
    out += s;
  };
  for (size_t i = 0; i < n; ++i) {
    if (taken[i]) continue;
    const double re = static_cast<double>(roots[i].real());
    const double im = static_cast<double>(roots[i].imag());
    if (std::abs(im) <= 1e-12) {
      append(fmt6(re));
      taken[i] = true;
      continue;
    }
    size_t partner = n;
    const double tol = 1e-9 * std::max(1.0, static_cast<double>(std::abs(roots[i])));
    for (size_t j = i + 1; j < n; ++j) {
      if (!taken[j] && std::abs(roots[j] - std::conj(roots[i])) < Real(tol)) {
        partner = j;
        break;
      }
    }
    if (partner < n) {
      append(fmt6(re) + " ± " + fmt6(std::abs(im)) + "i");
      taken[i] = taken[partner] = true;
    } else {
      append(fmt6(re) + (im < 0 ? " - " : " + ") + fmt6(std::abs(im)) + "i");
      taken[i] = true;
    }
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (n_sites < 2 || n_sites > 10)
    throw UsageError("n_sites must be between 2 and 10");
  if (!(tol_tq > 0) || !(tol_energy > 0))
    throw UsageError("tolerances must be positive");
  if (p == 0 || q == 0) throw UsageError("boundary parameters p and q must be nonzero");
  if (xi == 0)
    throw UsageError(
        "xi = 0 selects diagonal boundaries; the solver requires the "
        "off-diagonal boundary term (choose xi != 0)");
  if (alpha < 0) throw UsageError("alpha must be positive when given");
}

ChainSpec RunConfig::to_chain_spec() const {
  ChainSpec spec;
  spec.n_sites = n_sites;
  spec.sign = sign;
  spec.params = alpha > 0
                    ? BoundaryParams::with_alpha(Real(p), Real(q), Real(xi), Real(alpha))
                    : BoundaryParams::make(Real(p), Real(q), Real(xi));
  return spec;
}

std::string record_to_json_string(const CompletenessReport& rep, const RunConfig& cfg) {
  ordered_json j;
  j["schema_version"] = kRecordSchemaVersion;
  j["kind"] = "tqx.solution";
  j["config"] = ordered_json{{"n_sites", cfg.n_sites},
                             {"p", cfg.p},
                             {"q", cfg.q},
                             {"xi", cfg.xi},
                             {"alpha", static_cast<double>(rep.spec.params.alpha)},
                             {"sign", sign_to_string(cfg.sign)},
                             {"tol_tq", cfg.tol_tq},
                             {"tol_energy", cfg.tol_energy},
                             {"seed", cfg.seed}};
  ordered_json levels = ordered_json::array();
  for (const LevelRecord& lr : rep.levels) {
    ordered_json l;
    l["index"] = lr.index;
    l["energy_direct"] = lr.energy_direct;
    l["energy_bethe"] = lr.energy_bethe;
    l["tq_residual"] = static_cast<double>(lr.tq_residual);
    l["lambda_fit_residual"] = static_cast<double>(lr.lambda_fit_residual);
    l["solved"] = lr.solved;
    l["failure"] = lr.failure;
    l["bethe_roots"] = complex_array(lr.roots);
    l["lambda_coefficients"] = complex_array(lr.lambda_coefficients);
    l["q_poly"] = complex_array(lr.q_poly.xcoeffs);
    levels.push_back(std::move(l));
  }
  j["levels"] = std::move(levels);
  j["summary"] =
      ordered_json{{"max_energy_mismatch", static_cast<double>(rep.max_energy_mismatch)},
                   {"max_residual", static_cast<double>(rep.max_residual)},
                   {"all_solved", rep.all_solved},
                   {"degenerate_groups", rep.degenerate_groups}};
  return j.dump(2) + "\n";
}

StoredRecord load_record(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open record file: " + path);
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw UsageError("record is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object() || !j.contains("schema_version"))
    throw UsageError("record has no schema_version field");
  if (j.at("schema_version").get<int>() != kRecordSchemaVersion)
    throw UsageError("unsupported record schema version " +
                     j.at("schema_version").dump() + " (expected " +
                     std::to_string(kRecordSchemaVersion) + ")");
  if (j.value("kind", std::string()) != "tqx.solution")
    throw UsageError("record kind is not tqx.solution");

  StoredRecord rec;
  const ordered_json& c = j.at("config");
  rec.config.n_sites = c.at("n_sites").get<int>();
  rec.config.p = c.at("p").get<double>();
  rec.config.q = c.at("q").get<double>();
  rec.config.xi = c.at("xi").get<double>();
  rec.config.alpha = c.value("alpha", 0.0);
  rec.config.sign = sign_from_string(c.value("sign", std::string("+")));
  rec.config.tol_tq = c.at("tol_tq").get<double>();
  rec.config.tol_energy = c.at("tol_energy").get<double>();
  rec.config.seed = c.value("seed", 0LL);

  for (const ordered_json& l : j.at("levels")) {
    StoredLevel lv;
    lv.index = l.at("index").get<int>();
    lv.energy_direct = l.at("energy_direct").get<double>();
    lv.energy_bethe = l.at("energy_bethe").get<double>();
    lv.tq_residual = l.value("tq_residual", 0.0);
    lv.solved = l.value("solved", true);
    lv.failure = l.value("failure", std::string());
    for (const ordered_json& r : l.at("bethe_roots"))
      lv.roots.push_back(complex_from_json(r));
    rec.levels.push_back(std::move(lv));
  }
  rec.all_solved = j.contains("summary") ? j.at("summary").value("all_solved", false)
                                         : false;
  return rec;
}

void write_text_atomic(const std::string& text, const std::string& path) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write to " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw NumericError("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string render_table(const StoredRecord& rec, bool markdown) {
  std::vector<const StoredLevel*> rows;
  rows.reserve(rec.levels.size());
  for (const StoredLevel& lv : rec.levels) rows.push_back(&lv);
  std::stable_sort(rows.begin(), rows.end(), [](const StoredLevel* a, const StoredLevel* b) {
    if (a->energy_direct != b->energy_direct) return a->energy_direct < b->energy_direct;
    return a->index < b->index;
  });
  std::string out;
  if (markdown) {
    out += "| E | Bethe roots |\n| --- | --- |\n";
    for (const StoredLevel* lv : rows)
      out += "| " + fmt6(lv->energy_direct) + " | " + render_roots(lv->roots) + " |\n";
  } else {
    out += "E,Bethe roots\n";
    for (const StoredLevel* lv : rows)
      out += fmt6(lv->energy_direct) + ",\"" + render_roots(lv->roots) + "\"\n";
  }
  return out;
}

VerifyReport verify_record(const StoredRecord& rec) {
  VerifyReport rep;
  auto fail = [&rep](const std::string& msg) {
    rep.ok = false;
    rep.failures.push_back(msg);
  };

  rec.config.validate();
  ChainSpec spec = rec.config.to_chain_spec();
  if (static_cast<int>(rec.levels.size()) != spec.dim()) {
    fail("level count " + std::to_string(rec.levels.size()) + " != 2^N = " +
         std::to_string(spec.dim()));
    return rep;
  }

  const double tol_e = rec.config.tol_energy;
  const Real tol_q = Real(rec.config.tol_tq);

  EigenSystem es = diagonalize_h(spec);
  auto cache = std::make_shared<TransferCache>(spec);
  std::vector<Real> nodes = lambda_sample_nodes(spec.n_sites);
  for (Real u : lambda_heldout_nodes()) nodes.push_back(u);
  for (Real u : q_heldout_nodes(spec.n_sites)) nodes.push_back(u);
  cache->ensure(nodes);

  for (int k = 0; k < spec.dim(); ++k) {
    const StoredLevel& lv = rec.levels[k];
    const std::string tag = "level " + std::to_string(k) + ": ";
    if (lv.index != k) {
      fail(tag + "stored index " + std::to_string(lv.index) + " out of order");
      continue;
    }
    if (std::abs(lv.energy_direct - es.energies[k]) > tol_e)
      fail(tag + "stored direct energy " + fmt6(lv.energy_direct) +
           " != recomputed " + fmt6(es.energies[k]));
    try {
      LambdaFunction lf = lambda_for_state(spec, es, k, cache);
      const Real res = tq_residual_for_roots(lf, lv.roots, spec);
      if (res > tol_q)
        fail(tag + "recomputed T-Q residual " + fmt6(static_cast<double>(res)) +
             " exceeds tolerance " + fmt6(static_cast<double>(tol_q)));
      const double eb = static_cast<double>(energy_from_roots(lv.roots, spec));
      if (std::abs(eb - lv.energy_bethe) > 1e-9)
        fail(tag + "stored Bethe energy " + fmt6(lv.energy_bethe) +
             " inconsistent with stored roots (recomputed " + fmt6(eb) + ")");
      if (std::abs(eb - es.energies[k]) > tol_e)
        fail(tag + "root energy " + fmt6(eb) + " != direct energy " +
             fmt6(es.energies[k]));
    } catch (const std::exception& e) {
      fail(tag + e.what());
    }
  }
  return rep;
}

}  // namespace tqx
