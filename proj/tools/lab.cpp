// Batch front-end for the coupling laboratory: configuration loading,
// experiment subcommands, oracle runners, and CSV/JSON/SVG report emission.
//
// Exit codes: 0 success, 1 invariant failure, 2 configuration/usage error,
// 3 budget refusal.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lab/dd_coupler.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lab;

namespace {

constexpr int kOk = 0, kInvariant = 1, kConfig = 2, kBudget = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int lab_threads() {
  const char* env = std::getenv("LAB_THREADS");
  if (!env) return 1;
  int v = std::atoi(env);
  return v >= 1 ? v : 1;
}

// single-writer atomic file emission: temp file in place, then rename
void write_atomic(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os << content;
  }
  fs::rename(tmp, path);
}

json load_config(const std::string& file) {
  if (file.empty()) return json::object();
  std::ifstream is(file);
  if (!is) throw ConfigError("config file not found: " + file);
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

long get_long(const json& cfg, const std::string& key, long fallback) {
  if (!cfg.contains(key)) return fallback;
  if (!cfg[key].is_number_integer()) throw ConfigError(key + " must be an integer");
  return cfg[key].get<long>();
}

long get_budget(const json& cfg) {
  long b = get_long(cfg, "budget", 2000000);
  if (b <= 0) throw ConfigError("budget must be positive");
  return b;
}

// kappa = 3, k_1 = 2, Gamma_1 = fiber product over S3 (|Gamma'| = 3)
DeltaParams s3_fiber_instance() {
  auto S3 = symmetric_group(3);
  int x = -1, y = -1;
  for (int g = 0; g < S3.order && (x < 0 || y < 0); ++g) {
    if (x < 0 && S3.element_order(g) == 2) x = g;
    if (y < 0 && S3.element_order(g) == 3) y = g;
  }
  return DeltaParams(3, {0, 2}, marked_direct_product(2, 3),
                     {fiber_product_gamma(S3, x, y)});
}

// kappa = 3, k_1 = 1, Gamma_1 = fiber product over A5 (|Gamma'| = 60)
DeltaParams a5_fiber_instance() {
  auto A5 = alternating_group(5);
  for (int x = 0; x < A5.order; ++x) {
    if (A5.element_order(x) != 2) continue;
    for (int y = 0; y < A5.order; ++y) {
      if (A5.element_order(y) != 3) continue;
      try {
        diameter(A5, {x, y});
      } catch (const std::invalid_argument&) {
        continue;
      }
      return DeltaParams(3, {0, 1}, marked_direct_product(2, 3),
                         {fiber_product_gamma(A5, x, y)});
    }
  }
  throw std::logic_error("no generating pair in A5");
}

DeltaParams instance_by_name(const std::string& name) {
  if (name == "lamplighter") return DeltaParams::lamplighter(2, 3);
  if (name == "s3_fiber") return s3_fiber_instance();
  if (name == "a5_fiber") return a5_fiber_instance();
  throw ConfigError("unknown instance: " + name);
}

SyntheticSide numeric_side(const json& side) {
  SyntheticSide s;
  s.kappa = static_cast<int>(get_long(side, "kappa", 3));
  s.q = static_cast<int>(get_long(side, "q", 6));
  if (!side.contains("k") || !side.contains("l"))
    throw ConfigError("numeric side needs arrays k and l");
  for (const auto& v : side["k"]) s.k.push_back(v.get<long>());
  for (const auto& v : side["l"]) s.l.push_back(v.get<long>());
  if (side.contains("gprime"))
    for (const auto& v : side["gprime"])
      s.gprime.emplace_back(v.is_string() ? mpz_class(v.get<std::string>())
                                          : mpz_class(v.get<long>()));
  if (s.k.size() != s.gprime.size() + 1 || s.l.size() != s.k.size())
    throw ConfigError("numeric side: k, l, gprime lengths inconsistent");
  return s;
}

FunctionDescriptor phi_from_config(const json& cfg) {
  if (!cfg.contains("phi")) return {FunctionDescriptor::power, 1.0, {}};
  const json& p = cfg["phi"];
  std::string family = p.value("family", "power");
  if (family == "identity") return {FunctionDescriptor::identity, 1.0, {}};
  if (family == "power")
    return {FunctionDescriptor::power, p.value("p", 1.0), {}};
  if (family == "rho_log") {
    ProfileSpec rho;
    rho.family = ProfileSpec::power;
    rho.alpha = p.value("alpha", 1.0);
    return {FunctionDescriptor::rho_log, 1.0, rho};
  }
  throw ConfigError("unknown phi family: " + family);
}

ProfileSpec profile_from_config(const json& cfg) {
  ProfileSpec spec;
  std::string family = cfg.value("family", "power");
  if (family == "identity") {
    spec.family = ProfileSpec::identity_map;
  } else if (family == "power") {
    spec.family = ProfileSpec::power;
    spec.alpha = cfg.value("alpha", 1.0);
  } else if (family == "iterated_log") {
    spec.family = ProfileSpec::iterated_log;
    spec.r = static_cast<int>(get_long(cfg, "r", 1));
  } else {
    throw ConfigError("unknown profile family: " + family);
  }
  return spec;
}

json base_summary(const std::string& task) {
  json out;
  out["task"] = task;
  out["threads"] = lab_threads();
  return out;
}

int finish(const fs::path& out_dir, const std::string& name, json summary,
           bool ok) {
  summary["ok"] = ok;
  write_atomic(out_dir / name, summary.dump(2) + "\n");
  return ok ? kOk : kInvariant;
}

// ---------------------------------------------------------------------------

int cmd_profile_build(const json& cfg, const fs::path& out) {
  ProfileSpec spec = profile_from_config(cfg);
  long kappa = get_long(cfg, "kappa", 3);
  long lambda = get_long(cfg, "lambda", 3);
  if (kappa < 3) throw ConfigError("kappa must be at least 3");
  int M = static_cast<int>(get_long(cfg, "M", 8));
  DeltaSequences seq = build_sequences(spec, kappa, lambda, M);
  HypothesisReport rep = hypothesis_report(spec, seq);

  std::ostringstream csv;
  csv << "m,k,l\n";
  for (std::size_t m = 0; m < seq.k.size(); ++m)
    csv << m << ',' << seq.k[m].get_str() << ','
        << (m < seq.l.size() ? seq.l[m].get_str() : "") << '\n';
  write_atomic(out / "sequences.csv", csv.str());

  json summary = base_summary("profile build");
  summary["kappa"] = kappa;
  summary["lambda"] = lambda;
  summary["levels"] = seq.k.size() - 1;
  summary["infinite_tail"] = seq.infinite_tail;
  summary["profile_summable"] = rep.profile_summable;
  summary["profile_partial_sum"] = rep.profile_partial_sum;
  summary["diameter_summable"] = rep.diameter_summable;
  summary["diameter_partial_sum"] = rep.diameter_partial_sum;
  summary["sequences_text"] = seq.to_text();
  return finish(out, "profile.json", std::move(summary), true);
}

int cmd_group_check(const json& cfg, const fs::path& out) {
  std::string name = cfg.value("group", "s3_fiber");
  bool corrupt = cfg.value("corrupt", false);
  MarkedGamma mg;
  if (name == "s3_fiber") {
    auto S3 = symmetric_group(3);
    int x = -1, y = -1;
    for (int g = 0; g < S3.order && (x < 0 || y < 0); ++g) {
      if (x < 0 && S3.element_order(g) == 2) x = g;
      if (y < 0 && S3.element_order(g) == 3) y = g;
    }
    mg = fiber_product_gamma(S3, x, y);
  } else if (name == "a5_fiber") {
    mg = a5_fiber_instance().gamma(1);
  } else {
    throw ConfigError("unknown group: " + name);
  }

  json summary = base_summary("group check");
  summary["group"] = name;
  summary["order"] = mg.gamma.order;
  summary["derived_order"] = mg.gamma_prime.size();
  summary["marking_order"] = mg.q();
  summary["diameter"] = mg.diameter_l;

  bool ok = true;
  std::vector<std::string> failures;
  if (corrupt) {
    // negative control: damage one table entry and demand the axioms fail
    FiniteGroup bad = mg.gamma;
    bad.mul[1] = bad.mul[1] == 0 ? 1 : 0;
    bool caught = false;
    try {
      bad.check_axioms();
    } catch (const std::logic_error&) {
      caught = true;
    }
    ok = false;
    failures.push_back(caught ? "corrupted table rejected as intended"
                              : "corrupted table slipped through");
  } else {
    try {
      mg.gamma.check_axioms();
    } catch (const std::logic_error& e) {
      ok = false;
      failures.push_back(e.what());
    }
    int expect_order = name == "s3_fiber" ? 18 : 360;
    int expect_derived = name == "s3_fiber" ? 3 : 60;
    if (mg.gamma.order != expect_order) failures.push_back("order mismatch");
    if (static_cast<int>(mg.gamma_prime.size()) != expect_derived)
      failures.push_back("derived subgroup order mismatch");
    if (mg.q() != 6) failures.push_back("marking quotient is not Z/2 x Z/3");
    for (int g = 0; g < mg.gamma.order; ++g)
      if (!mg.in_gamma_prime(mg.derived_part(g))) {
        failures.push_back("derived part escapes the derived subgroup");
        break;
      }
    ok = failures.empty();
  }
  summary["failures"] = failures;
  return finish(out, "group.json", std::move(summary), ok);
}

int cmd_folner_stats(const json& cfg, const fs::path& out) {
  DeltaParams p = instance_by_name(cfg.value("instance", "lamplighter"));
  long n_max = get_long(cfg, "n_max", 3);
  long budget = get_budget(cfg);
  FolnerAtlas atlas(p);
  write_atomic(out / "folner.csv", atlas.growth_csv(n_max));

  json summary = base_summary("folner stats");
  summary["instance"] = cfg.value("instance", "lamplighter");
  summary["n_max"] = n_max;
  bool ok = true;
  json counts = json::array();
  for (long n = 1; n <= n_max; ++n) {
    FolnerIndex idx = atlas.full_index(n);
    mpz_class card = atlas.cardinality(idx);
    json row;
    row["n"] = n;
    row["cardinality"] = card.get_str();
    if (card <= budget) {
      long count = static_cast<long>(atlas.enumerate(idx, budget).size());
      row["enumerated"] = count;
      if (card != count) ok = false;
    } else if (cfg.value("verify_all", false)) {
      throw BudgetError("cardinality " + card.get_str() +
                        " exceeds the enumeration budget");
    }
    counts.push_back(std::move(row));
  }
  summary["counts"] = std::move(counts);
  return finish(out, "folner.json", std::move(summary), ok);
}

int cmd_zcoupling_verify(const json& cfg, const fs::path& out, long n_flag) {
  DeltaParams p = instance_by_name(cfg.value("instance", "lamplighter"));
  long n = n_flag > 0 ? n_flag : get_long(cfg, "n", 1);
  long budget = get_budget(cfg);
  ZEncoder enc(p, n);
  if (enc.size() > budget)
    throw BudgetError("set size " + enc.size().get_str() + " exceeds budget");

  std::vector<DeltaElement> box = enc.atlas().enumerate(enc.atlas().full_index(enc.box()), budget);
  std::set<mpz_class> seen;
  bool ok = mpz_class(static_cast<long>(box.size())) == enc.size();
  for (const DeltaElement& x : box) {
    mpz_class z = enc.encode(x);
    if (z < 0 || z >= enc.size() || !seen.insert(z).second || enc.decode(z) != x)
      ok = false;
  }
  json summary = base_summary("zcoupling verify");
  summary["instance"] = cfg.value("instance", "lamplighter");
  summary["n"] = n;
  summary["size"] = enc.size().get_str();
  summary["distinct_codes"] = seen.size();
  summary["bijective"] = ok;
  return finish(out, "zcoupling_verify.json", std::move(summary), ok);
}

int cmd_zcoupling_sums(const json& cfg, const fs::path& out, long n_max_flag,
                       long R_flag, const std::string& phi_flag) {
  DeltaParams p = instance_by_name(cfg.value("instance", "lamplighter"));
  json cfg2 = cfg;
  if (!phi_flag.empty()) {
    if (phi_flag == "identity")
      cfg2["phi"] = {{"family", "identity"}};
    else
      cfg2["phi"] = {{"family", "power"}, {"p", std::atof(phi_flag.c_str())}};
  }
  FunctionDescriptor phi = phi_from_config(cfg2);
  long n_max = n_max_flag > 0 ? n_max_flag : get_long(cfg, "n_max", 4);
  long R = R_flag > 0 ? R_flag : get_long(cfg, "R", 1000000);
  long budget = get_budget(cfg);

  std::vector<std::pair<double, double>> lamp_series, cursor_series;
  json rows = json::array();
  for (long n = 1; n <= n_max; ++n) {
    ZEncoder enc(p, n);
    IntegrabilitySummary s = enc.integrability_sum(R, phi, budget);
    json row;
    row["n"] = n;
    row["lamp_sum"] = s.lamp_sum;
    row["lamp_exhaustive"] = s.lamp_exhaustive;
    row["cursor_sum"] = s.cursor_sum;
    row["cursor_exhaustive"] = s.cursor_exhaustive;
    row["cursor_majorant"] = s.cursor_majorant;
    rows.push_back(std::move(row));
    lamp_series.emplace_back(static_cast<double>(n), s.lamp_sum);
    cursor_series.emplace_back(static_cast<double>(n), s.cursor_majorant);
    if (enc.size() <= budget) {
      Generator lamp{Generator::a_type, 0, 1};
      write_atomic(out / ("gaps_n" + std::to_string(n) + ".csv"),
                   enc.gap_csv(lamp, phi, budget));
    }
  }
  write_atomic(out / "zcoupling_sums.svg",
               partial_sums_svg({{"lamp", lamp_series},
                                 {"cursor majorant", cursor_series}}));
  json summary = base_summary("zcoupling sums");
  summary["phi"] = phi.to_text();
  summary["R"] = R;
  summary["rows"] = std::move(rows);
  return finish(out, "zcoupling_sums.json", std::move(summary), true);
}

DDParams dd_params_from_config(const json& cfg) {
  FunctionDescriptor phi = phi_from_config(cfg);
  double epsilon = cfg.value("epsilon", 0.5);
  bool src_num = cfg.contains("source_numeric");
  bool tgt_num = cfg.contains("target_numeric");
  if (src_num != tgt_num)
    throw ConfigError("numeric sides must be given for both or neither");
  if (src_num)
    return DDParams::synthetic_pair(numeric_side(cfg["source_numeric"]),
                                    numeric_side(cfg["target_numeric"]), phi,
                                    epsilon);
  return DDParams::concrete_pair(
      instance_by_name(cfg.value("source", "lamplighter")),
      instance_by_name(cfg.value("target", "s3_fiber")), phi, epsilon);
}

json index_json(const DDCoupler& c) {
  const TargetIndex& ix = c.index();
  json j;
  j["d"] = ix.d;
  j["i"] = ix.i;
  j["j"] = ix.j;
  j["D"] = ix.D;
  j["I"] = ix.I;
  j["J"] = ix.J;
  j["Q"] = ix.Q;
  j["R"] = ix.R;
  j["p"] = ix.p;
  j["M"] = ix.M;
  j["Q_at_least_3"] = ix.Q_at_least_3;
  j["D_exceeds_box"] = ix.D_exceeds_box;
  return j;
}

// shared verdict block for the dd subcommands: structure, carve, injection
json dd_verdicts(const DDCoupler& c, long budget, bool& ok) {
  json v;
  v["E_sandwich"] = c.E_sandwich_holds();
  v["theta_tilde_sandwich"] = c.theta_tilde_sandwich_holds();
  if (c.index().Q < 1) {
    v["degenerate_split"] = true;
    return v;
  }
  v["degenerate_split"] = false;
  if (!(c.E_sandwich_holds() && c.theta_tilde_sandwich_holds())) ok = false;
  bool gap_free = c.cursor_image_gap_free();
  v["cursor_image_gap_free"] = gap_free;
  if (!gap_free) ok = false;

  CarveReport rep = c.carve();
  v["theta_threshold"] = rep.theta_threshold.get_str();
  v["chi_threshold"] = rep.chi_threshold;
  v["removed"] = rep.removed.get_str();
  v["removed_bound"] = rep.removed_bound.get_str();
  v["carved_size"] = rep.carved_size.get_str();
  v["proportional"] = rep.proportional;
  if (rep.removed > rep.removed_bound || !rep.proportional) ok = false;

  if (c.params().concrete() && c.source_size() <= budget) {
    FolnerAtlas src(*c.params().source);
    std::vector<DeltaElement> box =
        src.enumerate(src.full_index(c.box()), budget);
    std::set<DeltaElement> images;
    bool carved = true;
    for (const DeltaElement& x : box) {
      DeltaElement y = c.inject(x);
      if (!c.carved_member(y)) carved = false;
      images.insert(y);
    }
    bool injective = images.size() == box.size();
    v["injective"] = injective;
    v["image_in_carved_set"] = carved;
    if (!injective || !carved) ok = false;
    long radius = c.density_radius(budget * 8);
    v["density_radius"] = radius;
    v["density_radius_reference"] = 2 * 3 * 3 + 1;  // 2 kappa^2 + 1
    if (radius < 0) ok = false;
  }
  return v;
}

int cmd_ddcoupling_verify(const json& cfg, const fs::path& out, long n_flag) {
  long n = n_flag > 0 ? n_flag : get_long(cfg, "n", 1);
  long budget = get_budget(cfg);
  DDCoupler c(dd_params_from_config(cfg), n);
  json summary = base_summary("ddcoupling verify");
  summary["n"] = n;
  summary["source_size"] = c.source_size().get_str();
  summary["enlarged_size"] = c.enlarged_size().get_str();
  summary["index"] = index_json(c);
  bool ok = true;
  summary["verdicts"] = dd_verdicts(c, budget, ok);
  return finish(out, "ddcoupling_verify.json", std::move(summary), ok);
}

Generator parse_generator(const DeltaParams& p, const std::string& text) {
  for (const Generator& s : generator_set(p)) {
    std::string name;
    if (s.kind == Generator::cursor)
      name = s.shift > 0 ? "cursor" : "cursor-";
    else
      name = std::string(s.kind == Generator::a_type ? "a" : "b") + ":" +
             std::to_string(s.power);
    if (name == text) return s;
  }
  throw ConfigError("unknown generator: " + text +
                    " (use cursor, a:P, or b:P)");
}

int cmd_ddcoupling_audit(const json& cfg, const fs::path& out, long n_flag,
                         const std::string& gen) {
  long n = n_flag > 0 ? n_flag : get_long(cfg, "n", 1);
  long budget = get_budget(cfg);
  DDParams params = dd_params_from_config(cfg);
  if (!params.concrete())
    throw ConfigError("audit needs a concrete source/target pair");
  DDCoupler c(params, n);
  if (c.index().Q < 1)
    throw BudgetError("degenerate split at this n: no element-level audit");
  if (c.source_size() > budget)
    throw BudgetError("source size " + c.source_size().get_str() +
                      " exceeds budget");
  Generator s = parse_generator(*params.source, gen.empty() ? "cursor" : gen);
  CouplingAudit audit = c.distance_audit(s, budget);
  write_atomic(out / "ddcoupling_audit.csv", audit.csv());

  json summary = base_summary("ddcoupling audit");
  summary["n"] = n;
  summary["generator"] = gen.empty() ? "cursor" : gen;
  summary["index"] = index_json(c);
  summary["exhaustive"] = audit.exhaustive;
  summary["bounds_certified"] = audit.bounds_certified;
  summary["depth_zero_below_start"] = audit.depth_zero_below_start;
  summary["max_distance"] = audit.max_distance;
  summary["max_shape_ratio"] = audit.max_shape_ratio;
  bool ok = audit.bounds_certified && audit.depth_zero_below_start;
  summary["verdicts"] = dd_verdicts(c, budget, ok);
  return finish(out, "ddcoupling_audit.json", std::move(summary), ok);
}

int cmd_ddcoupling_sums(const json& cfg, const fs::path& out) {
  long n_min = get_long(cfg, "n_min", 1);
  long n_max = get_long(cfg, "n_max", 3);
  long R = get_long(cfg, "R", 1000000000);
  long budget = get_budget(cfg);
  DDParams params = dd_params_from_config(cfg);

  std::ostringstream csv;
  csv << "n,head,seam,tail,total,exhaustive\n";
  std::vector<std::pair<double, double>> totals;
  json rows = json::array();
  for (long n = n_min; n <= n_max; ++n) {
    DDCoupler c(params, n);
    if (c.index().Q < 1) {
      json row;
      row["n"] = n;
      row["degenerate_split"] = true;
      rows.push_back(std::move(row));
      continue;
    }
    IntegrabilityTriple t = c.integrability_sum(R, budget);
    csv << n << ',' << t.head << ',' << t.seam << ',' << t.tail << ','
        << t.total() << ',' << (t.exhaustive ? 1 : 0) << '\n';
    totals.emplace_back(static_cast<double>(n), t.total());
    json row;
    row["n"] = n;
    row["head"] = t.head;
    row["seam"] = t.seam;
    row["tail"] = t.tail;
    row["total"] = t.total();
    row["exhaustive"] = t.exhaustive;
    rows.push_back(std::move(row));
  }
  write_atomic(out / "ddcoupling_sums.csv", csv.str());
  write_atomic(out / "ddcoupling_sums.svg",
               partial_sums_svg({{"total", totals}}));
  json summary = base_summary("ddcoupling sums");
  summary["R"] = R;
  summary["hypotheses_hold"] = params.hypotheses_hold();
  summary["fitted_exponent"] = params.hypotheses.fitted_exponent;
  summary["epsilon"] = params.epsilon;
  summary["rows"] = std::move(rows);
  return finish(out, "ddcoupling_sums.json", std::move(summary), true);
}

int cmd_oracle(const json& cfg, const fs::path& out, const std::string& name) {
  json record = base_summary("oracle");
  record["oracle"] = name;
  record["inputs"] = cfg;
  if (name == "varbase-decompose") {
    if (!cfg.contains("x") || !cfg.contains("radices"))
      throw ConfigError("varbase-decompose needs x and radices");
    std::vector<Int> radices;
    for (const auto& r : cfg["radices"]) radices.emplace_back(r.get<long>());
    DigitVector d = decompose(mpz_class(cfg["x"].get<long>()),
                              MixedRadixBase(std::move(radices), true));
    json digits = json::array();
    for (const Int& x : d.digits) digits.push_back(x.get_str());
    record["value"] = std::move(digits);
    record["method"] = "iterated Euclidean division";
  } else if (name == "diameter") {
    MarkedGamma mg;
    std::string group = cfg.value("group", "");
    if (group.empty())
      mg = marked_direct_product(static_cast<int>(get_long(cfg, "a", 2)),
                                 static_cast<int>(get_long(cfg, "b", 3)));
    else if (group == "s3_fiber")
      mg = s3_fiber_instance().gamma(1);
    else if (group == "a5_fiber")
      mg = a5_fiber_instance().gamma(1);
    else
      throw ConfigError("unknown group: " + group);
    record["value"] = diameter(mg.gamma, {mg.a_gen, mg.b_gen});
    record["method"] = "breadth-first search over the Cayley graph";
  } else if (name == "folner-count") {
    DeltaParams p = instance_by_name(cfg.value("instance", "lamplighter"));
    long n = get_long(cfg, "n", 1);
    long budget = get_budget(cfg);
    FolnerAtlas atlas(p);
    FolnerIndex idx = atlas.full_index(n);
    if (atlas.cardinality(idx) > budget)
      throw BudgetError("cardinality exceeds budget");
    record["value"] =
        static_cast<long>(atlas.enumerate(idx, budget).size());
    record["method"] = "exhaustive enumeration";
  } else {
    throw ConfigError("unknown oracle: " + name);
  }
  return finish(out, "oracle_" + name + ".json", std::move(record), true);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coupling laboratory batch front-end"};
  app.require_subcommand(0, 1);

  std::string config_file, out_dir = "lab_out";
  long n_flag = 0, n_max_flag = 0, R_flag = 0;
  std::string phi_flag, gen_flag, oracle_name;
  app.add_option("--config", config_file, "JSON configuration file");
  app.add_option("--out", out_dir, "output directory");

  auto* profile = app.add_subcommand("profile", "profile machinery");
  auto* profile_build = profile->add_subcommand("build", "build sequences");
  auto* group = app.add_subcommand("group", "marked-group checks");
  auto* group_check = group->add_subcommand("check", "table and marking audit");
  auto* folner = app.add_subcommand("folner", "nested-set statistics");
  auto* folner_stats = folner->add_subcommand("stats", "growth and counts");
  auto* zc = app.add_subcommand("zcoupling", "integer-line coupling");
  auto* zc_verify = zc->add_subcommand("verify", "bijectivity audit");
  auto* zc_sums = zc->add_subcommand("sums", "integrability sums");
  zc_verify->add_option("--n", n_flag, "box exponent");
  zc_sums->add_option("--phi", phi_flag, "weight: identity or an exponent");
  zc_sums->add_option("--R", R_flag, "distance cutoff");
  zc_sums->add_option("--n-max", n_max_flag, "largest box exponent");
  auto* dd = app.add_subcommand("ddcoupling", "diagonal-product coupling");
  auto* dd_verify = dd->add_subcommand("verify", "structural verdicts");
  auto* dd_audit = dd->add_subcommand("audit", "distance audit");
  auto* dd_sums = dd->add_subcommand("sums", "integrability sums");
  dd_verify->add_option("--n", n_flag, "box exponent");
  dd_audit->add_option("--n", n_flag, "box exponent");
  dd_audit->add_option("--gen", gen_flag, "generator: cursor, a:P, or b:P");
  auto* oracle = app.add_subcommand("oracle", "independent value computation");
  oracle->add_option("--name", oracle_name, "registered oracle name");

  // --config / --out live on the root app; let subcommands pass them up
  for (CLI::App* top : app.get_subcommands(nullptr)) {
    top->fallthrough(true);
    for (CLI::App* leaf : top->get_subcommands(nullptr)) leaf->fallthrough(true);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    json cfg = load_config(config_file);
    fs::path out(out_dir);
    if (profile_build->parsed()) return cmd_profile_build(cfg, out);
    if (group_check->parsed()) return cmd_group_check(cfg, out);
    if (folner_stats->parsed()) return cmd_folner_stats(cfg, out);
    if (zc_verify->parsed()) return cmd_zcoupling_verify(cfg, out, n_flag);
    if (zc_sums->parsed())
      return cmd_zcoupling_sums(cfg, out, n_max_flag, R_flag, phi_flag);
    if (dd_verify->parsed()) return cmd_ddcoupling_verify(cfg, out, n_flag);
    if (dd_audit->parsed())
      return cmd_ddcoupling_audit(cfg, out, n_flag, gen_flag);
    if (dd_sums->parsed()) return cmd_ddcoupling_sums(cfg, out);
    if (oracle->parsed()) {
      if (oracle_name.empty()) throw ConfigError("oracle needs --name");
      return cmd_oracle(cfg, out, oracle_name);
    }
    return kOk;  // empty task list
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const BudgetError& e) {
    std::cerr << "budget refusal: " << e.what() << "\n";
    return kBudget;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kInvariant;
  }
}
