// Python bindings for the coupling laboratory.  Arbitrary-precision values
// cross the boundary as native Python ints (via decimal strings); exact
// rationals cross as "p/q" strings so nothing is silently rounded.
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <gmpxx.h>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lab/dd_coupler.hpp"
#include "lab/delta_core.hpp"
#include "lab/folner_atlas.hpp"
#include "lab/group_kernel.hpp"
#include "lab/mixed_radix.hpp"
#include "lab/profile_forge.hpp"
#include "lab/z_coupler.hpp"

namespace py = pybind11;
using namespace lab;

namespace {

py::object to_py(const mpz_class& z) {
  return py::reinterpret_steal<py::object>(
      PyLong_FromString(z.get_str().c_str(), nullptr, 10));
}

mpz_class to_mpz(const py::object& o) {
  return mpz_class(py::str(o).cast<std::string>());
}

std::vector<Int> to_mpz_vec(const std::vector<py::object>& v) {
  std::vector<Int> out;
  out.reserve(v.size());
  for (const py::object& o : v) out.push_back(to_mpz(o));
  return out;
}

py::list to_py_list(const std::vector<Int>& v) {
  py::list out;
  for (const Int& z : v) out.append(to_py(z));
  return out;
}

Rat to_rat(const py::object& o) {
  std::string s = py::str(o).cast<std::string>();
  Rat r(s);
  r.canonicalize();
  return r;
}

std::string rat_str(const Rat& r) { return r.get_str(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Verification laboratory for finitary couplings of diagonal products: "
      "variable-base arithmetic, marked groups, nested set chains, integer "
      "encodings, coupling injections, and piecewise profiles.";

  // ---- variable-base arithmetic --------------------------------------------
  py::class_<MixedRadixBase>(m, "MixedRadixBase")
      .def(py::init([](const std::vector<py::object>& radices, bool unbounded) {
             return MixedRadixBase(to_mpz_vec(radices), unbounded);
           }),
           py::arg("radices"), py::arg("last_unbounded") = false)
      .def_property_readonly(
          "radices",
          [](const MixedRadixBase& b) { return to_py_list(b.radices); })
      .def_readonly("last_unbounded", &MixedRadixBase::last_unbounded)
      .def("__len__", &MixedRadixBase::size)
      .def("prefix_product",
           [](const MixedRadixBase& b, std::size_t mdx) {
             return to_py(b.prefix_product(mdx));
           })
      .def("product",
           [](const MixedRadixBase& b) { return to_py(b.product()); });

  m.def(
      "decompose",
      [](const py::object& x, const MixedRadixBase& base) {
        return to_py_list(decompose(to_mpz(x), base).digits);
      },
      py::arg("x"), py::arg("base"), "Digits of x, least significant first.");
  m.def(
      "recompose",
      [](const std::vector<py::object>& digits, const MixedRadixBase& base) {
        DigitVector d{to_mpz_vec(digits), base};
        return to_py(recompose(d));
      },
      py::arg("digits"), py::arg("base"));
  m.def(
      "carry_index",
      [](const py::object& x, std::size_t k, const MixedRadixBase& base) {
        return carry_index(to_mpz(x), k, base);
      },
      py::arg("x"), py::arg("k"), py::arg("base"),
      "Smallest digit index above k that can absorb a carry.");
  m.def(
      "addition_locality_holds",
      [](const py::object& x, const py::object& y, std::size_t k,
         const MixedRadixBase& base) {
        return addition_locality_holds(to_mpz(x), to_mpz(y), k, base);
      },
      py::arg("x"), py::arg("y"), py::arg("k"), py::arg("base"));
  m.def(
      "count_by_carry_index",
      [](const MixedRadixBase& base, std::size_t k, std::size_t mdx) {
        return to_py(count_by_carry_index(base, k, mdx));
      },
      py::arg("base"), py::arg("k"), py::arg("m"));
  m.def(
      "lipschitz_image_covers",
      [](const std::vector<py::object>& image, const MixedRadixBase& base,
         std::size_t i, const py::object& c) {
        return lipschitz_image_covers(to_mpz_vec(image), base, i, to_mpz(c));
      },
      py::arg("image"), py::arg("base"), py::arg("i"), py::arg("c"));

  // ---- finite marked groups ------------------------------------------------
  py::class_<FiniteGroup>(m, "FiniteGroup")
      .def_readonly("order", &FiniteGroup::order)
      .def_readonly("identity", &FiniteGroup::identity)
      .def("prod", &FiniteGroup::prod)
      .def("inverse", &FiniteGroup::inverse)
      .def("conj", &FiniteGroup::conj)
      .def("element_order", &FiniteGroup::element_order)
      .def("check_axioms", &FiniteGroup::check_axioms)
      .def_static("trivial", &FiniteGroup::trivial)
      .def_static("cyclic", &FiniteGroup::cyclic)
      .def_static("direct_product", &FiniteGroup::direct_product)
      .def_static("from_permutations", &FiniteGroup::from_permutations);
  m.def("symmetric_group", &symmetric_group);
  m.def("alternating_group", &alternating_group);
  m.def("normal_closure", &normal_closure);
  m.def("diameter", &diameter);

  py::class_<MarkedGamma>(m, "MarkedGamma")
      .def_readonly("gamma", &MarkedGamma::gamma)
      .def_readonly("a_gen", &MarkedGamma::a_gen)
      .def_readonly("b_gen", &MarkedGamma::b_gen)
      .def_readonly("A", &MarkedGamma::A)
      .def_readonly("B", &MarkedGamma::B)
      .def_readonly("gamma_prime", &MarkedGamma::gamma_prime)
      .def_readonly("theta", &MarkedGamma::theta)
      .def_readonly("diameter_l", &MarkedGamma::diameter_l)
      .def("q", &MarkedGamma::q)
      .def("derived_part", &MarkedGamma::derived_part)
      .def("in_gamma_prime", &MarkedGamma::in_gamma_prime)
      .def("gamma_prime_bfs", &MarkedGamma::gamma_prime_bfs)
      .def("to_text",
           [](const MarkedGamma& mg) {
             std::ostringstream os;
             export_marked(mg, os);
             return os.str();
           })
      .def_static("from_text", [](const std::string& text) {
        std::istringstream is(text);
        return import_marked(is);
      });
  m.def("fiber_product_gamma", &fiber_product_gamma, py::arg("H"), py::arg("x"),
        py::arg("y"), py::arg("a_order") = 2, py::arg("b_order") = 3);
  m.def("marked_direct_product", &marked_direct_product);

  // ---- diagonal-product elements -------------------------------------------
  py::class_<DeltaParams>(m, "DeltaParams")
      .def(py::init<int, std::vector<long>, MarkedGamma,
                    std::vector<MarkedGamma>>(),
           py::arg("kappa"), py::arg("k"), py::arg("gamma0"), py::arg("gammas"))
      .def_static("lamplighter", &DeltaParams::lamplighter,
                  py::arg("a_order") = 2, py::arg("b_order") = 3)
      .def_readonly("kappa", &DeltaParams::kappa)
      .def_readonly("k", &DeltaParams::k)
      .def("levels", &DeltaParams::levels)
      .def("q", &DeltaParams::q)
      .def("ell", &DeltaParams::ell)
      .def("l", &DeltaParams::l)
      .def("gamma", &DeltaParams::gamma);

  py::class_<DeltaElement>(m, "DeltaElement")
      .def(py::init<>())
      .def_readwrite("t", &DeltaElement::t)
      .def_readwrite("f0", &DeltaElement::f0)
      .def_readwrite("fprime", &DeltaElement::fprime)
      .def(py::self == py::self)
      .def(py::self < py::self);

  py::class_<Generator> generator(m, "Generator");
  py::enum_<Generator::Kind>(generator, "Kind")
      .value("cursor", Generator::cursor)
      .value("a_type", Generator::a_type)
      .value("b_type", Generator::b_type);
  generator
      .def(py::init([](Generator::Kind kind, int shift, int power) {
             return Generator{kind, shift, power};
           }),
           py::arg("kind"), py::arg("shift") = 0, py::arg("power") = 0)
      .def_readwrite("kind", &Generator::kind)
      .def_readwrite("shift", &Generator::shift)
      .def_readwrite("power", &Generator::power);

  py::class_<Interval>(m, "Interval")
      .def_readonly("lo", &Interval::lo)
      .def_readonly("hi", &Interval::hi)
      .def("diam", &Interval::diam)
      .def("card", &Interval::card);

  py::enum_<DistanceMode>(m, "DistanceMode")
      .value("interval", DistanceMode::interval)
      .value("level", DistanceMode::level);

  m.def("identity", &identity);
  m.def("generator_set", &generator_set);
  m.def("generator_element", &generator_element);
  m.def("apply_generator", &apply_generator,
        "The defined right action: lamp moves touch f0 at the cursor only.");
  m.def("multiply", &multiply, "The true group law.");
  m.def("inverse", &inverse);
  m.def("level_map", &level_map);
  m.def("range_interval", &range_interval);
  m.def("essential_contribution", &essential_contribution);
  m.def("word_length_upper", &word_length_upper);
  m.def("word_length_exact", &word_length_exact, py::arg("params"),
        py::arg("x"), py::arg("limit"), py::arg("pad") = 1);
  m.def("distance_exact", &distance_exact, py::arg("params"), py::arg("x"),
        py::arg("y"), py::arg("limit"), py::arg("pad") = 1);
  m.def("distance_upper", &distance_upper);
  m.def("element_to_text", &element_to_text);
  m.def("element_from_text", &element_from_text);

  // ---- nested set chains ---------------------------------------------------
  py::class_<FolnerIndex>(m, "FolnerIndex")
      .def(py::init([](long n, int i, int j) {
             return FolnerIndex{n, i, j};
           }),
           py::arg("n"), py::arg("i"), py::arg("j"))
      .def_readwrite("n", &FolnerIndex::n)
      .def_readwrite("i", &FolnerIndex::i)
      .def_readwrite("j", &FolnerIndex::j)
      .def(py::self == py::self);

  py::class_<FolnerAtlas>(m, "FolnerAtlas")
      .def(py::init<DeltaParams>())
      .def("chain_length", &FolnerAtlas::chain_length)
      .def("lambda_size", &FolnerAtlas::lambda_size)
      .def("lambda_set", &FolnerAtlas::lambda_set)
      .def("valid", &FolnerAtlas::valid)
      .def("successor", &FolnerAtlas::successor)
      .def("full_index", &FolnerAtlas::full_index)
      .def("cardinality",
           [](const FolnerAtlas& a, const FolnerIndex& idx) {
             return to_py(a.cardinality(idx));
           })
      .def("member", &FolnerAtlas::member)
      .def("enumerate", &FolnerAtlas::enumerate, py::arg("idx"),
           py::arg("budget") = 2000000)
      .def("boundary", &FolnerAtlas::boundary, py::arg("idx"),
           py::arg("budget") = 2000000)
      .def(
          "sofic_defect",
          [](const FolnerAtlas& a, const FolnerIndex& idx, int r, long budget) {
            return a.sofic_defect(idx, r, budget).get_str();
          },
          py::arg("idx"), py::arg("r"), py::arg("budget") = 2000000,
          "Exact defect fraction as a 'p/q' string.")
      .def("growth_csv", &FolnerAtlas::growth_csv)
      .def("growth_report_text", [](const FolnerAtlas& a, long n_max) {
        return a.growth_bounds_report(n_max).to_text();
      });

  // ---- integer-line encoding -----------------------------------------------
  py::class_<FunctionDescriptor> fdesc(m, "FunctionDescriptor");
  py::enum_<FunctionDescriptor::Kind>(fdesc, "Kind")
      .value("identity", FunctionDescriptor::identity)
      .value("power", FunctionDescriptor::power)
      .value("rho_log", FunctionDescriptor::rho_log);
  fdesc.def(py::init<>())
      .def_readwrite("kind", &FunctionDescriptor::kind)
      .def_readwrite("p", &FunctionDescriptor::p)
      .def_readwrite("rho", &FunctionDescriptor::rho)
      .def("eval", &FunctionDescriptor::eval)
      .def("eval_ln", &FunctionDescriptor::eval_ln)
      .def("to_text", &FunctionDescriptor::to_text);
  m.def("compose_integrability", &compose_integrability);

  py::class_<IntegrabilitySummary>(m, "IntegrabilitySummary")
      .def_readonly("lamp_sum", &IntegrabilitySummary::lamp_sum)
      .def_readonly("lamp_exhaustive", &IntegrabilitySummary::lamp_exhaustive)
      .def_readonly("cursor_sum", &IntegrabilitySummary::cursor_sum)
      .def_readonly("cursor_exhaustive",
                    &IntegrabilitySummary::cursor_exhaustive)
      .def_readonly("cursor_majorant", &IntegrabilitySummary::cursor_majorant);

  m.def("block_intervals", &block_intervals);
  m.def("carry_position", &carry_position);

  py::class_<ZEncoder>(m, "ZEncoder")
      .def(py::init<DeltaParams, long>(), py::arg("params"), py::arg("n"))
      .def("n", &ZEncoder::n)
      .def("box", &ZEncoder::box)
      .def("size", [](const ZEncoder& e) { return to_py(e.size()); })
      .def("base", &ZEncoder::base)
      .def("member", &ZEncoder::member)
      .def("interior", &ZEncoder::interior)
      .def("encode",
           [](const ZEncoder& e, const DeltaElement& x) {
             return to_py(e.encode(x));
           })
      .def("decode",
           [](const ZEncoder& e, const py::object& z) {
             return e.decode(to_mpz(z));
           })
      .def("neighbor_gap",
           [](const ZEncoder& e, const DeltaElement& x, const Generator& s) {
             return to_py(e.neighbor_gap(x, s));
           })
      .def("carry_histogram",
           [](const ZEncoder& e) {
             py::dict out;
             for (const auto& [mdx, count] : e.carry_histogram())
               out[py::int_(mdx)] = to_py(count);
             return out;
           })
      .def("integrability_sum", &ZEncoder::integrability_sum, py::arg("R"),
           py::arg("phi"), py::arg("budget") = 2000000)
      .def("gap_csv", &ZEncoder::gap_csv, py::arg("s"), py::arg("phi"),
           py::arg("budget") = 2000000);

  // ---- piecewise profiles --------------------------------------------------
  py::class_<ProfileSpec> pspec(m, "ProfileSpec");
  py::enum_<ProfileSpec::Family>(pspec, "Family")
      .value("identity_map", ProfileSpec::identity_map)
      .value("power", ProfileSpec::power)
      .value("iterated_log", ProfileSpec::iterated_log)
      .value("tabulated", ProfileSpec::tabulated);
  pspec.def(py::init<>())
      .def_readwrite("family", &ProfileSpec::family)
      .def_readwrite("alpha", &ProfileSpec::alpha)
      .def_readwrite("r", &ProfileSpec::r)
      .def_readwrite("table", &ProfileSpec::table)
      .def("eval", &ProfileSpec::eval)
      .def("in_C", &ProfileSpec::in_C, py::arg("x_max") = 1e12);

  py::class_<DeltaSequences>(m, "DeltaSequences")
      .def_readonly("kappa", &DeltaSequences::kappa)
      .def_readonly("lambda_", &DeltaSequences::lambda)
      .def_property_readonly(
          "k", [](const DeltaSequences& s) { return to_py_list(s.k); })
      .def_property_readonly(
          "l", [](const DeltaSequences& s) { return to_py_list(s.l); })
      .def_readonly("infinite_tail", &DeltaSequences::infinite_tail)
      .def("to_text", &DeltaSequences::to_text)
      .def_static("from_text", &DeltaSequences::from_text);
  m.def("build_sequences", &build_sequences, py::arg("rho"), py::arg("kappa"),
        py::arg("lambda_"), py::arg("M"));

  py::class_<PiecewiseProfile>(m, "PiecewiseProfile")
      .def(py::init([](const DeltaSequences& s, const py::object& delta) {
             return delta.is_none() ? PiecewiseProfile(s)
                                    : PiecewiseProfile(s, to_rat(delta));
           }),
           py::arg("seq"), py::arg("delta") = py::none(),
           "delta accepts an int or a 'p/q' string; exact rationals only.")
      .def_property_readonly(
          "delta", [](const PiecewiseProfile& p) { return rat_str(p.delta); })
      .def("bar_f",
           [](const PiecewiseProfile& p, const py::object& x) {
             return rat_str(p.bar_f(to_rat(x)));
           })
      .def("bar_rho",
           [](const PiecewiseProfile& p, const py::object& x) {
             return rat_str(p.bar_rho(to_rat(x)));
           })
      .def("rho_bij",
           [](const PiecewiseProfile& p, const py::object& x) {
             return rat_str(p.rho_bij(to_rat(x)));
           })
      .def("rho_bij_inverse",
           [](const PiecewiseProfile& p, const py::object& y) {
             return rat_str(p.rho_bij_inverse(to_rat(y)));
           })
      .def("corners", [](const PiecewiseProfile& p) {
        py::list out;
        for (const auto& [x, y] : p.corners())
          out.append(py::make_tuple(rat_str(x), rat_str(y)));
        return out;
      });

  py::class_<HypothesisReport>(m, "HypothesisReport")
      .def_readonly("profile_terms", &HypothesisReport::profile_terms)
      .def_readonly("profile_partial_sum", &HypothesisReport::profile_partial_sum)
      .def_readonly("profile_summable", &HypothesisReport::profile_summable)
      .def_readonly("diameter_terms", &HypothesisReport::diameter_terms)
      .def_readonly("diameter_partial_sum",
                    &HypothesisReport::diameter_partial_sum)
      .def_readonly("diameter_summable", &HypothesisReport::diameter_summable)
      .def_readonly("has_target", &HypothesisReport::has_target)
      .def_readonly("fitted_exponent", &HypothesisReport::fitted_exponent)
      .def_readonly("epsilon", &HypothesisReport::epsilon)
      .def("to_text", &HypothesisReport::to_text);
  m.def(
      "hypothesis_report",
      [](const ProfileSpec& rho, const DeltaSequences& seq,
         const ProfileSpec* target, const PiecewiseProfile* bij) {
        return hypothesis_report(rho, seq, target, bij);
      },
      py::arg("rho"), py::arg("seq"), py::arg("target_rho") = nullptr,
      py::arg("source_bij") = nullptr);

  // ---- coupling sessions ---------------------------------------------------
  py::class_<SyntheticSide>(m, "SyntheticSide")
      .def(py::init([](int kappa, int q, std::vector<long> k,
                       std::vector<long> l, const std::vector<py::object>& gp) {
             return SyntheticSide{kappa, q, std::move(k), std::move(l),
                                  to_mpz_vec(gp)};
           }),
           py::arg("kappa"), py::arg("q"), py::arg("k"), py::arg("l"),
           py::arg("gprime"));

  py::class_<TargetIndex>(m, "TargetIndex")
      .def_readonly("D", &TargetIndex::D)
      .def_readonly("I", &TargetIndex::I)
      .def_readonly("J", &TargetIndex::J)
      .def_readonly("Q", &TargetIndex::Q)
      .def_readonly("R", &TargetIndex::R)
      .def_readonly("p", &TargetIndex::p)
      .def_readonly("M", &TargetIndex::M)
      .def_readonly("D_exceeds_box", &TargetIndex::D_exceeds_box)
      .def_readonly("Q_at_least_3", &TargetIndex::Q_at_least_3);

  py::class_<SpreadingMap>(m, "SpreadingMap")
      .def_property_readonly(
          "a", [](const SpreadingMap& s) { return to_py(s.a); })
      .def_property_readonly(
          "b", [](const SpreadingMap& s) { return to_py(s.b); })
      .def_property_readonly(
          "max_in", [](const SpreadingMap& s) { return to_py(s.max_in); })
      .def_property_readonly(
          "max_out", [](const SpreadingMap& s) { return to_py(s.max_out); })
      .def("eval",
           [](const SpreadingMap& s, const py::object& x) {
             return to_py(s.eval(to_mpz(x)));
           })
      .def("invert", [](const SpreadingMap& s, const py::object& y) {
        return to_py(s.invert(to_mpz(y)));
      });

  py::class_<CarveReport>(m, "CarveReport")
      .def_property_readonly(
          "theta_threshold",
          [](const CarveReport& r) { return to_py(r.theta_threshold); })
      .def_readonly("chi_threshold", &CarveReport::chi_threshold)
      .def_property_readonly(
          "removed", [](const CarveReport& r) { return to_py(r.removed); })
      .def_property_readonly(
          "removed_bound",
          [](const CarveReport& r) { return to_py(r.removed_bound); })
      .def_property_readonly(
          "source_size",
          [](const CarveReport& r) { return to_py(r.source_size); })
      .def_property_readonly(
          "enlarged_size",
          [](const CarveReport& r) { return to_py(r.enlarged_size); })
      .def_property_readonly(
          "carved_size",
          [](const CarveReport& r) { return to_py(r.carved_size); })
      .def_readonly("proportional", &CarveReport::proportional);

  py::class_<AuditRow>(m, "AuditRow")
      .def_readonly("m", &AuditRow::m)
      .def_property_readonly(
          "count", [](const AuditRow& r) { return to_py(r.count); })
      .def_readonly("paper_majorant", &AuditRow::paper_majorant)
      .def_readonly("fitted_constant", &AuditRow::fitted_constant)
      .def_readonly("partial_sum", &AuditRow::partial_sum);

  py::class_<CouplingAudit>(m, "CouplingAudit")
      .def_readonly("rows", &CouplingAudit::rows)
      .def_readonly("exhaustive", &CouplingAudit::exhaustive)
      .def_readonly("depth_zero_below_start",
                    &CouplingAudit::depth_zero_below_start)
      .def_readonly("bounds_certified", &CouplingAudit::bounds_certified)
      .def_readonly("max_distance", &CouplingAudit::max_distance)
      .def_readonly("max_shape_ratio", &CouplingAudit::max_shape_ratio)
      .def("csv", &CouplingAudit::csv);

  py::class_<IntegrabilityTriple>(m, "IntegrabilityTriple")
      .def_readonly("head", &IntegrabilityTriple::head)
      .def_readonly("seam", &IntegrabilityTriple::seam)
      .def_readonly("tail", &IntegrabilityTriple::tail)
      .def_readonly("exhaustive", &IntegrabilityTriple::exhaustive)
      .def_readonly("hypotheses_hold", &IntegrabilityTriple::hypotheses_hold)
      .def("total", &IntegrabilityTriple::total);

  py::class_<DDParams>(m, "DDParams")
      .def_static("concrete_pair", &DDParams::concrete_pair, py::arg("src"),
                  py::arg("tgt"), py::arg("phi"), py::arg("epsilon"))
      .def_static("synthetic_pair", &DDParams::synthetic_pair, py::arg("src"),
                  py::arg("tgt"), py::arg("phi"), py::arg("epsilon"))
      .def_readonly("phi", &DDParams::phi)
      .def_readonly("epsilon", &DDParams::epsilon)
      .def_readonly("hypotheses", &DDParams::hypotheses)
      .def("concrete", &DDParams::concrete)
      .def("hypotheses_hold", &DDParams::hypotheses_hold);

  py::class_<DDCoupler>(m, "DDCoupler")
      .def(py::init<DDParams, long>(), py::arg("params"), py::arg("n"))
      .def("n", &DDCoupler::n)
      .def("box", &DDCoupler::box)
      .def("index", &DDCoupler::index)
      .def("source_size",
           [](const DDCoupler& c) { return to_py(c.source_size()); })
      .def("enlarged_size",
           [](const DDCoupler& c) { return to_py(c.enlarged_size()); })
      .def("max_mu", [](const DDCoupler& c) { return to_py(c.max_mu()); })
      .def("max_E", [](const DDCoupler& c) { return to_py(c.max_E()); })
      .def("max_theta_tilde",
           [](const DDCoupler& c) { return to_py(c.max_theta_tilde()); })
      .def("max_theta", [](const DDCoupler& c) { return to_py(c.max_theta()); })
      .def("spreading_map", &DDCoupler::spreading_map)
      .def("E_sandwich_holds", &DDCoupler::E_sandwich_holds)
      .def("theta_tilde_sandwich_holds", &DDCoupler::theta_tilde_sandwich_holds)
      .def("source_member", &DDCoupler::source_member)
      .def("mu_tilde",
           [](const DDCoupler& c, const DeltaElement& x) {
             return to_py(c.mu_tilde(x));
           })
      .def("extract_EP",
           [](const DDCoupler& c, const DeltaElement& x) {
             auto [E, P] = c.extract_EP(x);
             return py::make_tuple(to_py(E), P);
           })
      .def("theta_tilde",
           [](const DDCoupler& c, const DeltaElement& x) {
             return to_py(c.theta_tilde(x));
           })
      .def("triple_in_box_union",
           [](const DDCoupler& c, long t, const py::object& tt, long P) {
             return c.triple_in_box_union(t, to_mpz(tt), P);
           })
      .def("cursor_map", &DDCoupler::cursor_map)
      .def("in_cursor_image", &DDCoupler::in_cursor_image)
      .def("cursor_image_gap_free", &DDCoupler::cursor_image_gap_free)
      .def("chi", &DDCoupler::chi)
      .def("ideal_blocks", &DDCoupler::ideal_blocks)
      .def("real_blocks", &DDCoupler::real_blocks)
      .def("target_base", &DDCoupler::target_base)
      .def("enlarged_member", &DDCoupler::enlarged_member)
      .def("vartheta",
           [](const DDCoupler& c, const DeltaElement& g) {
             return to_py(c.vartheta(g));
           })
      .def("vartheta_decode",
           [](const DDCoupler& c, const py::object& z, long v) {
             return c.vartheta_decode(to_mpz(z), v);
           })
      .def("spreading",
           [](const DDCoupler& c, const py::object& z) {
             return to_py(c.spreading(to_mpz(z)));
           })
      .def("spreading_inverse",
           [](const DDCoupler& c, const py::object& y) {
             return to_py(c.spreading_inverse(to_mpz(y)));
           })
      .def("carve", &DDCoupler::carve)
      .def("carved_member", &DDCoupler::carved_member)
      .def("inject", &DDCoupler::inject)
      .def("density_radius", &DDCoupler::density_radius,
           py::arg("budget") = 2000000)
      .def("distance_audit", &DDCoupler::distance_audit, py::arg("s"),
           py::arg("budget") = 2000000)
      .def("integrability_sum", &DDCoupler::integrability_sum, py::arg("R"),
           py::arg("budget") = 2000000);
}
