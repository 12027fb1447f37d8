#pragma once

// Command layer behind the eqlevi tool.  Every command returns a canonical
// JSON report and an exit code; errors surface as exceptions and are mapped
// to exit codes by exit_code_for().

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "eqlevi/io/json.hpp"
#include "eqlevi/quotients/quotients.hpp"

namespace eqlevi::cli {

using io::json;

enum Exit : int { Ok = 0, Negative = 1, BadInput = 2, Breach = 3 };

struct Result {
  json report;
  int exit = Ok;
};

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const InvalidInput*>(&e)) return BadInput;
  if (dynamic_cast<const EnlargeConductor*>(&e)) return BadInput;
  if (dynamic_cast<const json::exception*>(&e)) return BadInput;
  return Breach;
}

namespace detail {

inline json split_json(const SplitBundle& s) {
  return {{"type", io::type_json(s.type)},
          {"left", io::poly_matrix_json(s.left)},
          {"left_inv", io::poly_matrix_json(s.left_inv)},
          {"right", io::poly_matrix_json(s.right)},
          {"right_inv", io::poly_matrix_json(s.right_inv)},
          {"variables", {{"left", "w"}, {"right", "z"}}}};
}

/// The witness as recorded in a report; nothing is recomputed.
inline SplitBundle split_from(const json& j, const BundleDesc& b) {
  SplitBundle s;
  s.type = SplitType{j.at("type").get<std::vector<int>>()};
  s.left = io::poly_matrix_from(j.at("left"));
  s.left_inv = io::poly_matrix_from(j.at("left_inv"));
  s.right = io::poly_matrix_from(j.at("right"));
  s.right_inv = io::poly_matrix_from(j.at("right_inv"));
  s.original = b;
  return s;
}

inline SplitBundle checked_split(const BundleDesc& b) {
  SplitBundle s = birkhoff_split(b);
  if (!s.verify_witness()) throw InvariantBreach("splitting witness fails re-multiplication");
  return s;
}

inline GammaAction checked_action(const SplitBundle& s, const GammaStructure& g) {
  GammaAction a(s, g);
  if (!a.report().ok()) {
    std::string msg = "action failed validation:";
    for (const auto& f : a.report().failures) msg += " " + f + ";";
    throw InvalidInput(msg);
  }
  return a;
}

inline json partition_json(const std::vector<std::size_t>& p) { return p; }

inline json decomposition_json(const Decomposition& d) {
  json summands = json::array();
  for (std::size_t i = 0; i < d.size(); ++i)
    summands.push_back({{"label", d.labels[i]},
                        {"rank", d.ranks[i]},
                        {"type", io::type_json(d.summand_types[i])},
                        {"idempotent", io::poly_matrix_json(d.idempotents[i])}});
  return {{"partition", partition_json(d.partition())},
          {"summands", summands},
          {"gamma_fixed", d.gamma_fixed},
          {"conditional", d.conditional()},
          {"unsplit", d.unsplit}};
}

inline std::vector<GlobalEndo> idempotents_from(const json& dec) {
  std::vector<GlobalEndo> es;
  for (const auto& s : dec.at("summands")) es.push_back(io::poly_matrix_from(s.at("idempotent")));
  return es;
}

inline json header(const std::string& command, const io::Instance& x) {
  return {{"command", command}, {"instance", io::instance_json(x)}, {"seed", x.options.seed}};
}

inline bool no_proper_reduction(const Decomposition& d) {
  return d.size() == 1 && d.ranks.front() >= 2 && !d.conditional();
}

inline std::vector<std::pair<std::size_t, std::vector<int>>> type_multiset(const Decomposition& d) {
  std::vector<std::pair<std::size_t, std::vector<int>>> m;
  for (std::size_t i = 0; i < d.size(); ++i) m.emplace_back(d.ranks[i], d.summand_types[i].exponents);
  std::sort(m.begin(), m.end());
  return m;
}

}  // namespace detail

inline Result cmd_split(const io::Instance& x) {
  const SplitBundle s = detail::checked_split(x.bundle);
  const SplitType oracle = split_type_via_sections(x.bundle);
  if (oracle != s.type) throw InvariantBreach("splitting type disagrees with the section count oracle");
  json r = detail::header("split", x);
  r["type"] = io::type_json(s.type);
  r["rank"] = s.rank();
  r["degree"] = s.type.degree();
  r["witness"] = detail::split_json(s);
  r["oracle_type"] = io::type_json(oracle);
  r["verified"] = true;
  return {r, Ok};
}

/// Automorphism data: End(E), its unipotent radical and Levi quotient, and
/// the Gamma-fixed subalgebra.
inline Result cmd_aut(const io::Instance& x) {
  const SplitBundle s = detail::checked_split(x.bundle);
  const EndAlgebra a = end_algebra(s);
  const LeviQuotientData l = levi_quotient(a);
  const GammaAction act = detail::checked_action(s, x.gamma_or_trivial());
  const auto fixed = act.fixed_subalgebra(a);
  json r = detail::header("aut", x);
  r["type"] = io::type_json(s.type);
  r["witness"] = detail::split_json(s);
  r["end_dim"] = a.dim();
  r["levi_quotient"] = {{"group", l.group()},
                        {"degrees", l.degrees},
                        {"multiplicities", l.multiplicities},
                        {"quotient_dim", l.quotient_dim()},
                        {"radical_dim", l.radical_basis.size()}};
  json fb = json::array();
  for (const auto& f : fixed) fb.push_back(io::poly_matrix_json(f));
  r["fixed_dim"] = fixed.size();
  r["fixed_basis"] = fb;
  return {r, Ok};
}

inline Result cmd_reduce(const io::Instance& x) {
  const SplitBundle s = detail::checked_split(x.bundle);
  const LeviEngine le(detail::checked_action(s, x.gamma_or_trivial()), x.options.levi());
  const Decomposition d = le.maximal_torus_decomposition(x.options.seed);
  const EquivarianceCertificate eq = le.check_equivariant(d);
  if (!eq.equivariant) throw InvariantBreach("maximal torus decomposition is not equivariant");

  json r = detail::header("reduce", x);
  r["type"] = io::type_json(s.type);
  r["witness"] = detail::split_json(s);
  r["decomposition"] = detail::decomposition_json(d);

  json certs;
  certs["equivariance"] = {{"equivariant", eq.equivariant},
                           {"moved", eq.moved},
                           {"section_route", eq.section_route},
                           {"twist", eq.twist},
                           {"sections", eq.sections}};
  json ind = json::array();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto c = le.indecomposable_certificate(d, i);
    if (!c.certified && !c.conditional) throw InvariantBreach("summand " + d.labels[i] + " is not certified indecomposable");
    ind.push_back({{"label", d.labels[i]},
                   {"corner_dim", c.corner_dim},
                   {"radical_dim", c.radical_dim},
                   {"quotient_dim", c.quotient_dim()},
                   {"certified", c.certified},
                   {"conditional", c.conditional}});
  }
  certs["indecomposable"] = ind;
  const LeviClass lc = le.canonical_levi(d);
  certs["levi"] = {{"group", lc.group()},
                   {"partition", lc.partition},
                   {"base_point", io::point_json(base_point())},
                   {"base_point_frame", io::scalar_matrix_json(lc.base_point_frame)}};
  const TorusCertificate tc = le.torus_certificate(d);
  if (!tc.injective) throw InvariantBreach("evaluation map is not injective on the torus");
  json pts = json::array();
  for (const auto& p : tc.points) pts.push_back(io::point_json(p));
  certs["torus"] = {{"injective", tc.injective}, {"points", pts}};
  json cps = json::array();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto c = char_poly(s.type, d.idempotents[i], x.options.sample_points);
    cps.push_back({{"label", d.labels[i]}, {"charpoly", io::poly_json(c.charpoly)}, {"constant", c.constant}});
  }
  certs["charpoly"] = cps;
  r["certificates"] = certs;
  const bool negative = detail::no_proper_reduction(d);
  r["verdict"] = negative ? "no-proper-reduction" : d.conditional() ? "conditional" : "reduced";
  return {r, negative ? Negative : Ok};
}

/// Intertwiner between two reductions of the same instance, given as reduce
/// reports (or any object with a "decomposition" member).
inline Result cmd_compare(const io::Instance& x, const json& a, const json& b) {
  const auto same_bundle = [&](const json& rep) {
    if (!rep.contains("instance")) return true;
    return io::laurent_matrix_from(rep.at("instance").at("transition")) == x.bundle.transition();
  };
  if (!same_bundle(a) || !same_bundle(b)) throw InvalidInput("reductions belong to a different bundle");
  const SplitBundle s = detail::checked_split(x.bundle);
  const LeviEngine le(detail::checked_action(s, x.gamma_or_trivial()), x.options.levi());
  const auto es_a = detail::idempotents_from(a.at("decomposition"));
  const auto es_b = detail::idempotents_from(b.at("decomposition"));
  for (const auto* es : {&es_a, &es_b})
    for (const auto& e : *es)
      if (e.rows() != s.rank() || e.cols() != s.rank()) throw InvalidInput("idempotent shape does not match the bundle");
  const Decomposition da = le.decomposition(es_a), db = le.decomposition(es_b);
  if (!da.gamma_fixed || !db.gamma_fixed) throw InvalidInput("a reduction is not Gamma-equivariant");

  json r = detail::header("compare", x);
  r["witness"] = detail::split_json(s);
  r["first"] = detail::decomposition_json(da);
  r["second"] = detail::decomposition_json(db);
  const bool equal_types = detail::type_multiset(da) == detail::type_multiset(db);
  r["types_equal"] = equal_types;
  if (!equal_types) {
    r["verified"] = false;
    return {r, Negative};
  }
  const Intertwiner t = le.intertwiner(da, db, x.options.seed);
  r["tau"] = io::poly_matrix_json(t.tau);
  r["tau_inv"] = io::poly_matrix_json(t.tau_inv);
  r["match"] = t.match;
  r["verified"] = true;
  return {r, Ok};
}

inline Result cmd_quotient(const io::Instance& x) {
  const SplitBundle s = detail::checked_split(x.bundle);
  const GammaAction act = detail::checked_action(s, x.gamma_or_trivial());
  const LeviQuotientData l = levi_quotient(end_algebra(s));
  const ActionClassification c = classify_action_on_levi_quotient(l, act);

  const LeviEngine eq_engine(act, x.options.levi());
  const auto eq_part = eq_engine.maximal_torus_decomposition(x.options.seed).partition();
  const LeviEngine triv(detail::checked_action(s, GammaStructure::trivial(s.rank())), x.options.levi());
  const auto hat_part = triv.maximal_torus_decomposition(x.options.seed).partition();
  if (!partition_refines(hat_part, eq_part)) throw InvariantBreach("non-equivariant Levi does not refine the equivariant one");
  const bool reaches = eq_part == hat_part;
  const bool forward = !act.gamma().one_parameter() || !reaches || c.verdict == Verdict::Trivial ||
                       c.verdict == Verdict::TorusFactoring;
  if (!forward) throw InvariantBreach("equivariant reduction reaches the non-equivariant Levi with a non-torus action");

  json r = detail::header("quotient", x);
  r["type"] = io::type_json(s.type);
  r["witness"] = detail::split_json(s);
  r["levi_quotient"] = {{"group", l.group()},
                        {"degrees", l.degrees},
                        {"multiplicities", l.multiplicities},
                        {"quotient_dim", l.quotient_dim()},
                        {"radical_dim", l.radical_basis.size()}};
  json cl;
  cl["verdict"] = to_string(c.verdict);
  cl["note"] = c.note;
  cl["corollary_applies"] = c.corollary_applies;
  if (c.verdict != Verdict::HypothesisNotMet) {
    cl["induced"] = io::scalar_matrix_json(c.induced);
    json w = json::array();
    for (const auto& [wt, m] : c.weights) w.push_back({wt, m});
    cl["weights"] = w;
    if (c.witness) {
      cl["witness"] = io::poly_matrix_json(*c.witness);
      cl["witness_image"] = io::poly_matrix_json(*c.witness_image);
    }
  }
  r["classification"] = cl;
  r["equivariant_partition"] = eq_part;
  r["hat_h0_partition"] = hat_part;
  r["reaches_hat_h0"] = reaches;
  r["forward_consistent"] = forward;
  r["exploratory"] = x.exploratory();
  return {r, c.verdict == Verdict::NontrivialNonTorus ? Negative : Ok};
}

// ---------------------------------------------------------------------------
// Replay of emitted certificates with exact arithmetic only.  The randomized
// searches (torus search, intertwiner search) are never rerun.

namespace detail {

class Checks {
 public:
  void add(const std::string& name, bool ok) {
    list_.push_back({{"name", name}, {"ok", ok}});
    ok_ = ok_ && ok;
  }
  bool ok() const { return ok_; }
  json list() const { return list_; }

 private:
  json list_ = json::array();
  bool ok_ = true;
};

inline void check_witness(Checks& ck, const SplitBundle& s) {
  ck.add("witness identity", s.verify_witness());
  ck.add("type is descending", std::is_sorted(s.type.exponents.begin(), s.type.exponents.end(), std::greater<>()));
}

inline void verify_reduce(Checks& ck, const io::Instance& x, const json& rep) {
  const SplitBundle s = split_from(rep.at("witness"), x.bundle);
  check_witness(ck, s);
  if (!ck.ok()) return;
  const GammaAction act(s, x.gamma_or_trivial());
  ck.add("action validates", act.report().ok());
  if (!ck.ok()) return;
  const json& dj = rep.at("decomposition");
  const auto es = idempotents_from(dj);
  const std::size_t n = s.rank();
  bool shapes = true;
  for (const auto& e : es) shapes = shapes && e.rows() == n && e.cols() == n && degree_bounds_hold(s.type, e);
  ck.add("idempotents are global endomorphisms", shapes);
  if (!shapes) return;
  ck.add("complete orthogonal idempotents", is_complete_orthogonal(es, n));
  if (!ck.ok()) return;

  const Decomposition d = make_decomposition(s, es);
  bool same = d.size() == dj.at("summands").size();
  for (std::size_t i = 0; same && i < d.size(); ++i) {
    const json& sj = dj.at("summands")[i];
    same = d.ranks[i] == sj.at("rank").get<std::size_t>() &&
           d.summand_types[i].exponents == sj.at("type").get<std::vector<int>>();
  }
  ck.add("summand ranks and types", same);
  ck.add("partition", json(d.partition()) == dj.at("partition"));

  bool fixed = true;
  for (const auto& e : es) fixed = fixed && act.fixes(e);
  ck.add("idempotents are Gamma-fixed", fixed == dj.at("gamma_fixed").get<bool>() && fixed);

  const json& cj = rep.at("certificates");
  const LeviEngine le(act, x.options.levi());
  bool ind = true;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto c = le.indecomposable_certificate(d, i);
    const json& ij = cj.at("indecomposable").at(i);
    ind = ind && c.corner_dim == ij.at("corner_dim").get<std::size_t>() &&
          c.radical_dim == ij.at("radical_dim").get<std::size_t>() && c.certified == ij.at("certified").get<bool>();
  }
  ck.add("corner radical dimensions", ind);

  const ScalarMatrix frame = io::scalar_matrix_from(cj.at("levi").at("base_point_frame"));
  const auto frame_inv = linalg::inverse(frame);
  bool frame_ok = frame_inv.has_value();
  std::size_t start = 0;
  for (std::size_t k = 0; frame_ok && k < d.size(); ++k) {
    const ScalarMatrix blk = *frame_inv * evaluate_at(s.type, es[k], base_point()) * frame;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        frame_ok = frame_ok && blk(r, c) == Scalar(r == c && r >= start && r < start + d.ranks[k] ? 1 : 0);
    start += d.ranks[k];
  }
  ck.add("base point frame diagonalizes the torus", frame_ok);

  bool inj = true;
  for (const auto& pj : cj.at("torus").at("points")) {
    const Point p = io::point_from(pj);
    for (std::size_t k = 0; k < d.size(); ++k) inj = inj && linalg::rank(evaluate_at(s.type, es[k], p)) == d.ranks[k];
  }
  ck.add("evaluation injective on the torus", inj);

  bool cp = true;
  for (std::size_t k = 0; k < d.size(); ++k) {
    const Poly claimed = io::poly_from(cj.at("charpoly").at(k).at("charpoly"));
    for (const auto& p : x.options.sample_points) cp = cp && linalg::charpoly(evaluate_at(s.type, es[k], p)) == claimed;
    cp = cp && linalg::charpoly(evaluate_at(s.type, es[k], base_point())) == claimed;
  }
  ck.add("characteristic polynomials constant", cp);
}

inline void verify_compare(Checks& ck, const io::Instance& x, const json& rep) {
  const SplitBundle s = split_from(rep.at("witness"), x.bundle);
  check_witness(ck, s);
  if (!ck.ok() || !rep.value("types_equal", false)) {
    ck.add("types equal", rep.value("types_equal", false));
    return;
  }
  const GammaAction act(s, x.gamma_or_trivial());
  ck.add("action validates", act.report().ok());
  const auto e1 = idempotents_from(rep.at("first")), e2 = idempotents_from(rep.at("second"));
  const GlobalEndo tau = io::poly_matrix_from(rep.at("tau")), tau_inv = io::poly_matrix_from(rep.at("tau_inv"));
  const auto match = rep.at("match").get<std::vector<std::size_t>>();
  const std::size_t n = s.rank();
  ck.add("tau is a global endomorphism", degree_bounds_hold(s.type, tau) && degree_bounds_hold(s.type, tau_inv));
  ck.add("tau is a unit", tau * tau_inv == PolyMatrix::identity(n) && tau_inv * tau == PolyMatrix::identity(n));
  ck.add("tau is Gamma-fixed", act.fixes(tau));
  bool conj = match.size() == e1.size() && e1.size() == e2.size();
  std::vector<bool> hit(e2.size(), false);
  for (std::size_t i = 0; conj && i < e1.size(); ++i) {
    conj = match[i] < e2.size() && !hit[match[i]] && tau * e1[i] * tau_inv == e2[match[i]];
    if (conj) hit[match[i]] = true;
  }
  ck.add("tau conjugates the idempotents along the matching", conj);
}

inline void verify_quotient(Checks& ck, const io::Instance& x, const json& rep) {
  const SplitBundle s = split_from(rep.at("witness"), x.bundle);
  check_witness(ck, s);
  if (!ck.ok()) return;
  const GammaAction act(s, x.gamma_or_trivial());
  ck.add("action validates", act.report().ok());
  if (!ck.ok()) return;
  const LeviQuotientData l = levi_quotient(end_algebra(s));
  const json& cl = rep.at("classification");
  const std::string verdict = cl.at("verdict");
  if (!act.gamma().one_parameter()) {
    ck.add("finite group gives hypothesis-not-met", verdict == to_string(Verdict::HypothesisNotMet));
    return;
  }
  const auto basis = l.quotient_basis();
  ScalarMatrix induced(basis.size(), basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const auto v = l.quotient_coordinates(l.psi(act.derivation(basis[k])));
    for (std::size_t r = 0; r < basis.size(); ++r) induced(r, k) = v[r];
  }
  ck.add("induced derivation", induced == io::scalar_matrix_from(cl.at("induced")));
  const bool zero = induced == ScalarMatrix(basis.size(), basis.size());
  if (cl.contains("witness")) {
    const GlobalEndo w = io::poly_matrix_from(cl.at("witness"));
    const GlobalEndo img = l.psi(act.derivation(w));
    ck.add("witness is moved", !img.is_zero() && img == io::poly_matrix_from(cl.at("witness_image")));
  } else {
    ck.add("no witness only for a trivial action", zero);
  }
  if (act.gamma().kind == GammaKind::Mult) {
    Poly prod(1);
    for (const auto& w : cl.at("weights")) {
      const Poly f(std::vector<Scalar>{Scalar(-w.at(0).get<long>()), Scalar(1)});
      prod = prod * f.pow(w.at(1).get<int>());
    }
    ck.add("weights are the eigenvalues", prod == linalg::charpoly(induced));
    ck.add("verdict", verdict == to_string(Verdict::TorusFactoring));
  } else {
    ck.add("verdict", verdict == to_string(zero ? Verdict::Trivial : Verdict::NontrivialNonTorus));
  }
  ck.add("partition refinement",
         partition_refines(rep.at("hat_h0_partition").get<std::vector<std::size_t>>(),
                           rep.at("equivariant_partition").get<std::vector<std::size_t>>()));
}

}  // namespace detail

inline Result cmd_verify(const json& rep) {
  if (!rep.is_object() || !rep.contains("command") || !rep.contains("instance"))
    throw InvalidInput("not a report: missing command or instance");
  const std::string what = rep.at("command");
  const io::Instance x = io::instance_from(rep.at("instance"));
  detail::Checks ck;
  if (what == "split" || what == "aut") {
    detail::check_witness(ck, detail::split_from(rep.at("witness"), x.bundle));
  } else if (what == "reduce") {
    detail::verify_reduce(ck, x, rep);
  } else if (what == "compare") {
    detail::verify_compare(ck, x, rep);
  } else if (what == "quotient") {
    detail::verify_quotient(ck, x, rep);
  } else {
    throw InvalidInput("cannot verify a '" + what + "' report");
  }
  json r{{"command", "verify"}, {"of", what}, {"checks", ck.list()}, {"ok", ck.ok()}};
  return {r, ck.ok() ? Ok : Negative};
}

// ---------------------------------------------------------------------------
// Corpus runs.  Each instance is processed sequentially; instances run on a
// pool of worker threads and results are reported in file-name order.

struct CorpusEntry {
  std::string file;
  json summary;
  bool matched = true;
};

/// Per-instance option overrides applied by the caller (CLI flags).
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> conductor_max, coeff_bound;

  void apply(io::Instance& x) const {
    if (seed) x.options.seed = *seed;
    if (conductor_max) x.options.conductor_max = *conductor_max;
    if (coeff_bound) x.options.coeff_bound = *coeff_bound;
  }
};

/// Runs split, reduce and (for one-parameter groups) quotient on one
/// instance file and compares with its "expect" block.
inline json run_instance_summary(const json& raw, const Overrides& ov, bool& matched) {
  json s;
  json mismatch = json::array();
  const json ex = raw.is_object() && raw.contains("expect") ? raw.at("expect") : json::object();
  s["name"] = raw.is_object() ? raw.value("name", "") : "";
  try {
    io::Instance x = io::instance_from(raw);
    ov.apply(x);
    if (x.exploratory()) s["exploratory"] = true;
    const SplitBundle sb = detail::checked_split(x.bundle);
    const SplitType oracle = split_type_via_sections(x.bundle);
    s["type"] = io::type_json(sb.type);
    s["oracle_agrees"] = oracle == sb.type;
    if (oracle != sb.type) mismatch.push_back("oracle");
    if (ex.contains("type") && ex.at("type") != s["type"]) mismatch.push_back("type");

    const Result red = cmd_reduce(x);
    s["partition"] = red.report.at("decomposition").at("partition");
    s["reduce_exit"] = red.exit;
    s["conditional"] = red.report.at("decomposition").at("conditional");
    if (ex.contains("partition") && ex.at("partition") != s["partition"]) mismatch.push_back("partition");
    if (ex.contains("reduce_exit") && ex.at("reduce_exit") != red.exit) mismatch.push_back("reduce_exit");
    if (cmd_verify(red.report).exit != Ok) mismatch.push_back("reduce certificates");

    if (x.gamma && x.gamma->one_parameter()) {
      const Result q = cmd_quotient(x);
      s["verdict"] = q.report.at("classification").at("verdict");
      s["hat_h0_partition"] = q.report.at("hat_h0_partition");
      s["forward_consistent"] = q.report.at("forward_consistent");
      if (ex.contains("verdict") && ex.at("verdict") != s["verdict"]) mismatch.push_back("verdict");
      if (cmd_verify(q.report).exit != Ok) mismatch.push_back("quotient certificates");
    }
    if (ex.contains("exit") && ex.at("exit") != 0) mismatch.push_back("exit");
  } catch (const std::exception& e) {
    const int code = exit_code_for(e);
    s["error"] = e.what();
    s["exit"] = code;
    if (!ex.contains("exit") || ex.at("exit") != code) mismatch.push_back("exit");
  }
  s["mismatches"] = mismatch;
  matched = mismatch.empty();
  return s;
}

inline std::vector<std::filesystem::path> corpus_files(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw InvalidInput("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw InvalidInput("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}


inline Result cmd_corpus_run(const std::filesystem::path& dir, unsigned jobs = 0, const Overrides& ov = {}) {
  const auto files = corpus_files(dir);
  std::vector<CorpusEntry> out(files.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < files.size();) {
      CorpusEntry& e = out[k];
      e.file = files[k].filename().string();
      try {
        e.summary = run_instance_summary(json::parse(read_file(files[k])), ov, e.matched);
      } catch (const std::exception& ex) {
        e.summary = {{"error", ex.what()}, {"exit", exit_code_for(ex)}, {"mismatches", {"parse"}}};
        e.matched = false;
      }
    }
  };
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(files.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  json list = json::array();
  std::size_t passed = 0;
  for (const auto& e : out) {
    json s = e.summary;
    s["file"] = e.file;
    s["matched"] = e.matched;
    list.push_back(std::move(s));
    passed += e.matched;
  }
  json r{{"command", "corpus run"}, {"instances", list}, {"passed", passed}, {"failed", out.size() - passed}};
  return {r, passed == out.size() ? Ok : Negative};
}

}  // namespace eqlevi::cli
