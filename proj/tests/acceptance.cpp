// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.  Every criterion compares the library against an oracle
// that does not share the code path under test.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sys/wait.h>

#include "eqlevi/cli/commands.hpp"
#include "support.hpp"

using namespace eqlevi;
using cli::json;
using eqlevi::testing::uniform;

namespace {

const std::string corpus_dir = EQLEVI_CORPUS_DIR;
const std::string cli_path = EQLEVI_CLI_PATH;

// Tripwire counters shared by all criteria.
struct Tripwires {
  std::size_t charpolys = 0, charpoly_failures = 0;
  std::size_t tori = 0, torus_failures = 0;
} trip;

void touch(const SplitType& t, const GlobalEndo& s) {
  ++trip.charpolys;
  try {
    if (!char_poly(t, s).constant) ++trip.charpoly_failures;
  } catch (const InvariantBreach&) {
    ++trip.charpoly_failures;
  }
}

void touch_torus(const LeviEngine& le, const Decomposition& d) {
  ++trip.tori;
  if (!le.torus_certificate(d).injective) ++trip.torus_failures;
  for (const auto& e : d.idempotents) touch(le.type(), e);
}

void touch_report(const io::Instance& x, const json& rep) {
  const SplitBundle s = cli::detail::split_from(rep.at("witness"), x.bundle);
  const LeviEngine le(GammaAction(s, x.gamma_or_trivial()), x.options.levi());
  touch_torus(le, le.decomposition(cli::detail::idempotents_from(rep.at("decomposition"))));
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int k, const std::string& title, const std::function<Outcome()>& f) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    o = f();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", k, title.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string frac(std::size_t a, std::size_t b) { return std::to_string(a) + "/" + std::to_string(b); }

io::Instance instance(const BundleDesc& b, std::optional<GammaStructure> g = std::nullopt, std::uint64_t seed = 0) {
  io::Instance x;
  x.bundle = b;
  x.gamma = std::move(g);
  x.options.seed = seed;
  return x;
}

io::Instance corpus(const std::string& name) { return io::parse_instance(cli::read_file(corpus_dir + "/" + name + ".json")); }

std::vector<io::Instance> corpus_instances() {
  std::vector<io::Instance> out;
  for (const auto& f : cli::corpus_files(corpus_dir)) {
    try {
      out.push_back(io::parse_instance(cli::read_file(f)));
    } catch (const InvalidInput&) {
    }
  }
  return out;
}

int run_cli(const std::string& args) {
  const int st = std::system((cli_path + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::vector<std::size_t> partition_of(const json& rep) {
  return rep.at("decomposition").at("partition").get<std::vector<std::size_t>>();
}

LaurentMatrix permutation(const std::vector<std::size_t>& p) {
  LaurentMatrix m(p.size(), p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m(p[i], i) = Laurent1(1);
  return m;
}

GammaStructure mult_diagonal(const std::vector<int>& w, int q) {
  GammaStructure g;
  g.kind = GammaKind::Mult;
  g.q = q;
  g.lift = Laurent2Matrix::identity(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) g.lift(i, i) = Laurent2::var(0, w[i]);
  return g;
}

// Independent fixedness oracles.  Finite groups acting trivially on the base
// with constant lifts: commutation with the lifts carried to split
// coordinates.  Multiplicative diagonal lifts diag(t^w) over t^q z on a
// diagonal bundle: the infinitesimal condition [diag(w), pi] = q z pi'.
bool fixed_by_constant_lifts(const SplitBundle& s, const GammaStructure& g, const GlobalEndo& e) {
  for (const auto& el : g.elements) {
    const PolyMatrix c = el.lift.map([](const Laurent1& l) { return to_poly(l); });
    const PolyMatrix cs = s.right.transpose() * c * s.right_inv.transpose();
    if (cs * e != e * cs) return false;
  }
  return true;
}

bool fixed_by_mult_diagonal(const std::vector<int>& w, int q, const GlobalEndo& e) {
  const std::size_t n = w.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Poly lhs = Poly(Scalar(w[i] - w[j])) * e(i, j);
      const Poly rhs = Poly::monomial(Scalar(q), 1) * e(i, j).derivative();
      if (lhs != rhs) return false;
    }
  return true;
}

// A descending type made of equal-degree blocks, so that permutations inside
// blocks act on the diagonal bundle.
std::vector<int> blocky_type(std::mt19937& rng, std::size_t n) {
  std::vector<int> a;
  int d = uniform(rng, 0, 3);
  while (a.size() < n) {
    const std::size_t m = std::min<std::size_t>(n - a.size(), static_cast<std::size_t>(uniform(rng, 2, 3)));
    for (std::size_t k = 0; k < m; ++k) a.push_back(d);
    d -= uniform(rng, 1, 2);
  }
  return a;
}

// Transpositions of neighbouring equal-degree coordinates generate the
// product of the block symmetric groups.
GammaStructure block_permutations(const std::vector<int>& a, bool full) {
  std::vector<Generator> gens;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    if (a[i] != a[i + 1]) continue;
    std::vector<std::size_t> p(a.size());
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = k;
    std::swap(p[i], p[i + 1]);
    gens.push_back({"s" + std::to_string(i), Mobius::identity(), permutation(p)});
    if (!full) break;
  }
  return generate_finite_group(gens, a.size(), 48);
}

std::vector<int> random_weights(std::mt19937& rng, std::size_t n) {
  std::vector<int> w(n);
  for (auto& x : w) x = uniform(rng, -3, 3);
  return w;
}

// ---------------------------------------------------------------------------

Outcome splitting_soundness() {
  std::mt19937 rng(1001);
  std::size_t exact = 0, witnessed = 0, fast = 0;
  double worst = 0;
  const std::size_t total = 100;
  for (std::size_t k = 0; k < total; ++k) {
    const std::size_t n = static_cast<std::size_t>(uniform(rng, 1, 4));
    const auto a = eqlevi::testing::random_type(rng, n, 4);
    const BundleDesc b = eqlevi::testing::random_bundle(rng, a, 3);
    const auto t0 = std::chrono::steady_clock::now();
    const SplitBundle s = birkhoff_split(b);
    const bool ok = s.verify_witness();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    worst = std::max(worst, secs);
    exact += s.type == make_split_type(a);
    witnessed += ok;
    fast += secs < 1.0;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "type exact %s, witness %s, under 1 s %s (worst %.3fs)", frac(exact, total).c_str(),
                frac(witnessed, total).c_str(), frac(fast, total).c_str(), worst);
  return {exact == total && witnessed == total && fast == total, buf};
}

Outcome oracle_agreement() {
  std::size_t agree = 0, total = 0;
  for (const auto& x : corpus_instances()) {
    ++total;
    agree += birkhoff_split(x.bundle).type == split_type_via_sections(x.bundle);
  }
  std::mt19937 rng(1002);
  std::size_t ragree = 0;
  for (int k = 0; k < 30; ++k) {
    const BundleDesc b = eqlevi::testing::random_bundle(rng, eqlevi::testing::random_type(rng, uniform(rng, 1, 4), 3), 2);
    ragree += birkhoff_split(b).type == split_type_via_sections(b);
  }
  return {agree == total && total > 0 && ragree == 30,
          "corpus " + frac(agree, total) + ", extra random " + frac(ragree, 30)};
}

Outcome grothendieck() {
  std::mt19937 rng(1003);
  std::size_t lines = 0, verified = 0;
  const std::size_t total = 100;
  for (std::size_t k = 0; k < total; ++k) {
    const std::size_t n = static_cast<std::size_t>(uniform(rng, 1, 4));
    const io::Instance x = instance(eqlevi::testing::random_bundle(rng, eqlevi::testing::random_type(rng, n, 3), 2),
                                    std::nullopt, k);
    const auto r = cli::cmd_reduce(x);
    lines += partition_of(r.report) == std::vector<std::size_t>(n, 1) && r.exit == cli::Ok;
    verified += cli::cmd_verify(r.report).exit == cli::Ok;
    touch_report(x, r.report);
  }
  return {lines == total && verified == total,
          "all-rank-1 partitions " + frac(lines, total) + ", certificates replayed " + frac(verified, total)};
}

Outcome kumar() {
  std::mt19937 rng(1004);
  std::size_t good = 0, certs = 0, independent = 0;
  const std::size_t total = 20;
  for (std::size_t k = 0; k < total; ++k) {
    const std::size_t n = static_cast<std::size_t>(uniform(rng, 1, 4));
    auto a = eqlevi::testing::random_type(rng, n, 3);
    std::sort(a.begin(), a.end(), std::greater<>());
    const auto w = random_weights(rng, n);
    const int q = uniform(rng, -1, 2);
    const io::Instance x = instance(BundleDesc(diag_monomials(a)), mult_diagonal(w, q), k);
    const auto r = cli::cmd_reduce(x);
    const json& dec = r.report.at("decomposition");
    good += partition_of(r.report) == std::vector<std::size_t>(n, 1) && dec.at("gamma_fixed").get<bool>();
    const json& eq = r.report.at("certificates").at("equivariance");
    certs += eq.at("equivariant").get<bool>() && eq.at("section_route").get<bool>() &&
             cli::cmd_verify(r.report).exit == cli::Ok;
    bool ind = true;
    for (const auto& e : cli::detail::idempotents_from(dec)) ind = ind && fixed_by_mult_diagonal(w, q, e);
    independent += ind;
    touch_report(x, r.report);
  }
  return {good == total && certs == total && independent == total,
          "rank-1 fixed summands " + frac(good, total) + ", equivariance certificates " + frac(certs, total) +
              ", independent fixedness " + frac(independent, total)};
}

Outcome bidirectional() {
  std::mt19937 rng(1005);
  std::mt19937_64 r64(1005);
  std::size_t pos = 0, neg = 0, pos_ok = 0, neg_ok = 0, attempts = 0;
  while ((pos < 20 || neg < 20) && attempts < 2000) {
    ++attempts;
    const bool finite = attempts % 2 == 0;
    const std::size_t n = static_cast<std::size_t>(uniform(rng, 2, 4));
    std::vector<int> a, w;
    int q = 0;
    GammaStructure g;
    if (finite) {
      a = blocky_type(rng, n);
      g = block_permutations(a, uniform(rng, 0, 1) == 1);
    } else {
      a = eqlevi::testing::random_type(rng, n, 2);
      std::sort(a.begin(), a.end(), std::greater<>());
      w = random_weights(rng, n);
      for (std::size_t i = 1; i < n; ++i)
        if (uniform(rng, 0, 1)) w[i] = w[i - 1];  // repeated weights leave room for non-fixed units
      q = uniform(rng, 0, 1);
      g = mult_diagonal(w, q);
    }
    const SplitBundle s = birkhoff_split(BundleDesc(diag_monomials(a)));
    const LeviEngine le(GammaAction(s, g));
    const auto oracle = [&](const GlobalEndo& e) {
      return finite ? fixed_by_constant_lifts(s, g, e) : fixed_by_mult_diagonal(w, q, e);
    };
    const Decomposition base = le.maximal_torus_decomposition(attempts);
    if (base.size() < 2) continue;
    const auto& alg = le.algebra();
    std::vector<GlobalEndo> all;
    for (std::size_t k = 0; k < alg.dim(); ++k) all.push_back(alg.basis_element(k));

    if (pos < 20) {
      // Conjugating by a fixed unit keeps the system fixed.
      const GlobalEndo u = random_combination(alg, le.fixed(), r64, 3);
      if (!char_poly(s.type, u).charpoly.coeff(0).is_zero()) {
        const Decomposition d = le.conjugate_decomposition(u, base);
        bool truth = true;
        for (const auto& e : d.idempotents) truth = truth && oracle(e);
        if (truth) {
          ++pos;
          pos_ok += le.check_equivariant(d).equivariant;
          touch(s.type, u);
        }
      }
    }
    if (neg < 20) {
      const GlobalEndo u = random_combination(alg, all, r64, 3);
      if (!char_poly(s.type, u).charpoly.coeff(0).is_zero() && !oracle(u)) {
        const Decomposition d = le.conjugate_decomposition(u, base);
        bool truth = true;
        for (const auto& e : d.idempotents) truth = truth && oracle(e);
        if (!truth) {
          ++neg;
          neg_ok += !le.check_equivariant(d).equivariant;
          touch(s.type, u);
        }
      }
    }
  }
  return {pos == 20 && neg == 20 && pos_ok == 20 && neg_ok == 20,
          "positives accepted " + frac(pos_ok, pos) + ", negatives rejected " + frac(neg_ok, neg) + " (" +
              std::to_string(attempts) + " draws)"};
}

Outcome uniqueness() {
  std::mt19937 rng(1006);
  std::size_t ok = 0, atiyah = 0, atiyah_ok = 0;
  const std::size_t total = 20;
  for (std::size_t k = 0; k < total; ++k) {
    io::Instance x;
    const std::size_t n = static_cast<std::size_t>(uniform(rng, 1, 3));
    if (k < 14) {
      x = instance(eqlevi::testing::random_bundle(rng, eqlevi::testing::random_type(rng, n, 2), 1));
    } else if (k < 17) {
      const auto a = blocky_type(rng, std::max<std::size_t>(n, 2));
      x = instance(BundleDesc(diag_monomials(a)), block_permutations(a, true));
    } else {
      auto a = eqlevi::testing::random_type(rng, n, 2);
      std::sort(a.begin(), a.end(), std::greater<>());
      std::vector<int> w(n, uniform(rng, -2, 2));
      x = instance(BundleDesc(diag_monomials(a)), mult_diagonal(w, uniform(rng, 0, 1)));
    }
    io::Instance y = x;
    x.options.seed = 2 * k + 1;
    y.options.seed = 2 * k + 2;
    const json ra = cli::cmd_reduce(x).report, rb = cli::cmd_reduce(y).report;
    const auto c = cli::cmd_compare(x, ra, rb);
    bool good = c.exit == cli::Ok && c.report.at("types_equal").get<bool>();
    if (good) {
      // Exact re-check of tau pi_i tau^{-1} = pi'_{match(i)} from the report data.
      const GlobalEndo tau = io::poly_matrix_from(c.report.at("tau"));
      const GlobalEndo tau_inv = io::poly_matrix_from(c.report.at("tau_inv"));
      const auto e1 = cli::detail::idempotents_from(ra.at("decomposition"));
      const auto e2 = cli::detail::idempotents_from(rb.at("decomposition"));
      const auto match = c.report.at("match").get<std::vector<std::size_t>>();
      for (std::size_t i = 0; i < e1.size(); ++i) good = good && tau * e1[i] * tau_inv == e2.at(match.at(i));
      good = good && cli::cmd_verify(c.report).exit == cli::Ok;
      const SplitBundle s = cli::detail::split_from(c.report.at("witness"), x.bundle);
      touch(s.type, tau);
      touch(s.type, tau_inv);
    }
    ok += good;
    if (!x.gamma && n <= 3) {
      ++atiyah;
      atiyah_ok += good;
    }
    touch_report(x, ra);
    touch_report(y, rb);
  }
  return {ok == total && atiyah_ok == atiyah,
          "intertwiners " + frac(ok, total) + ", trivial-group permutations " + frac(atiyah_ok, atiyah)};
}

Outcome minimality() {
  const io::Instance x = corpus("dihedral8_trivial_rank2");
  const auto r = cli::cmd_reduce(x);
  const bool part = partition_of(r.report) == std::vector<std::size_t>{2};
  const json& ind = r.report.at("certificates").at("indecomposable").at(0);
  const bool cert = ind.at("certified").get<bool>() && !ind.at("conditional").get<bool>() &&
                    ind.at("quotient_dim").get<std::size_t>() == 1;

  // Idempotents of the corner: e = c pi + n with n in the radical gives
  // c^2 = c, so c in {0, 1}; with a zero radical only 0 and pi remain.
  const SplitBundle s = birkhoff_split(x.bundle);
  const LeviEngine le(GammaAction(s, *x.gamma));
  const auto corner = le.corner(PolyMatrix::identity(2), PolyMatrix::identity(2));
  const auto rad = radical(le.algebra(), corner);
  bool only_trivial = corner.size() == 1 && rad.basis.empty();
  for (int c : {0, 1}) {
    const GlobalEndo e = Poly(Scalar(c)) * PolyMatrix::identity(2);
    only_trivial = only_trivial && (e * e == e);
  }

  // Exhaustive box: every rank-1 idempotent v w^t with w.v = 1, entries of v
  // and w in {-3..3}, is moved by the group.
  std::size_t candidates = 0, fixed = 0;
  for (int v0 = -3; v0 <= 3; ++v0)
    for (int v1 = -3; v1 <= 3; ++v1)
      for (int w0 = -3; w0 <= 3; ++w0)
        for (int w1 = -3; w1 <= 3; ++w1) {
          if (v0 * w0 + v1 * w1 != 1) continue;
          GlobalEndo e(2, 2);
          e(0, 0) = Poly(v0 * w0), e(0, 1) = Poly(v0 * w1), e(1, 0) = Poly(v1 * w0), e(1, 1) = Poly(v1 * w1);
          ++candidates;
          fixed += fixed_by_constant_lifts(s, *x.gamma, e) || le.action().fixes(e);
        }
  return {part && cert && only_trivial && fixed == 0,
          std::string("partition {2} ") + (part ? "yes" : "no") + ", certificate " + (cert ? "yes" : "no") +
              ", corner idempotents only 0 and 1 " + (only_trivial ? "yes" : "no") + ", fixed among " +
              std::to_string(candidates) + " rank-1 candidates: " + std::to_string(fixed)};
}

Outcome no_reduction_example() {
  io::Instance eq = corpus("dihedral8_trivial_rank2");
  io::Instance plain = eq;
  plain.gamma.reset();
  const auto a = cli::cmd_reduce(plain), b = cli::cmd_reduce(eq);
  const bool parts = partition_of(a.report) == std::vector<std::size_t>{1, 1} &&
                     partition_of(b.report) == std::vector<std::size_t>{2};
  const std::string tmp = (std::filesystem::temp_directory_path() / "eqlevi_plain_rank2.json").string();
  {
    std::ofstream f(tmp);
    f << io::instance_json(plain).dump(2);
  }
  const int code_plain = run_cli("reduce " + tmp);
  const int code_eq = run_cli("reduce " + corpus_dir + "/dihedral8_trivial_rank2.json");
  std::filesystem::remove(tmp);
  return {parts && a.exit == cli::Ok && b.exit == cli::Negative && code_plain == 0 && code_eq == 1,
          "non-equivariant " + json(partition_of(a.report)).dump() + " exit " + std::to_string(code_plain) +
              ", equivariant " + json(partition_of(b.report)).dump() + " exit " + std::to_string(code_eq)};
}

Outcome levi_quotient_actions() {
  const auto add = cli::cmd_quotient(corpus("additive_unipotent_rank2"));
  const json& cl = add.report.at("classification");
  const bool add_ok = cl.at("verdict") == "nontrivial-non-torus" &&
                      add.report.at("equivariant_partition") == json::array({2}) &&
                      add.report.at("hat_h0_partition") == json::array({1, 1}) &&
                      cl.at("corollary_applies").get<bool>() && cli::cmd_verify(add.report).exit == cli::Ok;

  std::size_t mult = 0, torus = 0, forward = 0;
  const auto check_mult = [&](const io::Instance& x) {
    const auto q = cli::cmd_quotient(x);
    ++mult;
    torus += q.report.at("classification").at("verdict") == "torus-factoring";
    const bool reaches = q.report.at("equivariant_partition") == q.report.at("hat_h0_partition");
    forward += q.report.at("forward_consistent").get<bool>() &&
               (!reaches || q.report.at("classification").at("verdict") == "torus-factoring");
  };
  for (const auto& x : corpus_instances())
    if (x.gamma && x.gamma->kind == GammaKind::Mult) check_mult(x);
  std::mt19937 rng(1009);
  for (std::size_t k = 0; k < 20; ++k) {
    const std::size_t n = static_cast<std::size_t>(uniform(rng, 1, 4));
    auto a = eqlevi::testing::random_type(rng, n, 3);
    std::sort(a.begin(), a.end(), std::greater<>());
    check_mult(instance(BundleDesc(diag_monomials(a)), mult_diagonal(random_weights(rng, n), uniform(rng, -1, 2)), k));
  }
  return {add_ok && torus == mult && forward == mult,
          std::string("additive unipotent nontrivial-non-torus with {2} vs {1,1}: ") + (add_ok ? "yes" : "no") +
              ", multiplicative torus-factoring " + frac(torus, mult) + ", forward consistent " + frac(forward, mult)};
}

Outcome tripwires() {
  // Also sweep every fixed-subalgebra basis element of the corpus.
  for (const auto& x : corpus_instances()) {
    const SplitBundle s = birkhoff_split(x.bundle);
    const GammaAction act(s, x.gamma_or_trivial());
    if (!act.report().ok()) continue;
    for (const auto& f : act.fixed_subalgebra(end_algebra(s))) touch(s.type, f);
  }
  return {trip.charpoly_failures == 0 && trip.torus_failures == 0 && trip.charpolys > 0 && trip.tori > 0,
          "char-poly failures " + std::to_string(trip.charpoly_failures) + " of " + std::to_string(trip.charpolys) +
              ", non-injective tori " + std::to_string(trip.torus_failures) + " of " + std::to_string(trip.tori)};
}

}  // namespace

int main() {
  report(1, "splitting soundness", splitting_soundness);
  report(2, "oracle agreement", oracle_agreement);
  report(3, "trivial group gives a maximal torus", grothendieck);
  report(4, "multiplicative diagonal lifts give fixed lines", kumar);
  report(5, "equivariance check both directions", bidirectional);
  report(6, "uniqueness up to fixed automorphisms", uniqueness);
  report(7, "minimality of the order-8 reduction", minimality);
  report(8, "no proper equivariant reduction", no_reduction_example);
  report(9, "actions on the Levi quotient", levi_quotient_actions);
  report(10, "exactness tripwires", tripwires);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
