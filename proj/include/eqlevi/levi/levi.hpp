#pragma once

// Equivariant reductions to block Levi subgroups, represented as complete
// orthogonal systems of global idempotents.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "eqlevi/bundle/image.hpp"
#include "eqlevi/endalgebra/endalgebra.hpp"
#include "eqlevi/equivariant/gamma.hpp"

namespace eqlevi {

struct Decomposition {
  std::vector<GlobalEndo> idempotents;
  std::vector<SplitType> summand_types;
  std::vector<std::size_t> ranks;
  std::vector<std::string> labels;
  bool gamma_fixed = false;
  // Factors the search could not split within the conductor bound; when
  // nonempty the minimality certificates are conditional.
  std::vector<std::string> unsplit;

  std::size_t size() const { return idempotents.size(); }
  bool conditional() const { return !unsplit.empty(); }
  std::vector<std::size_t> partition() const {
    std::vector<std::size_t> p = ranks;
    std::sort(p.begin(), p.end(), std::greater<>());
    return p;
  }
};

struct LeviOptions {
  int coeff_bound = 5;
  int attempts = 24;
  RootSearchBudget budget;
};

struct EquivarianceCertificate {
  bool equivariant = false;
  std::vector<std::string> moved;  // "U1 by s"
  bool section_route = false;      // verdict of the section-level check
  int twist = 0;
  std::size_t sections = 0;
};

struct IndecomposableCertificate {
  std::size_t index = 0;
  std::size_t corner_dim = 0;
  std::size_t radical_dim = 0;
  std::size_t quotient_dim() const { return corner_dim - radical_dim; }
  bool certified = false;
  bool conditional = false;
};

struct LeviClass {
  std::vector<std::size_t> partition;  // descending
  ScalarMatrix base_point_frame;       // columns: bases of the summand fibers at the base point

  std::string group() const {
    std::string s;
    for (std::size_t k = 0; k < partition.size(); ++k)
      s += (k ? " x GL(" : "GL(") + std::to_string(partition[k]) + ")";
    return s.empty() ? "GL(0)" : s;
  }
};

struct Intertwiner {
  GlobalEndo tau, tau_inv;
  std::vector<std::size_t> match;  // summand i of the first goes to match[i] of the second
};

struct TorusCertificate {
  bool injective = false;
  std::vector<Point> points;
};

inline std::size_t idempotent_rank(const SplitType& t, const GlobalEndo& e) {
  return linalg::rank(evaluate_at(t, e, base_point()));
}

/// Inverse of a unit through Cayley-Hamilton with its constant
/// characteristic polynomial.
inline GlobalEndo algebra_inverse(const SplitType& t, const GlobalEndo& g) {
  const std::size_t n = t.rank();
  const Poly p = char_poly(t, g).charpoly;
  const Scalar c0 = p.coeffs().empty() ? Scalar(0) : p.coeffs()[0];
  if (c0.is_zero()) throw InvalidInput("endomorphism is not a unit");
  GlobalEndo acc(n, n), pw = PolyMatrix::identity(n);
  for (std::size_t k = 1; k < p.coeffs().size(); ++k) {
    acc += Poly(p.coeffs()[k]) * pw;
    pw = pw * g;
  }
  GlobalEndo inv = Poly(-c0.inverse()) * acc;
  if (g * inv != PolyMatrix::identity(n)) throw InvariantBreach("Cayley-Hamilton inverse failed");
  return inv;
}

/// Validates an idempotent system and computes ranks and summand types;
/// summands are ordered by (rank, type) keeping the input order on ties.
inline Decomposition make_decomposition(const SplitBundle& s, const std::vector<GlobalEndo>& es) {
  const std::size_t n = s.rank();
  for (const auto& e : es)
    if (e.rows() != n || e.cols() != n || !degree_bounds_hold(s.type, e))
      throw InvalidInput("invalid decomposition: idempotent is not a global endomorphism");
  if (!is_complete_orthogonal(es, n)) throw InvalidInput("invalid decomposition: not a complete orthogonal system");
  struct Row {
    GlobalEndo e;
    std::size_t rank;
    SplitType type;
  };
  std::vector<Row> rows;
  for (const auto& e : es) {
    if (e.is_zero()) throw InvalidInput("invalid decomposition: zero idempotent");
    rows.push_back({e, idempotent_rank(s.type, e), subbundle_from_idempotent(s, e).type});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
    if (x.rank != y.rank) return x.rank < y.rank;
    return x.type.exponents > y.type.exponents;
  });
  Decomposition d;
  std::vector<int> all;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    d.idempotents.push_back(rows[k].e);
    d.ranks.push_back(rows[k].rank);
    d.summand_types.push_back(rows[k].type);
    d.labels.push_back("U" + std::to_string(k));
    all.insert(all.end(), rows[k].type.exponents.begin(), rows[k].type.exponents.end());
  }
  std::sort(all.begin(), all.end(), std::greater<>());
  if (all != s.type.exponents) throw InvariantBreach("summand types do not add up to the splitting type");
  return d;
}

namespace detail {

inline std::vector<Poly> apply(const PolyMatrix& m, const std::vector<Poly>& v) {
  std::vector<Poly> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i] += m(i, j) * v[j];
  return out;
}

/// Splits the idempotent pi using the primary decomposition of the
/// characteristic polynomial of x in the corner of pi.
inline std::optional<std::vector<GlobalEndo>> split_by_element(const SplitType& t, const GlobalEndo& pi,
                                                              const GlobalEndo& x, const RootSearchBudget& budget,
                                                              std::vector<std::string>* unsplit) {
  const Poly p = linalg::charpoly(evaluate_at(t, x, base_point()));
  const auto pf = primary_factors(p, budget);
  if (unsplit) {
    unsplit->clear();
    for (const auto& f : pf)
      if (!f.linear()) unsplit->push_back(f.factor.to_string());
  }
  if (pf.size() < 2) return std::nullopt;
  std::vector<Poly> fs;
  for (const auto& f : pf) fs.push_back(f.factor.pow(f.multiplicity));
  std::vector<GlobalEndo> parts;
  for (const auto& h : crt_idempotent_polys(fs)) {
    GlobalEndo e = pi * eval_poly(h, x);
    if (!e.is_zero()) parts.push_back(std::move(e));
  }
  if (parts.size() < 2) return std::nullopt;
  return parts;
}

}  // namespace detail

/// Levi computations for one bundle with one validated action.
class LeviEngine {
 public:
  explicit LeviEngine(GammaAction action, LeviOptions opt = {})
      : action_(std::move(action)), alg_(action_.split()), opt_(opt) {
    if (!action_.report().ok()) throw InvalidInput("action failed validation: " + action_.report().failures.front());
    fixed_ = action_.fixed_subalgebra(alg_);
  }

  const GammaAction& action() const { return action_; }
  const EndAlgebra& algebra() const { return alg_; }
  const SplitBundle& split() const { return action_.split(); }
  const SplitType& type() const { return alg_.type(); }
  const std::vector<GlobalEndo>& fixed() const { return fixed_; }
  const LeviOptions& options() const { return opt_; }

  Decomposition decomposition(const std::vector<GlobalEndo>& es) const {
    Decomposition d = make_decomposition(split(), es);
    d.gamma_fixed = check_equivariant(d).equivariant;
    return d;
  }

  /// Fixedness of every idempotent, cross-checked on sections of E(t) with
  /// t = -min a: a global endomorphism is fixed iff it commutes with the
  /// action on those sections, which span the generic fiber.
  EquivarianceCertificate check_equivariant(const Decomposition& d) const {
    const std::size_t n = split().rank();
    if (!is_complete_orthogonal(d.idempotents, n)) throw InvalidInput("invalid decomposition");
    EquivarianceCertificate c;
    const auto& g = action_.gamma();
    for (std::size_t i = 0; i < d.size(); ++i) {
      const std::string lab = i < d.labels.size() ? d.labels[i] : "U" + std::to_string(i);
      if (g.one_parameter()) {
        if (!action_.derivation(d.idempotents[i]).is_zero()) c.moved.push_back(lab + " by the derivation");
      } else {
        for (std::size_t k = 0; k < g.order(); ++k)
          if (action_.act(k, d.idempotents[i]) != d.idempotents[i]) c.moved.push_back(lab + " by " + g.elements[k].label);
      }
    }
    c.equivariant = c.moved.empty();

    c.twist = n == 0 ? 0 : -type().exponents.back();
    const auto secs = section_space(split().original, c.twist);
    c.sections = secs.size();
    c.section_route = true;
    const PolyMatrix rit = split().right_inv.transpose(), rt = split().right.transpose();
    for (const auto& e : d.idempotents) {
      const PolyMatrix e0 = rit * e * rt;
      for (const auto& sec : secs) {
        const auto& v = sec.chart0;
        if (g.one_parameter()) {
          if (action_.derive_section(detail::apply(e0, v)) != detail::apply(e0, action_.derive_section(v)))
            c.section_route = false;
        } else {
          for (std::size_t k = 0; k < g.order() && c.section_route; ++k)
            if (action_.act_on_section(k, detail::apply(e0, v)) != detail::apply(e0, action_.act_on_section(k, v)))
              c.section_route = false;
        }
        if (!c.section_route) break;
      }
    }
    if (c.section_route != c.equivariant) throw InvariantBreach("equivariance routes disagree");
    return c;
  }

  Decomposition reduction_from_generator(const GlobalEndo& s) const {
    if (!alg_.contains(s)) throw InvalidInput("generator violates degree bounds");
    if (!action_.fixes(s)) throw InvalidInput("generator is not fixed by the group");
    const auto [ss, sn] = jordan_chevalley(type(), s, opt_.budget);
    return decomposition(spectral_idempotents(type(), ss, opt_.budget).idempotents);
  }

  /// Basis of the corner e A^Gamma f.
  std::vector<GlobalEndo> corner(const GlobalEndo& e, const GlobalEndo& f) const {
    std::vector<GlobalEndo> xs;
    for (const auto& b : fixed_) xs.push_back(e * b * f);
    return alg_.span_basis(xs);
  }

  /// Splits the identity into Gamma-fixed idempotents whose corners are
  /// local, so the scalars on the summands form a maximal torus of the
  /// fixed unit group.
  Decomposition maximal_torus_decomposition(std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::deque<GlobalEndo> work{alg_.identity()};
    std::vector<GlobalEndo> done;
    std::vector<std::string> unsplit;
    while (!work.empty()) {
      const GlobalEndo pi = work.front();
      work.pop_front();
      const auto c = corner(pi, pi);
      if (radical(alg_, c).quotient_dim() <= 1) {
        done.push_back(pi);
        continue;
      }
      std::vector<std::string> left;
      auto parts = split_corner(pi, c, rng, left);
      if (parts) {
        for (auto& p : *parts) work.push_back(std::move(p));
      } else {
        done.push_back(pi);
        if (left.empty()) left.push_back("corner of rank " + std::to_string(idempotent_rank(type(), pi)) + " not split");
        unsplit.insert(unsplit.end(), left.begin(), left.end());
      }
    }
    Decomposition d = decomposition(done);
    d.unsplit = unsplit;
    if (!d.gamma_fixed) throw InvariantBreach("maximal torus decomposition is not fixed");
    return d;
  }

  IndecomposableCertificate indecomposable_certificate(const Decomposition& d, std::size_t i) const {
    IndecomposableCertificate c;
    c.index = i;
    const auto cb = corner(d.idempotents.at(i), d.idempotents.at(i));
    const auto r = radical(alg_, cb);
    c.corner_dim = cb.size();
    c.radical_dim = r.basis.size();
    c.certified = c.quotient_dim() == 1;
    c.conditional = d.conditional();
    return c;
  }

  LeviClass canonical_levi(const Decomposition& d) const {
    LeviClass lc;
    lc.partition = d.partition();
    const std::size_t n = split().rank();
    lc.base_point_frame = ScalarMatrix(n, n);
    std::vector<ScalarMatrix> vals;
    std::size_t col = 0;
    for (const auto& e : d.idempotents) {
      vals.push_back(evaluate_at(type(), e, base_point()));
      for (const auto& v : linalg::column_basis(vals.back())) {
        for (std::size_t r = 0; r < n; ++r) lc.base_point_frame(r, col) = v[r];
        ++col;
      }
    }
    if (col != n) throw InvariantBreach("summand fibers do not span");
    const auto frame_inv = linalg::inverse(lc.base_point_frame);
    if (!frame_inv) throw InvariantBreach("base point frame is singular");
    const ScalarMatrix& inv = *frame_inv;
    std::size_t start = 0;
    for (std::size_t k = 0; k < vals.size(); ++k) {
      const ScalarMatrix blk = inv * vals[k] * lc.base_point_frame;
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
          const bool one = r == c && r >= start && r < start + d.ranks[k];
          if (blk(r, c) != Scalar(one ? 1 : 0)) throw InvariantBreach("base point frame does not diagonalize the torus");
        }
      start += d.ranks[k];
    }
    return lc;
  }

  TorusCertificate torus_certificate(const Decomposition& d) const {
    TorusCertificate c;
    c.points = default_sample_points();
    c.points.insert(c.points.begin(), base_point());
    c.injective = true;
    for (const auto& x : c.points)
      for (std::size_t i = 0; i < d.size(); ++i)
        if (linalg::rank(evaluate_at(type(), d.idempotents[i], x)) != d.ranks[i] || d.ranks[i] == 0) c.injective = false;
    return c;
  }

  /// Krull-Schmidt matching: for each summand of d1 an unmatched summand of
  /// d2 with mutually inverse fixed maps between their images.
  Intertwiner intertwiner(const Decomposition& d1, const Decomposition& d2, std::uint64_t seed = 0) const {
    if (d1.size() != d2.size()) throw InvariantBreach("decompositions have different lengths");
    std::mt19937_64 rng(seed);
    const std::size_t n = split().rank();
    Intertwiner out;
    out.tau = GlobalEndo(n, n);
    out.tau_inv = GlobalEndo(n, n);
    std::vector<bool> used(d2.size(), false);
    for (std::size_t i = 0; i < d1.size(); ++i) {
      bool found = false;
      for (std::size_t j = 0; j < d2.size() && !found; ++j) {
        if (used[j] || d1.ranks[i] != d2.ranks[j] || !(d1.summand_types[i] == d2.summand_types[j])) continue;
        if (auto uv = isomorphism(d1.idempotents[i], d2.idempotents[j], rng)) {
          out.tau += uv->first;
          out.tau_inv += uv->second;
          out.match.push_back(j);
          used[j] = true;
          found = true;
        }
      }
      if (!found) throw InvariantBreach("no intertwiner for summand " + d1.labels.at(i));
    }
    if (out.tau * out.tau_inv != PolyMatrix::identity(n)) throw InvariantBreach("intertwiner is not a unit");
    for (std::size_t i = 0; i < d1.size(); ++i)
      if (out.tau * d1.idempotents[i] * out.tau_inv != d2.idempotents[out.match[i]])
        throw InvariantBreach("intertwiner does not conjugate the idempotents");
    if (!action_.fixes(out.tau)) throw InvariantBreach("intertwiner is not fixed");
    return out;
  }

  Decomposition conjugate_decomposition(const GlobalEndo& g, const Decomposition& d) const {
    if (!alg_.contains(g)) throw InvalidInput("conjugating element violates degree bounds");
    const GlobalEndo gi = algebra_inverse(type(), g);
    std::vector<GlobalEndo> es;
    for (const auto& e : d.idempotents) es.push_back(g * e * gi);
    return decomposition(es);
  }

 private:
  std::optional<std::vector<GlobalEndo>> split_corner(const GlobalEndo& pi, const std::vector<GlobalEndo>& c,
                                                      std::mt19937_64& rng, std::vector<std::string>& left) const {
    // Rational splittings first; cyclotomic scalars only for corners that
    // need them.
    const SplitType& t = type();
    RootSearchBudget rational = opt_.budget;
    rational.conductor_max = 1;
    for (int a = 0; a < std::min(opt_.attempts, 4); ++a) {
      const GlobalEndo x = random_combination(alg_, c, rng, opt_.coeff_bound);
      if (auto parts = detail::split_by_element(t, pi, x, rational, &left)) return parts;
    }
    // Elements of the corner killing a fiber vector at the base point; a
    // non-nilpotent one has eigenvalue 0 and a second primary factor.
    const std::size_t n = split().rank();
    const ScalarMatrix p0 = evaluate_at(t, pi, base_point());
    std::vector<ScalarMatrix> vals;
    for (const auto& b : c) vals.push_back(evaluate_at(t, b, base_point()));
    for (const auto& v : linalg::column_basis(p0)) {
      ScalarMatrix sys(n, c.size());
      for (std::size_t k = 0; k < c.size(); ++k) {
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t j = 0; j < n; ++j) sys(r, k) += vals[k](r, j) * v[j];
      }
      std::vector<GlobalEndo> ann;
      for (const auto& coef : linalg::nullspace(sys)) {
        GlobalEndo x = alg_.zero();
        for (std::size_t k = 0; k < c.size(); ++k)
          if (!coef[k].is_zero()) x += Poly(coef[k]) * c[k];
        ann.push_back(std::move(x));
      }
      std::vector<std::string> ignore;
      for (const auto& x : ann)
        if (auto parts = detail::split_by_element(t, pi, x, opt_.budget, &ignore)) return parts;
      for (int a = 0; a < 4 && ann.size() > 1; ++a)
        if (auto parts = detail::split_by_element(t, pi, random_combination(alg_, ann, rng, opt_.coeff_bound),
                                                  opt_.budget, &ignore))
          return parts;
    }
    for (int a = 0; a < opt_.attempts; ++a) {
      const GlobalEndo x = random_combination(alg_, c, rng, opt_.coeff_bound);
      if (auto parts = detail::split_by_element(t, pi, x, opt_.budget, &left)) return parts;
    }
    return std::nullopt;
  }

  std::optional<std::pair<GlobalEndo, GlobalEndo>> isomorphism(const GlobalEndo& e, const GlobalEndo& f,
                                                               std::mt19937_64& rng) const {
    if (e == f) return std::make_pair(e, e);
    const auto hom = corner(f, e), back = corner(e, f);
    if (hom.empty() || back.empty()) return std::nullopt;
    for (int a = 0; a < opt_.attempts; ++a) {
      const GlobalEndo u = a < static_cast<int>(hom.size()) ? hom[static_cast<std::size_t>(a)]
                                                            : random_combination(alg_, hom, rng, opt_.coeff_bound);
      // Solve v u = e for v in the span of `back`.
      std::vector<GlobalEndo> prods;
      for (const auto& b : back) prods.push_back(b * u);
      const ScalarMatrix m = alg_.coordinate_matrix(prods);
      const ScalarVector rhs = alg_.coordinates(e);
      const auto sol = linalg::solve(m, rhs);
      if (!sol) continue;
      GlobalEndo v = alg_.zero();
      for (std::size_t k = 0; k < back.size(); ++k)
        if (!(*sol)[k].is_zero()) v += Poly((*sol)[k]) * back[k];
      if (v * u == e && u * v == f) return std::make_pair(u, v);
    }
    return std::nullopt;
  }

  GammaAction action_;
  EndAlgebra alg_;
  LeviOptions opt_;
  std::vector<GlobalEndo> fixed_;
};

}  // namespace eqlevi
