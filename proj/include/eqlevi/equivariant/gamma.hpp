#pragma once

// Group actions on P^1 lifted to the bundle, and the induced action on
// global endomorphisms.
//
// A lift C_g(z) is given on chart 0 in the frame of the input transition;
// it maps the fiber over phi_g^{-1}(z) to the fiber over z, so sections move
// by (g.s)(z) = C_g(z) s(phi_g^{-1}(z)) and endomorphisms by
// (g.S)(z) = C_g(z) S(phi_g^{-1}(z)) C_g(z)^{-1}.  The cocycle law is
// C_gh(z) = C_g(z) C_h(phi_g^{-1}(z)).

#include <string>
#include <vector>

#include "eqlevi/bundle/bundle.hpp"
#include "eqlevi/endalgebra/endalgebra.hpp"
#include "eqlevi/errors.hpp"

namespace eqlevi {

/// Mobius map z -> (a z + b) / (c z + d), up to scale.
struct Mobius {
  Scalar a{1}, b{0}, c{0}, d{1};

  static Mobius identity() { return {}; }
  static Mobius affine(const Scalar& alpha, const Scalar& beta) { return {alpha, beta, Scalar(0), Scalar(1)}; }

  Scalar det() const { return a * d - b * c; }
  bool is_affine() const { return c.is_zero() && !d.is_zero(); }

  /// this o o.
  Mobius compose(const Mobius& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  Mobius inverse() const { return {d, -b, -c, a}; }

  friend bool operator==(const Mobius& x, const Mobius& y) {
    const Scalar xs[4] = {x.a, x.b, x.c, x.d}, ys[4] = {y.a, y.b, y.c, y.d};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (xs[i] * ys[j] != xs[j] * ys[i]) return false;
    return true;
  }
  bool is_identity() const { return *this == identity(); }

  /// For affine maps: z -> alpha z + beta as a polynomial in z.
  Poly as_poly() const {
    if (!is_affine()) throw InvalidInput("non-affine base automorphism unsupported");
    return Poly(std::vector<Scalar>{b / d, a / d});
  }
};

enum class GammaKind { Finite, Mult, Add };

inline std::string to_string(GammaKind k) {
  switch (k) {
    case GammaKind::Finite:
      return "finite";
    case GammaKind::Mult:
      return "mult";
    case GammaKind::Add:
      return "add";
  }
  return "?";
}

struct FiniteElement {
  std::string label;
  Mobius phi;
  LaurentMatrix lift;
};

using Laurent2Matrix = Matrix<Laurent2>;  // variables (t, z)
using Laurent3Matrix = Matrix<Laurent3>;  // variables (s, t, z)

struct GammaStructure {
  GammaKind kind = GammaKind::Finite;
  // Finite kind.
  std::vector<FiniteElement> elements;
  std::vector<std::vector<std::size_t>> table;  // table[g][h] = index of g h
  // One-parameter kinds: lift C_t(z); mult base phi_t(z) = t^q z, additive
  // base phi_t(z) = z + shift t.
  Laurent2Matrix lift;
  int q = 0;
  Scalar shift{0};
  std::string note;  // free-form label carried into reports

  static GammaStructure trivial(std::size_t n) {
    GammaStructure g;
    g.elements.push_back({"e", Mobius::identity(), LaurentMatrix::identity(n)});
    g.table = {{0}};
    return g;
  }

  bool one_parameter() const { return kind != GammaKind::Finite; }
  std::size_t order() const { return elements.size(); }

  std::size_t rank() const {
    return kind == GammaKind::Finite ? (elements.empty() ? 0 : elements.front().lift.rows()) : lift.rows();
  }

  std::optional<std::size_t> identity_index() const {
    for (std::size_t e = 0; e < table.size(); ++e) {
      bool ok = true;
      for (std::size_t g = 0; g < table.size() && ok; ++g) ok = table[e][g] == g && table[g][e] == g;
      if (ok) return e;
    }
    return std::nullopt;
  }
};

struct ValidationReport {
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

namespace detail {

inline Laurent2 z_to_l2(const Laurent1& l) {
  return l.transform<2>([](const Laurent1::Exponent& e, const Scalar& c) { return Laurent2::monomial(c, {0, e[0]}); });
}

inline Laurent2 poly_compose_l2(const Poly& p, const Laurent2& x) {
  Laurent2 r;
  for (std::size_t k = p.coeffs().size(); k-- > 0;) r = r * x + Laurent2(p.coeffs()[k]);
  return r;
}

/// Entry-wise Laurent polynomial in z at a fixed parameter value t.
inline Laurent1 at_parameter(const Laurent2& l, const Scalar& t) {
  return l.substitute(0, t).transform<1>(
      [](const Laurent2::Exponent& e, const Scalar& c) { return Laurent1::monomial(c, {e[1]}); });
}

inline Poly laurent_poly_or_throw(const Laurent1& l, const char* what) {
  if (!l.is_zero() && l.min_exp(0) < 0) throw InvalidInput(what);
  return to_poly(l);
}

/// p(alpha z) for a scalar alpha.
inline Poly scale_argument(const Poly& p, const Scalar& alpha) {
  std::vector<Scalar> c = p.coeffs();
  Scalar f(1);
  for (auto& x : c) {
    x *= f;
    f *= alpha;
  }
  return Poly(std::move(c));
}

inline bool z_degrees_within(const SplitType& ty, const Laurent2Matrix& m) {
  const std::size_t n = ty.rank();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Laurent2& x = m(i, j);
      if (x.is_zero()) continue;
      if (x.min_exp(1) < 0 || x.max_exp(1) > ty.exponents[i] - ty.exponents[j]) return false;
    }
  return true;
}

}  // namespace detail

/// The Gamma-action transported to split coordinates of a fixed splitting.
/// There a lift J(z) = R(z)^t C(z) R(phi^{-1} z)^{-t} acts on v0' and is
/// regular at infinity exactly when deg J_ij <= a_i - a_j.
class GammaAction {
 public:
  GammaAction(SplitBundle s, GammaStructure g) : split_(std::move(s)), g_(std::move(g)) { prepare(); }

  const SplitBundle& split() const { return split_; }
  const GammaStructure& gamma() const { return g_; }
  const ValidationReport& report() const { return report_; }

  /// Split-frame lift of element g (finite kind).
  const PolyMatrix& split_lift(std::size_t g) const { return lifts_.at(g); }
  /// Split-frame lift C_t as Laurent polynomials in (t, z) (one-parameter kinds).
  const Laurent2Matrix& split_lift_param() const { return lift_t_; }
  /// Derivative of the split-frame lift at the identity parameter.
  const PolyMatrix& split_lift_derivative() const { return jdot_; }

  GlobalEndo act(std::size_t g, const GlobalEndo& s) const {
    check_shape(s);
    const Poly inv = g_.elements.at(g).phi.inverse().as_poly();
    const GlobalEndo moved = s.map([&](const Poly& p) { return p.compose(inv); });
    return lifts_.at(g) * moved * lift_inv_.at(g);
  }

  GlobalEndo act_param(const Scalar& t, const GlobalEndo& s) const {
    check_shape(s);
    if (!g_.one_parameter()) throw InvalidInput("parameter action requested for a finite group");
    const PolyMatrix j = lift_at(t);
    const PolyMatrix jinv = detail::unimodular_inverse(j);
    GlobalEndo moved;
    if (g_.kind == GammaKind::Mult) {
      if (t.is_zero()) throw InvalidInput("multiplicative parameter must be nonzero");
      const Scalar alpha = t.pow(-g_.q);
      moved = s.map([&](const Poly& p) { return detail::scale_argument(p, alpha); });
    } else {
      const Poly inv = Poly(std::vector<Scalar>{-(g_.shift * t), Scalar(1)});
      moved = s.map([&](const Poly& p) { return p.compose(inv); });
    }
    return j * moved * jinv;
  }

  /// Infinitesimal action at the identity: [J', s] - q z s' (mult) or
  /// [J', s] - shift s' (add).
  GlobalEndo derivation(const GlobalEndo& s) const {
    check_shape(s);
    GlobalEndo d = jdot_ * s - s * jdot_;
    const GlobalEndo ds = s.map([](const Poly& p) { return p.derivative(); });
    if (g_.kind == GammaKind::Mult)
      d -= ds.map([&](const Poly& p) { return p * Poly::monomial(Scalar(g_.q), 1); });
    else
      d -= ds.map([&](const Poly& p) { return p * Poly(g_.shift); });
    return d;
  }

  bool fixes(const GlobalEndo& s) const {
    if (g_.one_parameter()) return derivation(s).is_zero();
    for (std::size_t g = 0; g < g_.order(); ++g)
      if (act(g, s) != s) return false;
    return true;
  }

  /// Basis of the fixed subalgebra A^Gamma, verified multiplicatively closed.
  std::vector<GlobalEndo> fixed_subalgebra(const EndAlgebra& a) const {
    const std::size_t d = a.dim();
    std::vector<ScalarMatrix> blocks;
    std::vector<GlobalEndo> basis;
    for (std::size_t k = 0; k < d; ++k) basis.push_back(a.basis_element(k));
    if (g_.one_parameter()) {
      std::vector<GlobalEndo> imgs;
      for (const auto& b : basis) imgs.push_back(derivation(b));
      blocks.push_back(a.coordinate_matrix(imgs));
    } else {
      for (std::size_t g = 0; g < g_.order(); ++g) {
        if (g_.elements[g].phi.is_identity() && lifts_[g] == PolyMatrix::identity(split_.rank())) continue;
        std::vector<GlobalEndo> imgs;
        for (const auto& b : basis) imgs.push_back(act(g, b) - b);
        blocks.push_back(a.coordinate_matrix(imgs));
      }
    }
    ScalarMatrix sys(d * blocks.size(), d);
    for (std::size_t k = 0; k < blocks.size(); ++k)
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) sys(k * d + r, c) = blocks[k](r, c);
    std::vector<GlobalEndo> fixed;
    for (const auto& v : linalg::nullspace(sys)) fixed.push_back(a.element(v));
    fixed = a.span_basis(fixed);
    for (const auto& x : fixed)
      for (const auto& y : fixed)
        if (!a.express(fixed, x * y)) throw InvariantBreach("fixed subspace not closed under multiplication");
    return fixed;
  }

  // Section route, in the frame of the input transition.
  /// g acting on a chart-0 section vector: C_g(z) v(phi_g^{-1} z).
  std::vector<Poly> act_on_section(std::size_t g, const std::vector<Poly>& v) const {
    const Poly inv = g_.elements.at(g).phi.inverse().as_poly();
    std::vector<Poly> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) out[i] += orig_lifts_.at(g)(i, j) * v[j].compose(inv);
    return out;
  }
  /// Infinitesimal action on a chart-0 section vector.
  std::vector<Poly> derive_section(const std::vector<Poly>& v) const {
    std::vector<Poly> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      for (std::size_t j = 0; j < v.size(); ++j) out[i] += orig_cdot_(i, j) * v[j];
      const Poly dv = v[i].derivative();
      out[i] -= g_.kind == GammaKind::Mult ? dv * Poly::monomial(Scalar(g_.q), 1) : dv * Poly(g_.shift);
    }
    return out;
  }

 private:
  void check_shape(const GlobalEndo& s) const {
    if (s.rows() != split_.rank() || s.cols() != split_.rank()) throw InvalidInput("shape mismatch");
  }

  PolyMatrix lift_at(const Scalar& t) const {
    return lift_t_.map([&](const Laurent2& l) {
      return detail::laurent_poly_or_throw(detail::at_parameter(l, t), "lift not polynomial in z");
    });
  }

  void fail(std::string msg) { report_.failures.push_back(std::move(msg)); }

  void prepare() {
    const std::size_t n = split_.rank();
    if (g_.rank() != n) {
      fail("lift rank differs from bundle rank");
      return;
    }
    if (g_.kind == GammaKind::Finite)
      prepare_finite();
    else
      prepare_param();
  }

  void prepare_finite() {
    const std::size_t n = split_.rank(), m = g_.order();
    if (m == 0) {
      fail("group has no elements");
      return;
    }
    if (g_.table.size() != m) {
      fail("multiplication table has wrong size");
      return;
    }
    for (const auto& row : g_.table) {
      if (row.size() != m) {
        fail("multiplication table has wrong size");
        return;
      }
      for (std::size_t x : row)
        if (x >= m) {
          fail("multiplication table entry out of range");
          return;
        }
    }
    const PolyMatrix rt = split_.right.transpose();
    bool usable = true;
    for (std::size_t g = 0; g < m; ++g) {
      const auto& el = g_.elements[g];
      if (el.phi.det().is_zero()) {
        fail("element " + el.label + ": singular Mobius matrix");
        usable = false;
        continue;
      }
      if (!el.phi.is_affine()) {
        fail("element " + el.label + ": non-affine base automorphism unsupported");
        usable = false;
        continue;
      }
      if (el.lift.rows() != n || el.lift.cols() != n) {
        fail("element " + el.label + ": lift has wrong shape");
        usable = false;
        continue;
      }
      PolyMatrix c;
      try {
        c = el.lift.map([](const Laurent1& l) { return detail::laurent_poly_or_throw(l, "lift"); });
      } catch (const InvalidInput&) {
        fail("element " + el.label + ": lift not regular on chart 0");
        usable = false;
        continue;
      }
      const Poly det = ring_determinant(c);
      if (det.degree() != 0) {
        fail("element " + el.label + ": lift determinant is not a nonzero constant");
        usable = false;
        continue;
      }
      orig_lifts_.push_back(c);
      const Poly inv = el.phi.inverse().as_poly();
      const PolyMatrix rinv_moved = split_.right_inv.map([&](const Poly& p) { return p.compose(inv); });
      PolyMatrix j = rt * c * rinv_moved.transpose();
      lifts_.push_back(j);
      lift_inv_.push_back(detail::unimodular_inverse(j));
      if (!degree_bounds_hold(split_.type, j)) fail("element " + el.label + ": lift not regular at infinity");
    }
    if (!usable) {
      lifts_.clear();
      lift_inv_.clear();
      orig_lifts_.clear();
      return;
    }
    const auto e = g_.identity_index();
    if (!e) {
      fail("multiplication table has no identity element");
    } else {
      const auto& id = g_.elements[*e];
      if (!id.phi.is_identity()) fail("identity element " + id.label + " has non-identity Mobius map");
      if (orig_lifts_[*e] != PolyMatrix::identity(n)) fail("identity element " + id.label + " has non-identity lift");
      for (std::size_t g = 0; g < m; ++g) {
        bool has_inv = false;
        for (std::size_t h = 0; h < m; ++h) has_inv = has_inv || g_.table[g][h] == *e;
        if (!has_inv) fail("element " + g_.elements[g].label + " has no inverse in the table");
      }
    }
    for (std::size_t g = 0; g < m; ++g)
      for (std::size_t h = 0; h < m; ++h) {
        const std::size_t gh = g_.table[g][h];
        for (std::size_t k = 0; k < m && m <= 64; ++k)
          if (g_.table[gh][k] != g_.table[g][g_.table[h][k]]) {
            fail("table not associative at (" + g_.elements[g].label + ", " + g_.elements[h].label + ", " +
                 g_.elements[k].label + ")");
            k = m;
          }
        const auto& eg = g_.elements[g];
        const auto& eh = g_.elements[h];
        if (!(g_.elements[gh].phi == eg.phi.compose(eh.phi)))
          fail("base maps do not compose at (" + eg.label + ", " + eh.label + ")");
        const Poly inv = eg.phi.inverse().as_poly();
        const PolyMatrix rhs = orig_lifts_[g] * orig_lifts_[h].map([&](const Poly& p) { return p.compose(inv); });
        if (rhs != orig_lifts_[gh])
          fail("cocycle law fails at (" + eg.label + ", " + eh.label + ")");
      }
  }

  void prepare_param() {
    const std::size_t n = split_.rank();
    const Laurent2Matrix& c = g_.lift;
    if (c.rows() != n || c.cols() != n) {
      fail("lift has wrong shape");
      return;
    }
    const bool mult = g_.kind == GammaKind::Mult;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const Laurent2& x = c(i, j);
        if (x.is_zero()) continue;
        if (x.min_exp(1) < 0) {
          fail("lift not regular on chart 0");
          return;
        }
        if (!mult && x.min_exp(0) < 0) {
          fail("additive lift must be polynomial in t");
          return;
        }
      }
    const Laurent2 det = ring_determinant(c);
    if (det.terms().size() != 1 || det.terms().begin()->first[1] != 0 || (!mult && det.terms().begin()->first[0] != 0)) {
      fail("lift determinant is not a unit");
      return;
    }
    const Scalar t0 = mult ? Scalar(1) : Scalar(0);
    PolyMatrix c0 = c.map([&](const Laurent2& l) { return to_poly(detail::at_parameter(l, t0)); });
    if (c0 != PolyMatrix::identity(n)) fail("lift is not the identity at the identity parameter");

    // Parameter law in variables (s, t, z).
    const auto in_s = [](const Laurent2& l) {
      return l.transform<3>([](const Laurent2::Exponent& e, const Scalar& k) { return Laurent3::monomial(k, {e[0], 0, e[1]}); });
    };
    const auto in_t_moved = [&](const Laurent2& l) {
      return l.transform<3>([&](const Laurent2::Exponent& e, const Scalar& k) {
        if (mult) return Laurent3::monomial(k, {-g_.q * e[1], e[0], e[1]});
        const Laurent3 zs = Laurent3::var(2) - Laurent3::var(0) * Laurent3(g_.shift);
        return Laurent3::monomial(k, {0, e[0], 0}) * zs.pow(e[1]);
      });
    };
    const auto composed = [&](const Laurent2& l) {
      return l.transform<3>([&](const Laurent2::Exponent& e, const Scalar& k) {
        if (mult) return Laurent3::monomial(k, {e[0], e[0], e[1]});
        return (Laurent3::var(0) + Laurent3::var(1)).pow(e[0]) * Laurent3::monomial(k, {0, 0, e[1]});
      });
    };
    const Laurent3Matrix lhs = c.map(composed);
    const Laurent3Matrix rhs = c.map(in_s) * c.map(in_t_moved);
    if (lhs != rhs) fail("parameter law fails");

    // Transport to split coordinates.
    const Laurent2Matrix rt = split_.right.transpose().map([](const Poly& p) { return detail::poly_compose_l2(p, Laurent2::var(1)); });
    const Laurent2 zinv = mult ? Laurent2::monomial(Scalar(1), {-g_.q, 1})
                               : Laurent2::var(1) - Laurent2::var(0) * Laurent2(g_.shift);
    const Laurent2Matrix rinv_moved = split_.right_inv.map([&](const Poly& p) { return detail::poly_compose_l2(p, zinv); });
    lift_t_ = rt * c * rinv_moved.transpose();
    if (!detail::z_degrees_within(split_.type, lift_t_)) fail("lift not regular at infinity");
    jdot_ = lift_t_.map([&](const Laurent2& l) { return to_poly(detail::at_parameter(l.derivative(0), t0)); });
    orig_cdot_ = c.map([&](const Laurent2& l) { return to_poly(detail::at_parameter(l.derivative(0), t0)); });
  }

  SplitBundle split_;
  GammaStructure g_;
  ValidationReport report_;
  std::vector<PolyMatrix> lifts_, lift_inv_, orig_lifts_;
  Laurent2Matrix lift_t_;
  PolyMatrix jdot_, orig_cdot_;
};

struct Generator {
  std::string label;
  Mobius phi;
  LaurentMatrix lift;
};

/// Closes a set of generators under (phi, C)(psi, D) = (phi psi, C(z) D(phi^{-1} z))
/// and returns the full element table; labels are shortest words.
inline GammaStructure generate_finite_group(const std::vector<Generator>& gens, std::size_t n,
                                            std::size_t max_order = 48) {
  struct El {
    std::string label;
    Mobius phi;
    PolyMatrix lift;
  };
  const auto normalize = [](Mobius m) {
    if (!m.is_affine()) throw InvalidInput("non-affine base automorphism unsupported");
    const Scalar d = m.d;
    return Mobius::affine(m.a / d, m.b / d);
  };
  const auto product = [&](const El& x, const El& y) {
    const Poly inv = x.phi.inverse().as_poly();
    return El{x.label + y.label, normalize(x.phi.compose(y.phi)),
              x.lift * y.lift.map([&](const Poly& p) { return p.compose(inv); })};
  };
  const auto find = [](const std::vector<El>& els, const El& x) -> std::optional<std::size_t> {
    for (std::size_t k = 0; k < els.size(); ++k)
      if (els[k].phi == x.phi && els[k].lift == x.lift) return k;
    return std::nullopt;
  };
  std::vector<El> gs;
  for (const auto& g : gens) {
    if (g.lift.rows() != n || g.lift.cols() != n) throw InvalidInput("generator " + g.label + " has wrong shape");
    gs.push_back({g.label, normalize(g.phi),
                  g.lift.map([&](const Laurent1& l) { return detail::laurent_poly_or_throw(l, "generator lift not polynomial"); })});
  }
  std::vector<El> els{{"e", Mobius::identity(), PolyMatrix::identity(n)}};
  for (std::size_t k = 0; k < els.size(); ++k)
    for (const auto& g : gs) {
      El x = product(els[k], g);
      if (k == 0) x.label = g.label;
      if (find(els, x)) continue;
      if (els.size() >= max_order) throw InvalidInput("group generated exceeds order " + std::to_string(max_order));
      els.push_back(std::move(x));
    }
  GammaStructure out;
  for (const auto& e : els) out.elements.push_back({e.label, e.phi, to_laurent(e.lift)});
  out.table.assign(els.size(), std::vector<std::size_t>(els.size()));
  for (std::size_t a = 0; a < els.size(); ++a)
    for (std::size_t b = 0; b < els.size(); ++b) {
      const auto k = find(els, product(els[a], els[b]));
      if (!k) throw InvalidInput("generators do not close: product outside the generated set");
      out.table[a][b] = *k;
    }
  return out;
}

inline ValidationReport validate_action(const SplitBundle& s, const GammaStructure& g) {
  return GammaAction(s, g).report();
}

inline GlobalEndo act_on_endo(const GammaAction& a, std::size_t g, const GlobalEndo& s) { return a.act(g, s); }

inline std::vector<GlobalEndo> fixed_subalgebra(const EndAlgebra& a, const GammaAction& g) {
  return g.fixed_subalgebra(a);
}

}  // namespace eqlevi
