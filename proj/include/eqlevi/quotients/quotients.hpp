#pragma once

// Unipotent radical and Levi quotient of the automorphism group of a split
// bundle, and the induced action of a one-parameter group on the quotient.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "eqlevi/endalgebra/endalgebra.hpp"
#include "eqlevi/equivariant/gamma.hpp"

namespace eqlevi {

struct LeviQuotientData {
  SplitType type;
  std::vector<int> degrees;                       // distinct exponents, descending
  std::vector<std::size_t> multiplicities;        // m_d per degree
  std::vector<std::vector<std::size_t>> blocks;   // coordinate indices per degree
  std::vector<GlobalEndo> radical_basis;          // strictly degree-raising blocks

  std::size_t quotient_dim() const {
    std::size_t d = 0;
    for (auto m : multiplicities) d += m * m;
    return d;
  }

  std::string group() const {
    std::string s;
    for (std::size_t k = 0; k < multiplicities.size(); ++k)
      s += (k ? " x GL(" : "GL(") + std::to_string(multiplicities[k]) + ")";
    return s;
  }

  /// Block-diagonal constant part.
  GlobalEndo psi(const GlobalEndo& s) const {
    const std::size_t n = type.rank();
    GlobalEndo out(n, n);
    for (const auto& b : blocks)
      for (auto i : b)
        for (auto j : b) out(i, j) = Poly(s(i, j).coeff(0));
    return out;
  }

  std::vector<ScalarMatrix> psi_blocks(const GlobalEndo& s) const {
    std::vector<ScalarMatrix> out;
    for (const auto& b : blocks) {
      ScalarMatrix m(b.size(), b.size());
      for (std::size_t r = 0; r < b.size(); ++r)
        for (std::size_t c = 0; c < b.size(); ++c) m(r, c) = s(b[r], b[c]).coeff(0);
      out.push_back(std::move(m));
    }
    return out;
  }

  /// Elementary matrices inside the diagonal blocks.
  std::vector<GlobalEndo> quotient_basis() const {
    const std::size_t n = type.rank();
    std::vector<GlobalEndo> out;
    for (const auto& b : blocks)
      for (auto i : b)
        for (auto j : b) {
          GlobalEndo e(n, n);
          e(i, j) = Poly(1);
          out.push_back(std::move(e));
        }
    return out;
  }

  ScalarVector quotient_coordinates(const GlobalEndo& s) const {
    ScalarVector v;
    for (const auto& b : blocks)
      for (auto i : b)
        for (auto j : b) v.push_back(s(i, j).coeff(0));
    return v;
  }
};

inline LeviQuotientData levi_quotient(const EndAlgebra& a) {
  LeviQuotientData q;
  q.type = a.type();
  const auto& ex = q.type.exponents;
  for (std::size_t i = 0; i < ex.size(); ++i) {
    if (q.degrees.empty() || q.degrees.back() != ex[i]) {
      q.degrees.push_back(ex[i]);
      q.blocks.emplace_back();
    }
    q.blocks.back().push_back(i);
  }
  for (const auto& b : q.blocks) q.multiplicities.push_back(b.size());
  for (std::size_t k = 0; k < a.dim(); ++k) {
    const auto& bi = a.basis_index()[k];
    if (ex[bi.i] > ex[bi.j]) q.radical_basis.push_back(a.basis_element(k));
  }
  if (q.radical_basis.size() + q.quotient_dim() != a.dim()) throw InvariantBreach("Levi quotient dimension count fails");
  return q;
}

enum class Verdict { Trivial, TorusFactoring, NontrivialNonTorus, HypothesisNotMet };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Trivial:
      return "trivial";
    case Verdict::TorusFactoring:
      return "torus-factoring";
    case Verdict::NontrivialNonTorus:
      return "nontrivial-non-torus";
    case Verdict::HypothesisNotMet:
      return "hypothesis-not-met";
  }
  return "?";
}

struct ActionClassification {
  Verdict verdict = Verdict::HypothesisNotMet;
  ScalarMatrix induced;                   // derivation on the quotient, in quotient coordinates
  std::vector<std::pair<long, std::size_t>> weights;  // weight, multiplicity
  std::optional<GlobalEndo> witness;      // quotient element moved by the action
  std::optional<GlobalEndo> witness_image;
  bool corollary_applies = false;         // no equivariant reduction to the maximal-torus Levi
  std::string note;
};

/// Induced action on the Levi quotient; for connected one-parameter groups
/// the derivation psi(delta(x)) on quotient elements x carries the verdict.
inline ActionClassification classify_action_on_levi_quotient(const LeviQuotientData& l, const GammaAction& g) {
  ActionClassification c;
  if (!g.gamma().one_parameter()) {
    c.verdict = Verdict::HypothesisNotMet;
    c.note = "finite group: connectedness fails";
    return c;
  }
  const auto basis = l.quotient_basis();
  const std::size_t d = basis.size();
  c.induced = ScalarMatrix(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    const GlobalEndo img = l.psi(g.derivation(basis[k]));
    const ScalarVector v = l.quotient_coordinates(img);
    for (std::size_t r = 0; r < d; ++r) c.induced(r, k) = v[r];
    if (!c.witness && !img.is_zero()) {
      c.witness = basis[k];
      c.witness_image = img;
    }
  }
  if (g.gamma().kind == GammaKind::Mult) {
    c.verdict = Verdict::TorusFactoring;
    const RootSplit rs = poly_split_roots(linalg::charpoly(c.induced));
    if (!rs.unsplit.empty()) throw InvariantBreach("torus weights do not split");
    for (const auto& [r, m] : rs.roots) {
      const Rational w = r.is_zero() ? Rational(0) : r.coeffs()[0];
      if (!r.is_rational() || w.get_den() != 1) throw InvariantBreach("torus weight is not an integer");
      c.weights.emplace_back(w.get_num().get_si(), static_cast<std::size_t>(m));
    }
    std::sort(c.weights.begin(), c.weights.end());
    if (!c.witness) c.note = "action on the quotient is trivial";
    return c;
  }
  c.verdict = c.witness ? Verdict::NontrivialNonTorus : Verdict::Trivial;
  c.corollary_applies = c.verdict == Verdict::NontrivialNonTorus && l.type.rank() >= 2;
  if (c.verdict == Verdict::NontrivialNonTorus) c.note = "exploratory: additive group with a non-torus action";
  return c;
}

/// True when the parts of `fine` can be grouped to give the parts of `coarse`.
inline bool partition_refines(std::vector<std::size_t> fine, std::vector<std::size_t> coarse) {
  std::sort(fine.begin(), fine.end(), std::greater<>());
  std::sort(coarse.begin(), coarse.end(), std::greater<>());
  std::size_t total_f = 0, total_c = 0;
  for (auto x : fine) total_f += x;
  for (auto x : coarse) total_c += x;
  if (total_f != total_c) return false;
  std::vector<std::size_t> room = coarse;
  const auto place = [&](auto&& self, std::size_t k) -> bool {
    if (k == fine.size()) {
      return std::all_of(room.begin(), room.end(), [](std::size_t r) { return r == 0; });
    }
    for (std::size_t j = 0; j < room.size(); ++j) {
      if (room[j] < fine[k] || (j > 0 && room[j] == room[j - 1])) continue;
      room[j] -= fine[k];
      if (self(self, k + 1)) return true;
      room[j] += fine[k];
    }
    return false;
  };
  return place(place, 0);
}

}  // namespace eqlevi
