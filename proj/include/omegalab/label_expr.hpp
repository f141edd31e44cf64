#pragma once

// Propositional formulas labelling automaton transitions: atoms are
// atomic-proposition indices, connectives are !, &, | plus the constants
// t and f. Evaluation is total over full assignments (bit i of the
// assignment word is the truth value of proposition i).

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace omegalab {

struct LabelExpr {
  enum class Kind { kTrue, kFalse, kAp, kNot, kAnd, kOr };

  Kind kind = Kind::kTrue;
  int ap = -1;  // kAp only
  std::unique_ptr<LabelExpr> lhs;
  std::unique_ptr<LabelExpr> rhs;  // kAnd/kOr only

  bool eval(std::uint32_t assignment) const {
    switch (kind) {
      case Kind::kTrue: return true;
      case Kind::kFalse: return false;
      case Kind::kAp: return (assignment >> ap) & 1u;
      case Kind::kNot: return !lhs->eval(assignment);
      case Kind::kAnd: return lhs->eval(assignment) && rhs->eval(assignment);
      case Kind::kOr: return lhs->eval(assignment) || rhs->eval(assignment);
    }
    return false;
  }

  int max_ap() const {
    switch (kind) {
      case Kind::kAp: return ap;
      case Kind::kNot: return lhs->max_ap();
      case Kind::kAnd:
      case Kind::kOr: return std::max(lhs->max_ap(), rhs->max_ap());
      default: return -1;
    }
  }

  std::unique_ptr<LabelExpr> clone() const {
    auto e = std::make_unique<LabelExpr>();
    e->kind = kind;
    e->ap = ap;
    if (lhs) e->lhs = lhs->clone();
    if (rhs) e->rhs = rhs->clone();
    return e;
  }

  static std::unique_ptr<LabelExpr> constant(bool value) {
    auto e = std::make_unique<LabelExpr>();
    e->kind = value ? Kind::kTrue : Kind::kFalse;
    return e;
  }
  static std::unique_ptr<LabelExpr> atom(int ap_index) {
    auto e = std::make_unique<LabelExpr>();
    e->kind = Kind::kAp;
    e->ap = ap_index;
    return e;
  }
  static std::unique_ptr<LabelExpr> negate(std::unique_ptr<LabelExpr> x) {
    auto e = std::make_unique<LabelExpr>();
    e->kind = Kind::kNot;
    e->lhs = std::move(x);
    return e;
  }
  static std::unique_ptr<LabelExpr> conj(std::unique_ptr<LabelExpr> a,
                                         std::unique_ptr<LabelExpr> b) {
    auto e = std::make_unique<LabelExpr>();
    e->kind = Kind::kAnd;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
  }
  static std::unique_ptr<LabelExpr> disj(std::unique_ptr<LabelExpr> a,
                                         std::unique_ptr<LabelExpr> b) {
    auto e = std::make_unique<LabelExpr>();
    e->kind = Kind::kOr;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
  }
};

// All assignments over `prop_count` propositions satisfying the formula.
inline std::vector<std::uint32_t> satisfying_assignments(const LabelExpr& e,
                                                         int prop_count) {
  std::vector<std::uint32_t> out;
  const std::uint32_t total = 1u << prop_count;
  for (std::uint32_t a = 0; a < total; ++a)
    if (e.eval(a)) out.push_back(a);
  return out;
}

// Renders an assignment as a conjunction of literals over the given AP
// names, e.g. {a=1, b=0} -> "a & !b". Used in diagnostics.
inline std::string assignment_to_string(std::uint32_t assignment,
                                        const std::vector<std::string>& ap_names) {
  if (ap_names.empty()) return "t";
  std::string s;
  for (std::size_t i = 0; i < ap_names.size(); ++i) {
    if (i) s += " & ";
    if (!((assignment >> i) & 1u)) s += "!";
    s += ap_names[i];
  }
  return s;
}

}  // namespace omegalab
