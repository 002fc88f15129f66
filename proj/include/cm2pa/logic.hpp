#ifndef CM2PA_LOGIC_HPP
#define CM2PA_LOGIC_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cm2pa/errors.hpp"

namespace cm2pa::logic {

using Nat = std::uint64_t;
using Var = std::string;

/// Environment for ground evaluation; small enough that linear lookup wins.
using Env = std::vector<std::pair<Var, Nat>>;

std::optional<Nat> lookup(const Env& env, const Var& v);

/// Sum of variables with positive integer coefficients plus a constant,
/// kept in canonical form (no zero coefficients).
class LinearTerm {
public:
    LinearTerm() = default;

    static LinearTerm constant(Nat c);
    static LinearTerm var(Var v, Nat coeff = 1);

    LinearTerm operator+(const LinearTerm& o) const;
    LinearTerm operator+(Nat c) const;

    Nat eval(const Env& env) const; // throws EvalError on unbound variable

    const std::map<Var, Nat>& coeffs() const { return coeffs_; }
    Nat constant_part() const { return constant_; }
    bool is_constant() const { return coeffs_.empty(); }

    bool operator==(const LinearTerm&) const = default;
    auto operator<=>(const LinearTerm&) const = default;

    std::string str() const;                // e.g. "6x + y + 1"
    std::string str(const Env& env) const;  // bound variables replaced by values

private:
    std::map<Var, Nat> coeffs_;
    Nat constant_ = 0;
};

/// A raw summand is either a variable occurrence or a numeral.
using RawSummand = std::variant<Var, Nat>;

/// Merges a raw sum of variables and numerals into canonical form.
LinearTerm normalize_term(const std::vector<RawSummand>& summands);

struct Atom {
    enum class Kind {
        Eq,     // lhs = rhs
        Le,     // lhs <= rhs (primitive, never expanded)
        Lt,     // lhs < rhs
        Pred,   // P(lhs)
        FnEq,   // f(lhs) = value
        FnGt,   // f(lhs) > value
        FnGe,   // f(lhs) >= value
        FnLe,   // f(lhs) <= value
        Bottom, // falsity
    };

    Kind kind = Kind::Bottom;
    LinearTerm lhs;
    LinearTerm rhs;
    Nat value = 0; // for FnEq/FnGe/FnLe

    static Atom eq(LinearTerm s, LinearTerm t);
    static Atom le(LinearTerm s, LinearTerm t);
    static Atom lt(LinearTerm s, LinearTerm t);
    static Atom pred(LinearTerm t);
    static Atom fn_eq(LinearTerm t, Nat v);
    static Atom fn_gt(LinearTerm t, Nat v);
    static Atom fn_ge(LinearTerm t, Nat v);
    static Atom fn_le(LinearTerm t, Nat v);
    static Atom bottom();

    bool operator==(const Atom&) const = default;
    auto operator<=>(const Atom&) const = default;

    bool uses_pred() const { return kind == Kind::Pred; }
    bool uses_fn() const {
        return kind == Kind::FnEq || kind == Kind::FnGt || kind == Kind::FnGe ||
               kind == Kind::FnLe;
    }

    void collect_vars(std::set<Var>& out) const;
    std::string str() const;
    std::string str(const Env& env) const;
};

/// Immutable first-order formula over Atom with Not/And/Or/Implies and
/// quantifiers over N-sort variables.
class Formula {
public:
    enum class Kind { Atom, Not, And, Or, Implies, Forall, Exists };

    static Formula atom(logic::Atom a);
    static Formula negate(Formula f);
    static Formula conj(std::vector<Formula> fs); // flattens; empty = error
    static Formula disj(std::vector<Formula> fs);
    static Formula implies(Formula a, Formula b);
    static Formula forall(std::vector<Var> vars, Formula body);
    static Formula exists(std::vector<Var> vars, Formula body);

    Kind kind() const { return n_->kind; }
    const logic::Atom& as_atom() const { return *n_->atom; }
    const std::vector<Formula>& children() const { return n_->kids; }
    const std::vector<Var>& quantified_vars() const { return n_->vars; }

    bool contains_exists() const;
    bool contains_quantifier() const;
    void collect_free_vars(std::set<Var>& out) const;
    std::set<Var> free_vars() const;

    std::string str() const;
    std::string str(const Env& env) const;

private:
    struct Node {
        Kind kind;
        std::optional<logic::Atom> atom;
        std::vector<Formula> kids;
        std::vector<Var> vars;
    };
    std::shared_ptr<const Node> n_;
    explicit Formula(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
};

struct Literal {
    bool positive = true;
    Atom atom;

    bool operator==(const Literal&) const = default;
    auto operator<=>(const Literal&) const = default;
    std::string str() const;
};

using Clause = std::vector<Literal>;

struct ClauseSet {
    std::vector<Clause> clauses;
    std::string str() const;
};

/// Naive distributive CNF of a prenex-universal sentence. No fresh symbols.
/// Tautological clauses are removed, duplicate literals merged.
/// Throws EvalError if an existential quantifier occurs.
ClauseSet to_cnf(const Formula& s);

/// True iff every clause has at most one positive literal.
bool is_horn(const ClauseSet& cs);

/// Maximum number of distinct variables occurring in any single clause.
std::size_t max_vars_per_clause(const ClauseSet& cs);

/// Rebuilds a clause as a universally closed disjunction.
Formula clause_to_formula(const Clause& c);

enum class FnFlavor { Nat, Real };

struct FnSubstitution {
    Formula formula;
    Formula range_axiom;
};

/// Replaces the literal ~P(t) with f(t)=0 and the literal P(t) with f(t)=1
/// (Nat) or f(t)>0 (Real), purely syntactically, and returns the matching
/// range axiom over f.
FnSubstitution predicate_to_function(const Formula& s, FnFlavor flavor);

Formula function_range_axiom(FnFlavor flavor);

struct SmtMeta {
    std::string variant_name;
    std::uint64_t machine_hash = 0;
    bool uses_function = false;      // declare f instead of P
    bool real_domain = false;        // UFLRA instead of UFLIA
    bool declare_d_e = false;        // fixed-width uninterpreted constants
    std::vector<std::string> names;  // per-sentence comments, optional
};

/// SMT-LIB 2.6 script: header comment, set-logic, declarations, one assert per
/// sentence, (check-sat). Over Int, every quantified variable gets an x >= 0
/// guard. Throws EvalError if the sentences mix P and f.
std::string to_smtlib(const std::vector<Formula>& sentences, const SmtMeta& meta);

std::string term_to_smtlib(const LinearTerm& t);

} // namespace cm2pa::logic

#endif
