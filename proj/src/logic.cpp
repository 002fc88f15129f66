#include "cm2pa/logic.hpp"

#include <algorithm>
#include <sstream>

namespace cm2pa::logic {

std::optional<Nat> lookup(const Env& env, const Var& v) {
    // Innermost binding wins, so nested quantifiers may shadow outer ones.
    for (auto it = env.rbegin(); it != env.rend(); ++it)
        if (it->first == v) return it->second;
    return std::nullopt;
}

// ---------------------------------------------------------------- LinearTerm

LinearTerm LinearTerm::constant(Nat c) {
    LinearTerm t;
    t.constant_ = c;
    return t;
}

LinearTerm LinearTerm::var(Var v, Nat coeff) {
    LinearTerm t;
    if (coeff != 0) t.coeffs_[std::move(v)] = coeff;
    return t;
}

LinearTerm LinearTerm::operator+(const LinearTerm& o) const {
    LinearTerm t = *this;
    t.constant_ += o.constant_;
    for (const auto& [v, c] : o.coeffs_) t.coeffs_[v] += c;
    return t;
}

LinearTerm LinearTerm::operator+(Nat c) const {
    LinearTerm t = *this;
    t.constant_ += c;
    return t;
}

Nat LinearTerm::eval(const Env& env) const {
    Nat sum = constant_;
    for (const auto& [v, c] : coeffs_) {
        auto val = lookup(env, v);
        if (!val) throw EvalError("unbound variable '" + v + "'");
        sum += c * *val;
    }
    return sum;
}

std::string LinearTerm::str() const {
    std::string out;
    for (const auto& [v, c] : coeffs_) {
        if (!out.empty()) out += " + ";
        if (c != 1) out += std::to_string(c);
        out += v;
    }
    if (constant_ != 0 || out.empty()) {
        if (!out.empty()) out += " + ";
        out += std::to_string(constant_);
    }
    return out;
}

std::string LinearTerm::str(const Env& env) const {
    LinearTerm t;
    t.constant_ = constant_;
    for (const auto& [v, c] : coeffs_) {
        if (auto val = lookup(env, v))
            t.constant_ += c * *val;
        else
            t.coeffs_[v] += c;
    }
    return t.str();
}

LinearTerm normalize_term(const std::vector<RawSummand>& summands) {
    LinearTerm t;
    for (const auto& s : summands) {
        if (std::holds_alternative<Var>(s))
            t = t + LinearTerm::var(std::get<Var>(s));
        else
            t = t + std::get<Nat>(s);
    }
    return t;
}

// ---------------------------------------------------------------------- Atom

Atom Atom::eq(LinearTerm s, LinearTerm t) {
    return Atom{Kind::Eq, std::move(s), std::move(t), 0};
}
Atom Atom::le(LinearTerm s, LinearTerm t) {
    return Atom{Kind::Le, std::move(s), std::move(t), 0};
}
Atom Atom::lt(LinearTerm s, LinearTerm t) {
    return Atom{Kind::Lt, std::move(s), std::move(t), 0};
}
Atom Atom::pred(LinearTerm t) {
    return Atom{Kind::Pred, std::move(t), {}, 0};
}
Atom Atom::fn_eq(LinearTerm t, Nat v) {
    return Atom{Kind::FnEq, std::move(t), {}, v};
}
Atom Atom::fn_gt(LinearTerm t, Nat v) {
    return Atom{Kind::FnGt, std::move(t), {}, v};
}
Atom Atom::fn_ge(LinearTerm t, Nat v) {
    return Atom{Kind::FnGe, std::move(t), {}, v};
}
Atom Atom::fn_le(LinearTerm t, Nat v) {
    return Atom{Kind::FnLe, std::move(t), {}, v};
}
Atom Atom::bottom() { return Atom{Kind::Bottom, {}, {}, 0}; }

void Atom::collect_vars(std::set<Var>& out) const {
    for (const auto& [v, c] : lhs.coeffs()) out.insert(v);
    for (const auto& [v, c] : rhs.coeffs()) out.insert(v);
}

namespace {
std::string atom_str(const Atom& a, const std::string& ls, const std::string& rs) {
    switch (a.kind) {
    case Atom::Kind::Eq: return ls + " = " + rs;
    case Atom::Kind::Le: return ls + " <= " + rs;
    case Atom::Kind::Lt: return ls + " < " + rs;
    case Atom::Kind::Pred: return "P(" + ls + ")";
    case Atom::Kind::FnEq: return "f(" + ls + ") = " + std::to_string(a.value);
    case Atom::Kind::FnGt: return "f(" + ls + ") > " + std::to_string(a.value);
    case Atom::Kind::FnGe: return "f(" + ls + ") >= " + std::to_string(a.value);
    case Atom::Kind::FnLe: return "f(" + ls + ") <= " + std::to_string(a.value);
    case Atom::Kind::Bottom: return "false";
    }
    return "?";
}
} // namespace

std::string Atom::str() const { return atom_str(*this, lhs.str(), rhs.str()); }
std::string Atom::str(const Env& env) const {
    return atom_str(*this, lhs.str(env), rhs.str(env));
}

// ------------------------------------------------------------------- Formula

Formula Formula::atom(logic::Atom a) {
    return Formula(std::make_shared<Node>(Node{Kind::Atom, std::move(a), {}, {}}));
}

Formula Formula::negate(Formula f) {
    return Formula(std::make_shared<Node>(
        Node{Kind::Not, std::nullopt, {std::move(f)}, {}}));
}

static std::vector<Formula> flatten(Formula::Kind k, std::vector<Formula> fs) {
    std::vector<Formula> out;
    for (auto& f : fs) {
        if (f.kind() == k) {
            for (const auto& c : f.children()) out.push_back(c);
        } else {
            out.push_back(std::move(f));
        }
    }
    return out;
}

Formula Formula::conj(std::vector<Formula> fs) {
    if (fs.empty()) throw EvalError("empty conjunction");
    auto flat = flatten(Kind::And, std::move(fs));
    if (flat.size() == 1) return flat.front();
    return Formula(std::make_shared<Node>(Node{Kind::And, std::nullopt, std::move(flat), {}}));
}

Formula Formula::disj(std::vector<Formula> fs) {
    if (fs.empty()) throw EvalError("empty disjunction");
    auto flat = flatten(Kind::Or, std::move(fs));
    if (flat.size() == 1) return flat.front();
    return Formula(std::make_shared<Node>(Node{Kind::Or, std::nullopt, std::move(flat), {}}));
}

Formula Formula::implies(Formula a, Formula b) {
    return Formula(std::make_shared<Node>(
        Node{Kind::Implies, std::nullopt, {std::move(a), std::move(b)}, {}}));
}

Formula Formula::forall(std::vector<Var> vars, Formula body) {
    return Formula(std::make_shared<Node>(
        Node{Kind::Forall, std::nullopt, {std::move(body)}, std::move(vars)}));
}

Formula Formula::exists(std::vector<Var> vars, Formula body) {
    return Formula(std::make_shared<Node>(
        Node{Kind::Exists, std::nullopt, {std::move(body)}, std::move(vars)}));
}

bool Formula::contains_exists() const {
    if (kind() == Kind::Exists) return true;
    for (const auto& c : children())
        if (c.contains_exists()) return true;
    return false;
}

bool Formula::contains_quantifier() const {
    if (kind() == Kind::Forall || kind() == Kind::Exists) return true;
    for (const auto& c : children())
        if (c.contains_quantifier()) return true;
    return false;
}

void Formula::collect_free_vars(std::set<Var>& out) const {
    if (kind() == Kind::Atom) {
        as_atom().collect_vars(out);
        return;
    }
    if (kind() == Kind::Forall || kind() == Kind::Exists) {
        std::set<Var> inner;
        children().front().collect_free_vars(inner);
        for (const auto& v : quantified_vars()) inner.erase(v);
        out.insert(inner.begin(), inner.end());
        return;
    }
    for (const auto& c : children()) c.collect_free_vars(out);
}

std::set<Var> Formula::free_vars() const {
    std::set<Var> out;
    collect_free_vars(out);
    return out;
}

namespace {

std::string join_vars(const std::vector<Var>& vars) {
    std::string s;
    for (const auto& v : vars) {
        if (!s.empty()) s += " ";
        s += v;
    }
    return s;
}

std::string render(const Formula& f, const Env* env) {
    auto rec = [env](const Formula& g) { return render(g, env); };
    auto wrapped = [&](const Formula& g, bool need) {
        std::string s = rec(g);
        return need ? "(" + s + ")" : s;
    };
    switch (f.kind()) {
    case Formula::Kind::Atom:
        return env ? f.as_atom().str(*env) : f.as_atom().str();
    case Formula::Kind::Not: {
        const Formula& c = f.children().front();
        return "~" + wrapped(c, c.kind() != Formula::Kind::Atom);
    }
    case Formula::Kind::And: {
        std::string s;
        for (const auto& c : f.children()) {
            if (!s.empty()) s += " & ";
            s += wrapped(c, c.kind() == Formula::Kind::Or ||
                                c.kind() == Formula::Kind::Implies ||
                                c.kind() == Formula::Kind::Forall ||
                                c.kind() == Formula::Kind::Exists);
        }
        return s;
    }
    case Formula::Kind::Or: {
        std::string s;
        for (const auto& c : f.children()) {
            if (!s.empty()) s += " | ";
            s += wrapped(c, c.kind() == Formula::Kind::Implies ||
                                c.kind() == Formula::Kind::Forall ||
                                c.kind() == Formula::Kind::Exists);
        }
        return s;
    }
    case Formula::Kind::Implies:
        return wrapped(f.children()[0], f.children()[0].kind() == Formula::Kind::Implies) +
               " -> " + rec(f.children()[1]);
    case Formula::Kind::Forall:
        return "forall " + join_vars(f.quantified_vars()) + ". " + rec(f.children().front());
    case Formula::Kind::Exists:
        return "exists " + join_vars(f.quantified_vars()) + ". " + rec(f.children().front());
    }
    return "?";
}

} // namespace

std::string Formula::str() const { return render(*this, nullptr); }
std::string Formula::str(const Env& env) const { return render(*this, &env); }

// ----------------------------------------------------------------------- CNF

std::string Literal::str() const {
    return positive ? atom.str() : "~" + atom.str();
}

std::string ClauseSet::str() const {
    std::string out;
    for (const auto& cl : clauses) {
        std::string line;
        for (const auto& lit : cl) {
            if (!line.empty()) line += " | ";
            line += lit.str();
        }
        if (line.empty()) line = "false";
        out += line + "\n";
    }
    return out;
}

namespace {

// Negation-normal form: Not only over atoms, no Implies.
Formula nnf(const Formula& f, bool positive) {
    switch (f.kind()) {
    case Formula::Kind::Atom:
        return positive ? f : Formula::negate(f);
    case Formula::Kind::Not:
        return nnf(f.children().front(), !positive);
    case Formula::Kind::And:
    case Formula::Kind::Or: {
        std::vector<Formula> kids;
        for (const auto& c : f.children()) kids.push_back(nnf(c, positive));
        bool conj = (f.kind() == Formula::Kind::And) == positive;
        return conj ? Formula::conj(std::move(kids)) : Formula::disj(std::move(kids));
    }
    case Formula::Kind::Implies: {
        std::vector<Formula> kids{nnf(f.children()[0], !positive),
                                  nnf(f.children()[1], positive)};
        return positive ? Formula::disj(std::move(kids)) : Formula::conj(std::move(kids));
    }
    default:
        throw EvalError("quantifier inside CNF matrix");
    }
}

std::vector<Clause> distribute(const Formula& f) {
    switch (f.kind()) {
    case Formula::Kind::Atom:
        return {{Literal{true, f.as_atom()}}};
    case Formula::Kind::Not:
        return {{Literal{false, f.children().front().as_atom()}}};
    case Formula::Kind::And: {
        std::vector<Clause> out;
        for (const auto& c : f.children()) {
            auto sub = distribute(c);
            out.insert(out.end(), sub.begin(), sub.end());
        }
        return out;
    }
    case Formula::Kind::Or: {
        std::vector<Clause> acc{{}};
        for (const auto& c : f.children()) {
            auto sub = distribute(c);
            std::vector<Clause> next;
            next.reserve(acc.size() * sub.size());
            for (const auto& a : acc)
                for (const auto& b : sub) {
                    Clause merged = a;
                    merged.insert(merged.end(), b.begin(), b.end());
                    next.push_back(std::move(merged));
                }
            acc = std::move(next);
        }
        return acc;
    }
    default:
        throw EvalError("unexpected node during CNF distribution");
    }
}

// Returns false if the clause is trivially true and should be dropped.
bool simplify_clause(Clause& cl) {
    std::sort(cl.begin(), cl.end());
    cl.erase(std::unique(cl.begin(), cl.end()), cl.end());
    Clause kept;
    for (const auto& lit : cl) {
        if (lit.atom.kind == Atom::Kind::Bottom) {
            if (!lit.positive) return false; // ~false is true
            continue;                        // false contributes nothing
        }
        kept.push_back(lit);
    }
    for (std::size_t i = 0; i + 1 < kept.size(); ++i)
        if (kept[i].atom == kept[i + 1].atom && kept[i].positive != kept[i + 1].positive)
            return false; // tautology
    cl = std::move(kept);
    return true;
}

} // namespace

ClauseSet to_cnf(const Formula& s) {
    if (s.contains_exists())
        throw EvalError("existential quantifier in CNF input");
    Formula matrix = s;
    while (matrix.kind() == Formula::Kind::Forall)
        matrix = matrix.children().front();
    if (matrix.contains_quantifier())
        throw EvalError("non-prenex universal quantifier in CNF input");

    ClauseSet cs;
    for (auto& cl : distribute(nnf(matrix, true)))
        if (simplify_clause(cl)) cs.clauses.push_back(std::move(cl));
    return cs;
}

bool is_horn(const ClauseSet& cs) {
    for (const auto& cl : cs.clauses) {
        std::size_t positive = 0;
        for (const auto& lit : cl)
            if (lit.positive) ++positive;
        if (positive > 1) return false;
    }
    return true;
}

std::size_t max_vars_per_clause(const ClauseSet& cs) {
    std::size_t best = 0;
    for (const auto& cl : cs.clauses) {
        std::set<Var> vars;
        for (const auto& lit : cl) lit.atom.collect_vars(vars);
        best = std::max(best, vars.size());
    }
    return best;
}

Formula clause_to_formula(const Clause& c) {
    std::vector<Formula> lits;
    for (const auto& lit : c) {
        Formula a = Formula::atom(lit.atom);
        lits.push_back(lit.positive ? a : Formula::negate(a));
    }
    if (lits.empty()) lits.push_back(Formula::atom(Atom::bottom()));
    Formula body = Formula::disj(std::move(lits));
    std::set<Var> vars = body.free_vars();
    if (vars.empty()) return body;
    return Formula::forall(std::vector<Var>(vars.begin(), vars.end()), body);
}

// ------------------------------------------------------ function substitution

namespace {

Formula substitute_pred(const Formula& f, FnFlavor flavor) {
    switch (f.kind()) {
    case Formula::Kind::Atom: {
        const Atom& a = f.as_atom();
        if (a.kind == Atom::Kind::Pred) {
            return flavor == FnFlavor::Nat
                       ? Formula::atom(Atom::fn_eq(a.lhs, 1))
                       : Formula::atom(Atom::fn_gt(a.lhs, 0));
        }
        return f;
    }
    case Formula::Kind::Not: {
        const Formula& c = f.children().front();
        if (c.kind() == Formula::Kind::Atom && c.as_atom().kind == Atom::Kind::Pred)
            return Formula::atom(Atom::fn_eq(c.as_atom().lhs, 0));
        return Formula::negate(substitute_pred(c, flavor));
    }
    case Formula::Kind::And:
    case Formula::Kind::Or: {
        std::vector<Formula> kids;
        for (const auto& c : f.children()) kids.push_back(substitute_pred(c, flavor));
        return f.kind() == Formula::Kind::And ? Formula::conj(std::move(kids))
                                              : Formula::disj(std::move(kids));
    }
    case Formula::Kind::Implies:
        return Formula::implies(substitute_pred(f.children()[0], flavor),
                                substitute_pred(f.children()[1], flavor));
    case Formula::Kind::Forall:
        return Formula::forall(f.quantified_vars(),
                               substitute_pred(f.children().front(), flavor));
    case Formula::Kind::Exists:
        return Formula::exists(f.quantified_vars(),
                               substitute_pred(f.children().front(), flavor));
    }
    throw EvalError("unreachable");
}

} // namespace

Formula function_range_axiom(FnFlavor flavor) {
    LinearTerm x = LinearTerm::var("x");
    if (flavor == FnFlavor::Nat)
        return Formula::forall({"x"}, Formula::atom(Atom::fn_le(x, 1)));
    return Formula::forall(
        {"x"}, Formula::conj({Formula::atom(Atom::fn_ge(x, 0)),
                              Formula::atom(Atom::fn_le(x, 1))}));
}

FnSubstitution predicate_to_function(const Formula& s, FnFlavor flavor) {
    return FnSubstitution{substitute_pred(s, flavor), function_range_axiom(flavor)};
}

// ------------------------------------------------------------------- SMT-LIB

std::string term_to_smtlib(const LinearTerm& t) {
    std::vector<std::string> parts;
    for (const auto& [v, c] : t.coeffs()) {
        if (c == 1)
            parts.push_back(v);
        else
            parts.push_back("(* " + std::to_string(c) + " " + v + ")");
    }
    if (t.constant_part() != 0 || parts.empty())
        parts.push_back(std::to_string(t.constant_part()));
    if (parts.size() == 1) return parts.front();
    std::string out = "(+";
    for (const auto& p : parts) out += " " + p;
    return out + ")";
}

namespace {

std::string atom_to_smtlib(const Atom& a) {
    switch (a.kind) {
    case Atom::Kind::Eq:
        return "(= " + term_to_smtlib(a.lhs) + " " + term_to_smtlib(a.rhs) + ")";
    case Atom::Kind::Le:
        return "(<= " + term_to_smtlib(a.lhs) + " " + term_to_smtlib(a.rhs) + ")";
    case Atom::Kind::Lt:
        return "(< " + term_to_smtlib(a.lhs) + " " + term_to_smtlib(a.rhs) + ")";
    case Atom::Kind::Pred:
        return "(P " + term_to_smtlib(a.lhs) + ")";
    case Atom::Kind::FnEq:
        return "(= (f " + term_to_smtlib(a.lhs) + ") " + std::to_string(a.value) + ")";
    case Atom::Kind::FnGt:
        return "(> (f " + term_to_smtlib(a.lhs) + ") " + std::to_string(a.value) + ")";
    case Atom::Kind::FnGe:
        return "(>= (f " + term_to_smtlib(a.lhs) + ") " + std::to_string(a.value) + ")";
    case Atom::Kind::FnLe:
        return "(<= (f " + term_to_smtlib(a.lhs) + ") " + std::to_string(a.value) + ")";
    case Atom::Kind::Bottom:
        return "false";
    }
    return "false";
}

std::string formula_to_smtlib(const Formula& f, const std::string& sort, bool guards) {
    switch (f.kind()) {
    case Formula::Kind::Atom:
        return atom_to_smtlib(f.as_atom());
    case Formula::Kind::Not:
        return "(not " + formula_to_smtlib(f.children().front(), sort, guards) + ")";
    case Formula::Kind::And:
    case Formula::Kind::Or: {
        std::string out = f.kind() == Formula::Kind::And ? "(and" : "(or";
        for (const auto& c : f.children())
            out += " " + formula_to_smtlib(c, sort, guards);
        return out + ")";
    }
    case Formula::Kind::Implies:
        return "(=> " + formula_to_smtlib(f.children()[0], sort, guards) + " " +
               formula_to_smtlib(f.children()[1], sort, guards) + ")";
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
        bool universal = f.kind() == Formula::Kind::Forall;
        std::string out = universal ? "(forall (" : "(exists (";
        for (const auto& v : f.quantified_vars()) out += "(" + v + " " + sort + ")";
        out += ") ";
        std::string body = formula_to_smtlib(f.children().front(), sort, guards);
        if (guards) {
            std::string g;
            for (const auto& v : f.quantified_vars()) g += " (>= " + v + " 0)";
            if (f.quantified_vars().size() > 1) g = "(and" + g + ")";
            else g = g.substr(1);
            body = universal ? "(=> " + g + " " + body + ")"
                             : "(and " + g + " " + body + ")";
        }
        return out + body + ")";
    }
    }
    return "false";
}

} // namespace

std::string to_smtlib(const std::vector<Formula>& sentences, const SmtMeta& meta) {
    bool any_pred = false, any_fn = false;
    std::set<Var> consts;
    for (const auto& s : sentences) {
        struct Scan {
            bool* pred;
            bool* fn;
            void visit(const Formula& f) {
                if (f.kind() == Formula::Kind::Atom) {
                    if (f.as_atom().uses_pred()) *pred = true;
                    if (f.as_atom().uses_fn()) *fn = true;
                }
                for (const auto& c : f.children()) visit(c);
            }
        } scan{&any_pred, &any_fn};
        scan.visit(s);
        auto fv = s.free_vars();
        consts.insert(fv.begin(), fv.end());
    }
    if (any_pred && any_fn)
        throw EvalError("sentence set mixes P and f");

    std::ostringstream out;
    char hash_hex[32];
    std::snprintf(hash_hex, sizeof hash_hex, "%016llx",
                  static_cast<unsigned long long>(meta.machine_hash));
    out << "; variant: " << meta.variant_name << "\n";
    out << "; machine: " << hash_hex << "\n";
    out << "(set-logic " << (meta.real_domain ? "UFLRA" : "UFLIA") << ")\n";
    const std::string sort = meta.real_domain ? "Real" : "Int";
    if (meta.uses_function || any_fn)
        out << "(declare-fun f (" << sort << ") " << sort << ")\n";
    else
        out << "(declare-fun P (" << sort << ") Bool)\n";
    if (meta.declare_d_e) {
        out << "(declare-const d " << sort << ")\n";
        out << "(declare-const e " << sort << ")\n";
    } else if (!consts.empty()) {
        throw EvalError("free variables without declared constants");
    }
    const bool guards = !meta.real_domain;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (i < meta.names.size()) out << "; " << meta.names[i] << "\n";
        out << "(assert " << formula_to_smtlib(sentences[i], sort, guards) << ")\n";
    }
    out << "(check-sat)\n";
    return out.str();
}

} // namespace cm2pa::logic
