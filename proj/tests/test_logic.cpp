#include "doctest.h"

#include <algorithm>
#include <cctype>
#include <random>
#include <string>

#include "cm2pa/encoder.hpp"
#include "cm2pa/logic.hpp"
#include "cm2pa/machine.hpp"

using namespace cm2pa;
using namespace cm2pa::logic;

namespace {

LinearTerm T(Nat c) { return LinearTerm::constant(c); }
LinearTerm V(const char* v, Nat k = 1) { return LinearTerm::var(v, k); }

encoder::EncodingResult enc(const char* text, encoder::Variant v,
                            Nat m = 0, Nat n = 0) {
    return encoder::encode(machine::parse_program(text), m, n, v);
}

const logic::Formula& sentence(const encoder::EncodingResult& e,
                               const std::string& name) {
    for (const auto& s : e.sentences)
        if (s.name == name) return s.formula;
    REQUIRE_MESSAGE(false, "no sentence named " << name);
    static logic::Formula dummy = logic::Formula::atom(Atom::bottom());
    return dummy;
}

} // namespace

TEST_CASE("normalize_term: coefficient merge") {
    // x+x+x+1+1 -> 3x+2
    LinearTerm t = normalize_term({Var("x"), Var("x"), Var("x"), Nat(1), Nat(1)});
    CHECK(t == V("x", 3) + 2);
    CHECK(t.str() == "3x + 2");
}

TEST_CASE("normalize_term: empty sum is the constant 0") {
    LinearTerm t = normalize_term({});
    CHECK(t.is_constant());
    CHECK(t.constant_part() == 0);
    CHECK(t.str() == "0");
}

TEST_CASE("normalize_term: mixed variables") {
    // 6x + y + 1
    LinearTerm t = normalize_term(
        {Var("x"), Var("x"), Var("x"), Var("x"), Var("x"), Var("x"), Var("y"), Nat(1)});
    CHECK(t.coeffs().at("x") == 6);
    CHECK(t.coeffs().at("y") == 1);
    CHECK(t.constant_part() == 1);
}

TEST_CASE("eval_term examples") {
    Env env = {{"x", 28}, {"z", 87}};
    CHECK((V("x", 9) + V("z") + 1).eval(env) == 340);
    CHECK(T(5).eval({}) == 5);
    CHECK(V("x", 4).eval({{"x", 7}}) == 28);
    CHECK_THROWS_AS(V("y").eval(env), EvalError);
}

TEST_CASE("env lookup: innermost binding shadows outer ones") {
    Env env = {{"x", 1}, {"x", 9}};
    CHECK(lookup(env, "x") == 9);
    CHECK(V("x").eval(env) == 9);
}

TEST_CASE("to_cnf: distribution of conjunction over implication") {
    // forall x. A & B -> C & D with literal atoms
    Formula a = Formula::atom(Atom::pred(V("x")));
    Formula b = Formula::atom(Atom::pred(V("x") + 1));
    Formula c = Formula::atom(Atom::pred(V("x") + 2));
    Formula d = Formula::atom(Atom::pred(V("x") + 3));
    Formula s = Formula::forall(
        {"x"}, Formula::implies(Formula::conj({a, b}), Formula::conj({c, d})));
    ClauseSet cs = to_cnf(s);
    REQUIRE(cs.clauses.size() == 2);
    for (const auto& cl : cs.clauses) {
        REQUIRE(cl.size() == 3);
        CHECK(std::count_if(cl.begin(), cl.end(),
                            [](const Literal& l) { return !l.positive; }) == 2);
        CHECK(std::count_if(cl.begin(), cl.end(),
                            [](const Literal& l) { return l.positive; }) == 1);
    }
}

TEST_CASE("to_cnf: tautology elimination") {
    Formula p = Formula::atom(Atom::pred(V("x")));
    Formula s = Formula::forall({"x"}, Formula::implies(p, p));
    CHECK(to_cnf(s).clauses.empty());
}

TEST_CASE("to_cnf: rejects existential quantifiers") {
    Formula s = Formula::exists({"x"}, Formula::atom(Atom::pred(V("x"))));
    CHECK_THROWS_AS(to_cnf(s), EvalError);
}

TEST_CASE("to_cnf: standard inc scheme yields 6 clauses of 17 literals") {
    // inc c1 at line 1, so the chi literal does not collide with the chunk
    // delimiter literals: the premise has 16 distinct literals, the
    // consequent 6, distribution gives 6 clauses of 16+1 literals.
    auto e = enc("0: inc c2\n1: inc c1\n2: halt\n", encoder::Variant::Standard);
    ClauseSet cs = to_cnf(sentence(e, "instr.1"));
    REQUIRE(cs.clauses.size() == 6);
    for (const auto& cl : cs.clauses) CHECK(cl.size() == 17);
}

TEST_CASE("to_cnf: chi_0 collides with the chunk delimiter literal") {
    // At line 0 the premise literal P(x+5) occurs both in phiChunk(x) and in
    // chi_0(x); duplicate literals merge, leaving 16 literals per clause.
    auto e = enc("0: inc c1\n1: halt\n", encoder::Variant::Standard);
    ClauseSet cs = to_cnf(sentence(e, "instr.0"));
    REQUIRE(cs.clauses.size() == 6);
    for (const auto& cl : cs.clauses) CHECK(cl.size() == 16);
}

TEST_CASE("to_cnf: function-substituted inc scheme is 16 negative + 1 positive") {
    auto e = enc("0: inc c2\n1: inc c1\n2: halt\n", encoder::Variant::FnHornNat);
    ClauseSet cs = to_cnf(sentence(e, "instr.1"));
    REQUIRE(cs.clauses.size() == 6);
    for (const auto& cl : cs.clauses) {
        CHECK(std::count_if(cl.begin(), cl.end(),
                            [](const Literal& l) { return !l.positive; }) == 16);
        CHECK(std::count_if(cl.begin(), cl.end(),
                            [](const Literal& l) { return l.positive; }) == 1);
    }
}

TEST_CASE("is_horn: examples") {
    // Function-variant standard encoding of M_inc is Horn.
    auto e = enc("0: inc c1\n1: halt\n", encoder::Variant::FnHornNat);
    for (const auto& s : e.sentences) CHECK(is_horn(to_cnf(s.formula)));

    // ~A | B | C has two positive literals.
    ClauseSet two_pos;
    two_pos.clauses.push_back({{false, Atom::pred(T(0))},
                               {true, Atom::pred(T(1))},
                               {true, Atom::pred(T(2))}});
    CHECK_FALSE(is_horn(two_pos));

    // Nondeterministic branch encoding loses Horn even after substitution.
    auto nd = enc("0: inc c1 -> 0 | 1\n1: halt\n",
                  encoder::Variant::NondetRecurrence);
    bool some_non_horn = false;
    for (const auto& s : nd.sentences) {
        if (s.formula.contains_exists()) continue; // phi5 has no CNF
        auto sub = predicate_to_function(s.formula, FnFlavor::Nat);
        if (!is_horn(to_cnf(sub.formula))) some_non_horn = true;
    }
    CHECK(some_non_horn);
}

TEST_CASE("is_horn: invariant under clause and literal reordering") {
    auto e = enc("0: inc c1\n1: halt\n", encoder::Variant::FnHornNat);
    ClauseSet cs = to_cnf(sentence(e, "instr.0"));
    ClauseSet shuffled = cs;
    std::mt19937 rng(42);
    std::shuffle(shuffled.clauses.begin(), shuffled.clauses.end(), rng);
    for (auto& cl : shuffled.clauses) std::shuffle(cl.begin(), cl.end(), rng);
    CHECK(is_horn(cs) == is_horn(shuffled));
}

TEST_CASE("max_vars_per_clause: examples") {
    auto tv = enc("0: inc c1\n1: halt\n", encoder::Variant::TwoVar);
    std::size_t worst = 0;
    for (const auto& s : tv.sentences)
        worst = std::max(worst, max_vars_per_clause(to_cnf(s.formula)));
    CHECK(worst == 2);

    ClauseSet ground;
    ground.clauses.push_back({{true, Atom::pred(T(3))}});
    CHECK(max_vars_per_clause(ground) == 0);

    auto st = enc("0: inc c1\n1: halt\n", encoder::Variant::Standard);
    CHECK(max_vars_per_clause(to_cnf(sentence(st, "instr.0"))) == 3);
}

TEST_CASE("predicate_to_function: substitution rules") {
    // P(3) (Nat) -> f(3) = 1
    Formula p3 = Formula::atom(Atom::pred(T(3)));
    auto nat = predicate_to_function(p3, FnFlavor::Nat);
    CHECK(nat.formula.kind() == Formula::Kind::Atom);
    CHECK(nat.formula.as_atom() == Atom::fn_eq(T(3), 1));

    // ~P(t+1) (Real) -> f(t+1) = 0
    Formula np = Formula::negate(Formula::atom(Atom::pred(V("t") + 1)));
    auto real = predicate_to_function(np, FnFlavor::Real);
    CHECK(real.formula.kind() == Formula::Kind::Atom);
    CHECK(real.formula.as_atom() == Atom::fn_eq(V("t") + 1, 0));

    // P(t) (Real) -> f(t) > 0
    auto realp = predicate_to_function(Formula::atom(Atom::pred(V("t"))),
                                       FnFlavor::Real);
    CHECK(realp.formula.as_atom() == Atom::fn_gt(V("t"), 0));

    // P-free formula is unchanged.
    Formula arith = Formula::forall(
        {"x"}, Formula::atom(Atom::le(V("x"), V("x") + 1)));
    auto same = predicate_to_function(arith, FnFlavor::Nat);
    CHECK(same.formula.str() == arith.str());
}

TEST_CASE("function_range_axiom renderings") {
    CHECK(function_range_axiom(FnFlavor::Nat).str() == "forall x. f(x) <= 1");
    Formula real_ax = function_range_axiom(FnFlavor::Real);
    CHECK(real_ax.str().find("f(x) >= 0") != std::string::npos);
    CHECK(real_ax.str().find("f(x) <= 1") != std::string::npos);
}

TEST_CASE("to_smtlib: direct syntax examples") {
    Formula end3 = encoder::macro(encoder::MacroKind::End, T(3));
    SmtMeta meta;
    std::string script = to_smtlib({end3}, meta);
    CHECK(script.find("(and (P 3) (not (P 4)))") != std::string::npos);
    CHECK(script.find("(set-logic UFLIA)") != std::string::npos);
    CHECK(script.find("(declare-fun P (Int) Bool)") != std::string::npos);
    CHECK(script.find("(check-sat)") != std::string::npos);

    CHECK(term_to_smtlib(V("x", 3) + 2) == "(+ (* 3 x) 2)");
    CHECK(term_to_smtlib(T(7)) == "7");
    CHECK(term_to_smtlib(V("x")) == "x");
}

TEST_CASE("to_smtlib: fixed-width declares d and e") {
    auto e = enc("0: inc c1\n1: halt\n", encoder::Variant::FixedWidth);
    SmtMeta meta;
    meta.variant_name = encoder::variant_name(e.variant);
    meta.declare_d_e = true;
    std::vector<Formula> fs;
    for (const auto& s : e.sentences) fs.push_back(s.formula);
    std::string script = to_smtlib(fs, meta);
    CHECK(script.find("(declare-const d Int)") != std::string::npos);
    CHECK(script.find("(declare-const e Int)") != std::string::npos);
}

TEST_CASE("to_smtlib: quantified Int variables are guarded nonnegative") {
    Formula s = Formula::forall({"x"}, Formula::atom(Atom::pred(V("x"))));
    std::string script = to_smtlib({s}, SmtMeta{});
    CHECK(script.find("(>= x 0)") != std::string::npos);
}

TEST_CASE("to_smtlib: mixing P and f is rejected") {
    Formula p = Formula::atom(Atom::pred(T(0)));
    Formula f = Formula::atom(Atom::fn_eq(T(0), 1));
    CHECK_THROWS_AS(to_smtlib({p, f}, SmtMeta{}), EvalError);
}

TEST_CASE("property: normalize_term preserves eval under random environments") {
    std::mt19937 rng(1234);
    std::uniform_int_distribution<int> len_dist(0, 10);
    std::uniform_int_distribution<int> pick(0, 3);
    std::uniform_int_distribution<Nat> num(0, 9);
    const Var names[3] = {"x", "y", "z"};
    for (int trial = 0; trial < 1200; ++trial) {
        std::vector<RawSummand> raw;
        int len = len_dist(rng);
        for (int i = 0; i < len; ++i) {
            int p = pick(rng);
            if (p == 3)
                raw.emplace_back(num(rng));
            else
                raw.emplace_back(names[p]);
        }
        Env env = {{"x", num(rng)}, {"y", num(rng)}, {"z", num(rng)}};
        Nat direct = 0;
        for (const auto& s : raw) {
            if (std::holds_alternative<Nat>(s))
                direct += std::get<Nat>(s);
            else
                direct += *lookup(env, std::get<Var>(s));
        }
        CHECK(normalize_term(raw).eval(env) == direct);
    }
}

namespace {

// Minimal reparser for the term fragment emitted by term_to_smtlib:
//   term := numeral | symbol | (* numeral symbol) | (+ term ... term)
struct SexpParser {
    const std::string& s;
    std::size_t pos = 0;

    explicit SexpParser(const std::string& text) : s(text) {}

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    std::string token() {
        skip();
        std::size_t start = pos;
        while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) &&
               s[pos] != '(' && s[pos] != ')')
            ++pos;
        return s.substr(start, pos - start);
    }

    LinearTerm parse() {
        skip();
        REQUIRE(pos < s.size());
        if (s[pos] == '(') {
            ++pos;
            std::string op = token();
            if (op == "*") {
                std::string k = token();
                std::string v = token();
                skip();
                REQUIRE(s[pos] == ')');
                ++pos;
                return LinearTerm::var(v, std::stoull(k));
            }
            REQUIRE(op == "+");
            LinearTerm acc;
            while (true) {
                skip();
                if (s[pos] == ')') {
                    ++pos;
                    return acc;
                }
                acc = acc + parse();
            }
        }
        std::string tok = token();
        REQUIRE(!tok.empty());
        if (std::isdigit(static_cast<unsigned char>(tok[0])))
            return LinearTerm::constant(std::stoull(tok));
        return LinearTerm::var(tok);
    }
};

} // namespace

TEST_CASE("property: emitted SMT terms reparse to the same LinearTerm") {
    std::mt19937 rng(99);
    std::uniform_int_distribution<Nat> coeff(0, 12);
    std::uniform_int_distribution<Nat> cst(0, 50);
    for (int trial = 0; trial < 300; ++trial) {
        LinearTerm t = LinearTerm::constant(cst(rng));
        if (Nat k = coeff(rng); k > 0) t = t + V("x", k);
        if (Nat k = coeff(rng); k > 0) t = t + V("y", k);
        if (Nat k = coeff(rng); k > 0) t = t + V("z", k);
        std::string text = term_to_smtlib(t);
        SexpParser parser(text);
        LinearTerm back = parser.parse();
        CHECK(back == t);
        parser.skip();
        CHECK(parser.pos == text.size());
    }
}
