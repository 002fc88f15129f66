#include "doctest.h"

#include <random>

#include "cm2pa/checker.hpp"
#include "cm2pa/encoder.hpp"
#include "cm2pa/machine.hpp"
#include "cm2pa/model.hpp"

using namespace cm2pa;
using namespace cm2pa::checker;
using machine::Configuration;

namespace {

machine::Program parse(const char* text) { return machine::parse_program(text); }

const char* kMInc = "0: inc c1\n1: halt\n";

model::BitModel m_inc_model(std::size_t chunks) {
    machine::Program p = parse(kMInc);
    machine::Run r = machine::run(p, 0, 0, 10);
    auto cfgs = machine::extend_halting(p, r, chunks);
    return model::build_canonical(cfgs, 7);
}

logic::LinearTerm T(Nat c) { return logic::LinearTerm::constant(c); }
logic::LinearTerm V(const char* v, Nat k = 1) { return logic::LinearTerm::var(v, k); }

const logic::Formula& sentence(const encoder::EncodingResult& e,
                               const std::string& name) {
    for (const auto& s : e.sentences)
        if (s.name == name) return s.formula;
    REQUIRE_MESSAGE(false, "no sentence named " << name);
    static logic::Formula dummy = logic::Formula::atom(logic::Atom::bottom());
    return dummy;
}

} // namespace

TEST_CASE("required_length examples") {
    CHECK(required_length(112) == 1800);
    CHECK(required_length(0) == 8);
    CHECK(required_length(448) == 7176);
}

TEST_CASE("eval_ground: end markers on the M_inc canonical model") {
    model::BitModel m = m_inc_model(3);
    CHECK(eval_ground(encoder::macro(encoder::MacroKind::End, T(12)), m));
    CHECK(eval_ground(encoder::chi(1, T(28)), m)); // bits 34=1, 35=0
    CHECK(eval_ground(logic::Formula::atom(logic::Atom::le(T(3), T(3))), m));
    CHECK_FALSE(eval_ground(logic::Formula::atom(logic::Atom::lt(T(3), T(3))), m));
}

TEST_CASE("eval_ground: rejects quantifiers and out-of-range access") {
    model::BitModel m = m_inc_model(2);
    logic::Formula q =
        logic::Formula::forall({"x"}, logic::Formula::atom(logic::Atom::pred(V("x"))));
    CHECK_THROWS_AS(eval_ground(q, m), EvalError);
    logic::Formula far = logic::Formula::atom(logic::Atom::pred(T(100000)));
    CHECK_THROWS_AS(eval_ground(far, m), AccessError);
    logic::Formula unbound = logic::Formula::atom(logic::Atom::pred(V("x")));
    CHECK_THROWS_AS(eval_ground(unbound, m), EvalError);
}

TEST_CASE("check_bounded: phi2 of M_inc is Satisfied") {
    model::BitModel m = m_inc_model(3);
    auto e = encoder::encode(parse(kMInc), 0, 0, encoder::Variant::Standard);
    CheckerConfig cfg;
    cfg.outer_bound = 112;
    cfg.inner_bound = 112;
    Verdict v = check_bounded(sentence(e, "phi2"), m, cfg);
    CHECK(v.status == Status::Satisfied);
}

TEST_CASE("check_bounded: phi4 of M_inc is Violated at x = 28") {
    model::BitModel m = m_inc_model(3);
    auto e = encoder::encode(parse(kMInc), 0, 0, encoder::Variant::Standard);
    CheckerConfig cfg;
    cfg.outer_bound = 112;
    cfg.inner_bound = 112;
    Verdict v = check_bounded(sentence(e, "phi4"), m, cfg);
    REQUIRE(v.status == Status::Violated);
    REQUIRE(v.witness.size() == 1);
    CHECK(v.witness[0].first == "x");
    CHECK(v.witness[0].second == 28);
    CHECK(v.failing_literal == "~(P(34) & ~P(35))"); // ~chi_1(28)
}

TEST_CASE("check_bounded: unsatisfiable antecedent over N") {
    model::BitModel m = m_inc_model(2);
    logic::Formula s = logic::Formula::forall(
        {"x"}, logic::Formula::implies(
                   logic::Formula::atom(logic::Atom::eq(V("x") + 1, T(0))),
                   logic::Formula::atom(logic::Atom::bottom())));
    CheckerConfig cfg;
    cfg.outer_bound = 1000;
    Verdict v = check_bounded(s, m, cfg);
    CHECK(v.status == Status::Satisfied);
}

TEST_CASE("check_bounded: phi5 on a recurring nondeterministic run") {
    machine::Program p = parse("0: inc c1 -> 0 | 1\n1: halt\n");
    std::vector<int> choices = {0, 0};
    machine::Run r = machine::run(p, 0, 0, 2, choices);
    REQUIRE(!r.halted_at.has_value());
    model::BitModel m = model::build_canonical(r.configs, 7);

    auto e = encoder::encode(p, 0, 0, encoder::Variant::NondetRecurrence);
    CheckerConfig cfg;
    cfg.outer_bound = model::chunk_start(2, 7);  // 112
    cfg.inner_bound = model::chunk_start(3, 7);  // 448
    Verdict v = check_bounded(sentence(e, "phi5"), m, cfg);
    CHECK(v.status == Status::BoundedSatisfied);
}

TEST_CASE("check_bounded: exists without a bounded witness is reported") {
    model::BitModel m = m_inc_model(2);
    // exists y. y = 1000 has no witness below B_e = 10.
    logic::Formula s = logic::Formula::exists(
        {"y"}, logic::Formula::atom(logic::Atom::eq(V("y"), T(1000))));
    CheckerConfig cfg;
    cfg.outer_bound = 10;
    cfg.inner_bound = 10;
    Verdict v = check_bounded(s, m, cfg);
    CHECK(v.status == Status::Violated);
    CHECK(v.failing_literal.find("no witness within bound") != std::string::npos);
}

TEST_CASE("violation persistence: larger bounds keep the same witness") {
    model::BitModel m = m_inc_model(3);
    auto e = encoder::encode(parse(kMInc), 0, 0, encoder::Variant::Standard);
    for (Nat b : {Nat(112), Nat(200), Nat(448)}) {
        CheckerConfig cfg;
        cfg.outer_bound = b;
        cfg.inner_bound = b;
        Verdict v = check_bounded(sentence(e, "phi4"), m, cfg);
        REQUIRE(v.status == Status::Violated);
        CHECK(v.witness[0].second == 28);
    }
}

TEST_CASE("violation soundness: witnesses re-evaluate to false") {
    model::BitModel m = m_inc_model(3);
    auto e = encoder::encode(parse(kMInc), 0, 0, encoder::Variant::Standard);
    CheckerConfig cfg;
    cfg.outer_bound = 448;
    cfg.inner_bound = 448;
    for (const auto& s : e.sentences) {
        Verdict v = check_bounded(s.formula, m, cfg);
        if (v.status != Status::Violated) continue;
        REQUIRE(s.formula.kind() == logic::Formula::Kind::Forall);
        CHECK_FALSE(eval_ground(s.formula.children()[0], m, v.witness));
    }
}

TEST_CASE("halting equivalence at desk scale") {
    const char* corpus[] = {
        "0: halt\n",
        kMInc,
        "0: inc c1\n1: tdec c2 0\n2: halt\n",
        "0: tdec c1 1\n1: halt\n",
        "0: inc c1\n1: tdec c1 3\n2: inc c2\n3: halt\n",
    };
    for (const char* text : corpus) {
        machine::Program p = parse(text);
        Nat d = encoder::compute_d(p, 0, 0);
        auto e = encoder::encode(p, 0, 0, encoder::Variant::Standard);
        for (std::size_t h = 2; h <= 4; ++h) {
            machine::Run r = machine::run(p, 0, 0, h - 1);
            std::vector<Configuration> cfgs =
                r.halted_at.has_value() ? machine::extend_halting(p, r, h) : r.configs;
            REQUIRE(cfgs.size() == h);
            model::BitModel m = model::build_canonical(cfgs, d);
            CheckerConfig cfg;
            cfg.outer_bound = model::chunk_start(h, d);
            cfg.inner_bound = cfg.outer_bound;
            Report rep = check_report(e, m, cfg);

            bool halted = r.halted_at.has_value();
            bool phi4_violated = false;
            for (const auto& sr : rep.sentences) {
                if (sr.name == "phi4" && sr.verdict.status == Status::Violated) {
                    phi4_violated = true;
                    // Witness: the first chunk whose configuration sits on
                    // line K, which is the chunk entered on the halting step.
                    CHECK(sr.verdict.witness[0].second ==
                          model::chunk_start(*r.halted_at, d));
                } else {
                    CHECK(sr.verdict.status == Status::Satisfied);
                }
            }
            CHECK_MESSAGE(phi4_violated == halted,
                          text << " at horizon " << h << ": " << rep.summary);
        }
    }
}

namespace {

// Literal-level ground evaluation used to cross-check CNF against the
// original sentence under random environments.
bool eval_clause(const logic::Clause& c, const model::BitModel& m,
                 const logic::Env& env) {
    for (const auto& lit : c) {
        logic::Formula f = logic::Formula::atom(lit.atom);
        bool val = eval_ground(f, m, env);
        if (val == lit.positive) return true;
    }
    return false;
}

} // namespace

TEST_CASE("property: CNF clause instances agree with the sentence instance") {
    // Needs a long model: terms reach 16*200+8 = 3208 < length of 5 chunks.
    model::BitModel m = m_inc_model(5);
    auto e = encoder::encode(parse(kMInc), 0, 0, encoder::Variant::Standard);
    std::mt19937 rng(2024);
    std::uniform_int_distribution<Nat> val(0, 200);
    for (const auto& s : e.sentences) {
        if (s.formula.kind() != logic::Formula::Kind::Forall) continue;
        logic::ClauseSet cs = logic::to_cnf(s.formula);
        const auto& vars = s.formula.quantified_vars();
        for (int trial = 0; trial < 120; ++trial) {
            logic::Env env;
            for (const auto& v : vars) env.emplace_back(v, val(rng));
            bool direct = eval_ground(s.formula.children()[0], m, env);
            bool via_cnf = true;
            for (const auto& cl : cs.clauses)
                if (!eval_clause(cl, m, env)) via_cnf = false;
            CHECK(direct == via_cnf);
        }
    }
}

TEST_CASE("CNF/formula agreement of bounded verdicts") {
    model::BitModel m = m_inc_model(3);
    auto e = encoder::encode(parse(kMInc), 0, 0, encoder::Variant::Standard);
    CheckerConfig cfg;
    cfg.outer_bound = 112;
    cfg.inner_bound = 112;
    for (const auto& s : e.sentences) {
        Verdict direct = check_bounded(s.formula, m, cfg);
        logic::ClauseSet cs = logic::to_cnf(s.formula);
        bool clauses_ok = true;
        for (const auto& cl : cs.clauses) {
            Verdict cv = check_bounded(logic::clause_to_formula(cl), m, cfg);
            if (cv.status == Status::Violated) clauses_ok = false;
        }
        CHECK((direct.status == Status::Satisfied) == clauses_ok);
    }
}

TEST_CASE("FnHornNat agreement: f(n) = bit n yields identical verdicts") {
    model::BitModel m = m_inc_model(3);
    auto std_enc = encoder::encode(parse(kMInc), 0, 0, encoder::Variant::Standard);
    auto fn_enc = encoder::encode(parse(kMInc), 0, 0, encoder::Variant::FnHornNat);
    CheckerConfig cfg;
    cfg.outer_bound = 112;
    cfg.inner_bound = 112;
    Report std_rep = check_report(std_enc, m, cfg);
    Report fn_rep = check_report(fn_enc, m, cfg);
    for (const auto& sr : std_rep.sentences) {
        for (const auto& fr : fn_rep.sentences) {
            if (fr.name != sr.name) continue;
            CHECK(fr.verdict.status == sr.verdict.status);
            CHECK(fr.verdict.witness == sr.verdict.witness);
        }
    }
    // The range axiom holds of any 0/1 model.
    CHECK(fn_rep.sentences[0].name == "range");
    CHECK(fn_rep.sentences[0].verdict.status == Status::Satisfied);
}

TEST_CASE("parallel checking matches serial checking") {
    model::BitModel m = m_inc_model(3);
    auto e = encoder::encode(parse(kMInc), 0, 0, encoder::Variant::Standard);
    CheckerConfig serial;
    serial.outer_bound = 448;
    serial.inner_bound = 448;
    CheckerConfig parallel = serial;
    parallel.jobs = 4;
    for (const auto& s : e.sentences) {
        Verdict a = check_bounded(s.formula, m, serial);
        Verdict b = check_bounded(s.formula, m, parallel);
        CHECK(a.status == b.status);
        CHECK(a.witness == b.witness);
        CHECK(a.failing_literal == b.failing_literal);
        CHECK(a.skipped == b.skipped);
    }
}

TEST_CASE("fixed-width report with instantiated d and e") {
    std::vector<Configuration> cfgs = {{0, 0, 0}, {1, 1, 0}};
    model::BitModel m = model::build_fixed_width(cfgs, 7, 1);
    auto e = encoder::encode(parse(kMInc), 0, 0, encoder::Variant::FixedWidth);
    CheckerConfig cfg;
    cfg.outer_bound = 3 * 7 * 2;
    cfg.inner_bound = cfg.outer_bound;
    cfg.base = {{"d", 7}, {"e", 21}};
    Report rep = check_report(e, m, cfg);
    CHECK_MESSAGE(rep.all_satisfied(), rep.summary);
}

TEST_CASE("report summary and status names") {
    model::BitModel m = m_inc_model(3);
    auto e = encoder::encode(parse(kMInc), 0, 0, encoder::Variant::Standard);
    CheckerConfig cfg;
    cfg.outer_bound = 448;
    cfg.inner_bound = 448;
    Report rep = check_report(e, m, cfg);
    CHECK(rep.summary == "first violation: phi4");
    CHECK_FALSE(rep.all_satisfied());
    CHECK(rep.bound == 448);
    CHECK(rep.model_length == m.length());
    CHECK(status_name(Status::Satisfied) == "satisfied");
    CHECK(status_name(Status::BoundedSatisfied) == "bounded-satisfied");
    CHECK(status_name(Status::Violated) == "violated");
}

TEST_CASE("skipped instantiations are counted, not fabricated") {
    // On a 2-chunk model the propagation sentence phi1.3 runs off the bit
    // string when x is the bare final delimiter; that environment must be
    // skipped and counted rather than evaluated as false.
    model::BitModel m = m_inc_model(2);
    auto e = encoder::encode(parse(kMInc), 0, 0, encoder::Variant::Standard);
    CheckerConfig cfg;
    cfg.outer_bound = model::chunk_start(2, 7);
    cfg.inner_bound = cfg.outer_bound;
    Verdict v = check_bounded(sentence(e, "phi1.3"), m, cfg);
    CHECK(v.status == Status::Satisfied);
    CHECK(v.skipped == 1);
}
