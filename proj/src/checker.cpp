#include "cm2pa/checker.hpp"

#include <algorithm>
#include <optional>
#include <thread>

namespace cm2pa::checker {

using logic::Atom;
using logic::Env;
using logic::Formula;
using logic::Var;
using model::BitModel;

Nat required_length(Nat B) { return 16 * B + 8; }

std::string status_name(Status s) {
    switch (s) {
    case Status::Satisfied: return "satisfied";
    case Status::BoundedSatisfied: return "bounded-satisfied";
    case Status::Violated: return "violated";
    }
    return "?";
}

bool Report::all_satisfied() const {
    return std::none_of(sentences.begin(), sentences.end(), [](const SentenceReport& s) {
        return s.verdict.status == Status::Violated;
    });
}

namespace {

struct Ctx {
    const BitModel& m;
    const CheckerConfig& cfg;
};

int read_bit(const Ctx& ctx, Nat i) {
    if (ctx.cfg.access_limit && i >= ctx.cfg.access_limit)
        throw AccessError("P-access at " + std::to_string(i) + " beyond access limit " +
                          std::to_string(ctx.cfg.access_limit));
    return ctx.m.bit(i);
}

bool eval_atom(const Atom& a, const Ctx& ctx, const Env& env) {
    switch (a.kind) {
    case Atom::Kind::Eq: return a.lhs.eval(env) == a.rhs.eval(env);
    case Atom::Kind::Le: return a.lhs.eval(env) <= a.rhs.eval(env);
    case Atom::Kind::Lt: return a.lhs.eval(env) < a.rhs.eval(env);
    case Atom::Kind::Pred: return read_bit(ctx, a.lhs.eval(env)) == 1;
    // The induced function interprets f(n) as bit n.
    case Atom::Kind::FnEq: return static_cast<Nat>(read_bit(ctx, a.lhs.eval(env))) == a.value;
    case Atom::Kind::FnGt: return static_cast<Nat>(read_bit(ctx, a.lhs.eval(env))) > a.value;
    case Atom::Kind::FnGe: return static_cast<Nat>(read_bit(ctx, a.lhs.eval(env))) >= a.value;
    case Atom::Kind::FnLe: return static_cast<Nat>(read_bit(ctx, a.lhs.eval(env))) <= a.value;
    case Atom::Kind::Bottom: return false;
    }
    throw EvalError("bad atom kind");
}

struct Violation {
    Env witness;
    std::string failing_literal;
};

bool eval_rec(const Formula& f, const Ctx& ctx, Env& env, Nat& skipped);

void flatten_conj(const Formula& f, std::vector<Formula>& out) {
    if (f.kind() == Formula::Kind::And) {
        for (const auto& k : f.children()) flatten_conj(k, out);
    } else {
        out.push_back(f);
    }
}

/// Pruned lexicographic enumeration of a universal block. The antecedent of
/// an implication body is flattened into conjuncts, each evaluated as soon as
/// its variables are bound; a false or out-of-range conjunct discards the
/// whole subtree (out-of-range ones are counted as skipped).
struct ForallEnum {
    const Ctx& ctx;
    std::vector<Var> vars;
    std::vector<Formula> ante;          // conjuncts of the antecedent
    std::vector<std::vector<std::size_t>> due; // conjuncts ready at each depth
    std::vector<std::size_t> pre;       // conjuncts with no quantified variable
    Formula consequent;
    bool want_witness = false;

    ForallEnum(const Ctx& c, std::vector<Var> vs, const Formula& body)
        : ctx(c), vars(std::move(vs)), consequent(body) {
        if (body.kind() == Formula::Kind::Implies) {
            flatten_conj(body.children()[0], ante);
            consequent = body.children()[1];
        }
        due.resize(vars.size());
        for (std::size_t i = 0; i < ante.size(); ++i) {
            std::set<Var> fv;
            ante[i].collect_free_vars(fv);
            std::size_t depth = 0;
            bool any = false;
            for (std::size_t k = 0; k < vars.size(); ++k)
                if (fv.count(vars[k])) {
                    depth = k;
                    any = true;
                }
            if (any)
                due[depth].push_back(i);
            else
                pre.push_back(i);
        }
    }

    // Returns the first violation in lexicographic order, if any.
    std::optional<Violation> run(Nat lo, Nat hi, Env& env, Nat& skipped) const {
        for (std::size_t i : pre) {
            try {
                if (!eval_rec(ante[i], ctx, env, skipped)) return std::nullopt;
            } catch (const AccessError&) {
                ++skipped;
                return std::nullopt;
            }
        }
        if (vars.empty()) {
            try {
                if (!eval_rec(consequent, ctx, env, skipped))
                    return make_violation(env, skipped);
            } catch (const AccessError&) {
                ++skipped;
            }
            return std::nullopt;
        }
        return descend(0, lo, hi, env, skipped);
    }

private:
    std::optional<Violation> descend(std::size_t depth, Nat lo, Nat hi, Env& env,
                                     Nat& skipped) const {
        for (Nat v = lo; v <= hi; ++v) {
            env.emplace_back(vars[depth], v);
            bool alive = true;
            for (std::size_t i : due[depth]) {
                try {
                    if (!eval_rec(ante[i], ctx, env, skipped)) {
                        alive = false;
                        break;
                    }
                } catch (const AccessError&) {
                    ++skipped;
                    alive = false;
                    break;
                }
            }
            if (alive) {
                if (depth + 1 == vars.size()) {
                    try {
                        if (!eval_rec(consequent, ctx, env, skipped)) {
                            auto viol = make_violation(env, skipped);
                            env.pop_back();
                            return viol;
                        }
                    } catch (const AccessError&) {
                        ++skipped;
                    }
                } else {
                    auto viol = descend(depth + 1, 0, ctx.cfg.outer_bound, env, skipped);
                    if (viol) {
                        env.pop_back();
                        return viol;
                    }
                }
            }
            env.pop_back();
        }
        return std::nullopt;
    }

    std::optional<Violation> make_violation(Env& env, Nat& skipped) const;
};

std::string explain(const Formula& f, const Ctx& ctx, Env& env, Nat& skipped) {
    switch (f.kind()) {
    case Formula::Kind::Atom:
        return f.str(env);
    case Formula::Kind::Not:
        return "~(" + f.children()[0].str(env) + ")";
    case Formula::Kind::And:
        for (const auto& k : f.children()) {
            try {
                if (!eval_rec(k, ctx, env, skipped))
                    return explain(k, ctx, env, skipped);
            } catch (const AccessError&) {
                break;
            }
        }
        return f.str(env);
    case Formula::Kind::Implies:
        return explain(f.children()[1], ctx, env, skipped);
    case Formula::Kind::Exists:
        return "no witness within bound for: " + f.str(env);
    default:
        return f.str(env);
    }
}

std::optional<Violation> ForallEnum::make_violation(Env& env, Nat& skipped) const {
    Violation v;
    v.witness.assign(env.begin() + (env.size() - vars.size()), env.end());
    v.failing_literal = explain(consequent, ctx, env, skipped);
    return v;
}

bool eval_exists(const std::vector<Var>& vars, std::size_t depth, const Formula& body,
                 const Ctx& ctx, Env& env, Nat& skipped) {
    if (depth == vars.size()) {
        try {
            return eval_rec(body, ctx, env, skipped);
        } catch (const AccessError&) {
            ++skipped;
            return false;
        }
    }
    for (Nat v = 0; v <= ctx.cfg.inner_bound; ++v) {
        env.emplace_back(vars[depth], v);
        bool found = eval_exists(vars, depth + 1, body, ctx, env, skipped);
        env.pop_back();
        if (found) return true;
    }
    return false;
}

bool eval_rec(const Formula& f, const Ctx& ctx, Env& env, Nat& skipped) {
    switch (f.kind()) {
    case Formula::Kind::Atom:
        return eval_atom(f.as_atom(), ctx, env);
    case Formula::Kind::Not:
        return !eval_rec(f.children()[0], ctx, env, skipped);
    case Formula::Kind::And: {
        // Quantifier-free conjuncts first: they are cheap and short-circuit
        // the expensive quantified ones.
        for (const auto& k : f.children())
            if (!k.contains_quantifier() && !eval_rec(k, ctx, env, skipped)) return false;
        for (const auto& k : f.children())
            if (k.contains_quantifier() && !eval_rec(k, ctx, env, skipped)) return false;
        return true;
    }
    case Formula::Kind::Or: {
        for (const auto& k : f.children())
            if (eval_rec(k, ctx, env, skipped)) return true;
        return false;
    }
    case Formula::Kind::Implies:
        return !eval_rec(f.children()[0], ctx, env, skipped) ||
               eval_rec(f.children()[1], ctx, env, skipped);
    case Formula::Kind::Forall: {
        ForallEnum fe(ctx, f.quantified_vars(), f.children()[0]);
        return !fe.run(0, ctx.cfg.outer_bound, env, skipped).has_value();
    }
    case Formula::Kind::Exists:
        return eval_exists(f.quantified_vars(), 0, f.children()[0], ctx, env, skipped);
    }
    throw EvalError("bad formula kind");
}

} // namespace

bool eval_ground(const Formula& f, const BitModel& m, const Env& env) {
    if (f.contains_quantifier())
        throw EvalError("eval_ground applied to a quantified formula");
    CheckerConfig cfg;
    Ctx ctx{m, cfg};
    Env e = env;
    Nat skipped = 0;
    return eval_rec(f, ctx, e, skipped);
}

bool eval_bounded(const Formula& f, const BitModel& m, const CheckerConfig& cfg,
                  const Env& env, Nat* skipped) {
    Ctx ctx{m, cfg};
    Env e = cfg.base;
    e.insert(e.end(), env.begin(), env.end());
    Nat local = 0;
    bool r = eval_rec(f, ctx, e, local);
    if (skipped) *skipped += local;
    return r;
}

Verdict check_bounded(const Formula& s, const BitModel& m, const CheckerConfig& cfg) {
    Ctx ctx{m, cfg};

    // Peel the universal prefix for pruned, witness-producing enumeration.
    Formula body = s;
    std::vector<Var> prefix;
    while (body.kind() == Formula::Kind::Forall) {
        const auto& vs = body.quantified_vars();
        prefix.insert(prefix.end(), vs.begin(), vs.end());
        body = body.children()[0];
    }

    Verdict verdict;
    ForallEnum fe(ctx, prefix, body);

    std::optional<Violation> viol;
    Nat skipped = 0;
    const Nat B = cfg.outer_bound;
    const unsigned jobs = std::max(1u, cfg.jobs);
    if (prefix.empty() || jobs == 1 || B == 0) {
        Env env = cfg.base;
        viol = fe.run(0, B, env, skipped);
    } else {
        // Contiguous ranges of the outermost variable keep the merged result
        // identical to the serial lexicographic order.
        const unsigned n = static_cast<unsigned>(std::min<Nat>(jobs, B + 1));
        std::vector<std::optional<Violation>> viols(n);
        std::vector<Nat> skips(n, 0);
        std::vector<std::thread> threads;
        threads.reserve(n);
        const Nat per = (B + 1) / n, extra = (B + 1) % n;
        Nat lo = 0;
        for (unsigned t = 0; t < n; ++t) {
            const Nat size = per + (t < extra ? 1 : 0);
            const Nat hi = lo + size - 1;
            threads.emplace_back([&, t, lo, hi] {
                Env env = cfg.base;
                viols[t] = fe.run(lo, hi, env, skips[t]);
            });
            lo = hi + 1;
        }
        for (auto& th : threads) th.join();
        for (unsigned t = 0; t < n; ++t) {
            // Count skips only up to the violating range so the total matches
            // a serial scan, which stops at the first violation.
            skipped += skips[t];
            if (viols[t]) {
                viol = viols[t];
                break;
            }
        }
    }

    verdict.skipped = skipped;
    if (viol) {
        verdict.status = Status::Violated;
        verdict.witness = std::move(viol->witness);
        verdict.failing_literal = std::move(viol->failing_literal);
    } else {
        verdict.status = s.contains_exists() ? Status::BoundedSatisfied : Status::Satisfied;
    }
    return verdict;
}

Report check_report(const encoder::EncodingResult& enc, const BitModel& m,
                    const CheckerConfig& cfg) {
    Report rep;
    rep.bound = cfg.outer_bound;
    rep.model_length = m.length();
    for (const auto& s : enc.sentences)
        rep.sentences.push_back({s.name, check_bounded(s.formula, m, cfg)});
    rep.summary = "all-satisfied";
    for (const auto& s : rep.sentences)
        if (s.verdict.status == Status::Violated) {
            rep.summary = "first violation: " + s.name;
            break;
        }
    return rep;
}

} // namespace cm2pa::checker
