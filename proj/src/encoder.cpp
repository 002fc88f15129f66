#include "cm2pa/encoder.hpp"

#include <algorithm>

namespace cm2pa::encoder {

using logic::Atom;
using logic::Formula;
using logic::LinearTerm;
using machine::Instruction;
using machine::Opcode;
using machine::Program;

namespace {

LinearTerm C(Nat c) { return LinearTerm::constant(c); }
LinearTerm V(const char* v, Nat coeff = 1) { return LinearTerm::var(v, coeff); }

Formula P(LinearTerm t) { return Formula::atom(Atom::pred(std::move(t))); }
Formula nP(LinearTerm t) { return Formula::negate(P(std::move(t))); }
Formula le(LinearTerm a, LinearTerm b) {
    return Formula::atom(Atom::le(std::move(a), std::move(b)));
}
Formula lt(LinearTerm a, LinearTerm b) {
    return Formula::atom(Atom::lt(std::move(a), std::move(b)));
}
Formula eq(LinearTerm a, LinearTerm b) {
    return Formula::atom(Atom::eq(std::move(a), std::move(b)));
}
Formula bottom() { return Formula::atom(Atom::bottom()); }

} // namespace

std::string variant_name(Variant v) {
    switch (v) {
    case Variant::Standard: return "standard";
    case Variant::TwoVar: return "twovar";
    case Variant::FnHornNat: return "fn-horn-nat";
    case Variant::FnHornReal: return "fn-horn-real";
    case Variant::NondetRecurrence: return "nondet-recurrence";
    case Variant::FiniteExists: return "finite-exists";
    case Variant::FixedWidth: return "fixed-width";
    }
    return "?";
}

std::optional<Variant> parse_variant(std::string_view name) {
    for (Variant v : {Variant::Standard, Variant::TwoVar, Variant::FnHornNat,
                      Variant::FnHornReal, Variant::NondetRecurrence,
                      Variant::FiniteExists, Variant::FixedWidth})
        if (variant_name(v) == name) return v;
    return std::nullopt;
}

Nat compute_d(const Program& p, Nat m, Nat n) {
    const Nat K = p.last_line();
    return std::max({K + 6, m + 4, n + 4});
}

Formula macro(MacroKind kind, const LinearTerm& t) {
    switch (kind) {
    case MacroKind::Chunk:
        return Formula::conj({nP(t), nP(t + 1), P(t + 2), nP(t + 3), P(t + 4), P(t + 5)});
    case MacroKind::Break:
        return Formula::conj({nP(t), nP(t + 1), P(t + 2), P(t + 3)});
    case MacroKind::Start:
        return Formula::conj({nP(t), P(t + 1)});
    case MacroKind::End:
        return Formula::conj({P(t), nP(t + 1)});
    }
    throw Error("bad macro kind");
}

Formula chi(Nat j, const LinearTerm& t) { return macro(MacroKind::End, t + 5 + j); }

namespace {

Formula chunk(const LinearTerm& t) { return macro(MacroKind::Chunk, t); }
Formula brk(const LinearTerm& t) { return macro(MacroKind::Break, t); }
Formula start(const LinearTerm& t) { return macro(MacroKind::Start, t); }
Formula end_(const LinearTerm& t) { return macro(MacroKind::End, t); }

std::string instr_name(std::size_t j) { return "instr." + std::to_string(j); }

/// The chi-formula(s) for the configuration following a fall-through edge of
/// line j: a plain chi, or a choice between two lines when j branches.
Formula fallthrough_chi(const Instruction& ins, std::size_t next,
                        const LinearTerm& at) {
    if (ins.branch)
        return Formula::disj({chi(ins.branch->first, at), chi(ins.branch->second, at)});
    return chi(next, at);
}

// ---------------------------------------------------------------------------
// growing layout, three/four variables per sentence

void emit_phi1(std::vector<NamedSentence>& out, Nat d, bool two_var) {
    const LinearTerm x = V("x"), y = V("y"), u = V("u");
    out.push_back({"phi1.1", chunk(C(d))});
    out.push_back({"phi1.2", Formula::forall({"x"}, Formula::implies(lt(x, C(d)), nP(x)))});
    out.push_back({"phi1.3",
                   Formula::forall({"x"},
                       Formula::implies(chunk(x),
                           Formula::conj({brk(V("x", 2)), brk(V("x", 3)), chunk(V("x", 4))})))});
    out.push_back({"phi1.4",
                   Formula::forall({"x", "y"},
                       Formula::implies(
                           Formula::conj({chunk(x), chunk(y), le(x, y), lt(y, V("x", 4))}),
                           eq(x, y)))});
    out.push_back({"phi1.5",
                   Formula::forall({"x", "y"},
                       Formula::implies(Formula::conj({chunk(x), brk(y), le(x, y)}),
                                        le(V("x", 2), y)))});
    out.push_back({"phi1.6",
                   Formula::forall({"x", "y"},
                       Formula::implies(Formula::conj({chunk(x), brk(y), lt(V("x", 2), y)}),
                                        le(V("x", 3), y)))});
    out.push_back({"phi1.7",
                   Formula::forall({"x", "y"},
                       Formula::implies(Formula::conj({chunk(x), brk(y), lt(V("x", 3), y)}),
                                        le(V("x", 4), y)))});
    if (two_var) {
        // y+1 in the premise replaces the subtraction variable u.
        out.push_back({"phi1.8",
                       Formula::forall({"x", "y"},
                           Formula::implies(
                               Formula::conj({chunk(x), start(y + 1), lt(x + 5, y + 1),
                                              lt(y + 1, V("x", 4))}),
                               brk(y)))});
    } else {
        out.push_back({"phi1.8",
                       Formula::forall({"x", "y", "u"},
                           Formula::implies(
                               Formula::conj({chunk(x), start(y), lt(x + 5, y),
                                              lt(y, V("x", 4)), eq(u + 1, y)}),
                               brk(u)))});
    }
}

Formula phi3_sentence(Nat K) {
    const LinearTerm x = V("x"), y = V("y");
    return Formula::forall({"x", "y"},
        Formula::implies(
            Formula::conj({chunk(x), end_(y), le(x + 5, y), le(y, V("x", 2))}),
            le(y, x + 5 + K)));
}

// Premise shared by all standard instruction schemes, without the chi part.
std::vector<Formula> standard_premise() {
    const LinearTerm x = V("x"), y = V("y"), z = V("z");
    return {chunk(x),        le(V("x", 2), y), le(y, V("x", 3)), end_(y),
            le(V("x", 3), z), le(z, V("x", 4)), end_(z)};
}

void emit_standard_instr(std::vector<NamedSentence>& out, const Program& p,
                         std::size_t j) {
    const Instruction& ins = p.lines[j];
    const std::size_t K = p.last_line();
    const LinearTerm x = V("x"), y = V("y"), z = V("z"), u = V("u");
    const LinearTerm x4 = V("x", 4);
    const LinearTerm sxy = V("x", 6) + y;  // 6x+y
    const LinearTerm sxz = V("x", 9) + z;  // 9x+z

    auto base = standard_premise();
    switch (ins.op) {
    case Opcode::Inc: {
        base.push_back(chi(j, x));
        Formula cons = ins.counter == 1
            ? Formula::conj({end_(sxy + 1), end_(sxz), fallthrough_chi(ins, j + 1, x4)})
            : Formula::conj({end_(sxy), end_(sxz + 1), fallthrough_chi(ins, j + 1, x4)});
        out.push_back({instr_name(j),
                       Formula::forall({"x", "y", "z"},
                                       Formula::implies(Formula::conj(base), cons))});
        break;
    }
    case Opcode::TestDec: {
        const bool c1 = ins.counter == 1;
        const LinearTerm zero_pos = c1 ? V("x", 2) + 3 : V("x", 3) + 3;
        const LinearTerm& tested = c1 ? y : z;

        auto zp = base;
        zp.push_back(chi(j, x));
        zp.push_back(eq(tested, zero_pos));
        out.push_back({instr_name(j) + ".zero",
                       Formula::forall({"x", "y", "z"},
                           Formula::implies(Formula::conj(zp),
                               Formula::conj({end_(sxy), end_(sxz), chi(ins.target, x4)})))});

        auto pp = base;
        pp.push_back(chi(j, x));
        pp.push_back(lt(zero_pos, tested));
        pp.push_back(eq(u + 1, c1 ? sxy : sxz));
        Formula cons = c1
            ? Formula::conj({end_(u), end_(sxz), fallthrough_chi(ins, j + 1, x4)})
            : Formula::conj({end_(sxy), end_(u), fallthrough_chi(ins, j + 1, x4)});
        out.push_back({instr_name(j) + ".pos",
                       Formula::forall({"x", "y", "z", "u"},
                                       Formula::implies(Formula::conj(pp), cons))});
        break;
    }
    case Opcode::Halt: {
        base.push_back(chi(j, x));
        out.push_back({instr_name(j),
                       Formula::forall({"x", "y", "z"},
                           Formula::implies(Formula::conj(base),
                               Formula::conj({end_(sxy), end_(sxz), chi(K, x4)})))});
        break;
    }
    }
}

// ---------------------------------------------------------------------------
// two variables per sentence

// Premise pieces for the y-part and z-part of split schemes; `shift` adds 1
// to the end-marker variable (the subtraction-free decrement pattern).
std::vector<Formula> twovar_y_premise(std::size_t j, bool shift = false) {
    const LinearTerm x = V("x");
    const LinearTerm t = shift ? V("y") + 1 : V("y");
    return {chunk(x), le(V("x", 2), t), le(t, V("x", 3)), end_(t), chi(j, x)};
}

std::vector<Formula> twovar_z_premise(std::size_t j, bool shift = false) {
    const LinearTerm x = V("x");
    const LinearTerm t = shift ? V("z") + 1 : V("z");
    return {chunk(x), le(V("x", 3), t), le(t, V("x", 4)), end_(t), chi(j, x)};
}

void emit_twovar_instr(std::vector<NamedSentence>& out, const Program& p,
                       std::size_t j) {
    const Instruction& ins = p.lines[j];
    const std::size_t K = p.last_line();
    const LinearTerm x = V("x"), y = V("y"), z = V("z");
    const LinearTerm x4 = V("x", 4);
    const LinearTerm sxy = V("x", 6) + y;
    const LinearTerm sxz = V("x", 9) + z;
    const std::string base = instr_name(j);

    auto push_y = [&](const std::string& name, std::vector<Formula> prem, Formula cons) {
        out.push_back({name, Formula::forall({"x", "y"},
                                 Formula::implies(Formula::conj(std::move(prem)),
                                                  std::move(cons)))});
    };
    auto push_z = [&](const std::string& name, std::vector<Formula> prem, Formula cons) {
        out.push_back({name, Formula::forall({"x", "z"},
                                 Formula::implies(Formula::conj(std::move(prem)),
                                                  std::move(cons)))});
    };

    switch (ins.op) {
    case Opcode::Inc:
        if (ins.counter == 1) {
            push_y(base + ".y", twovar_y_premise(j),
                   Formula::conj({end_(sxy + 1), chi(j + 1, x4)}));
            push_z(base + ".z", twovar_z_premise(j), end_(sxz));
        } else {
            push_y(base + ".y", twovar_y_premise(j),
                   Formula::conj({end_(sxy), chi(j + 1, x4)}));
            push_z(base + ".z", twovar_z_premise(j), end_(sxz + 1));
        }
        break;
    case Opcode::TestDec:
        if (ins.counter == 1) {
            auto zp = twovar_z_premise(j);
            zp.push_back(end_(V("x", 2) + 3));
            push_z(base + ".zero", std::move(zp),
                   Formula::conj({end_(V("x", 8) + 3), end_(sxz), chi(ins.target, x4)}));

            auto py = twovar_y_premise(j, /*shift=*/true);
            py.push_back(lt(V("x", 2) + 3, y + 1));
            push_y(base + ".pos.y", std::move(py),
                   Formula::conj({end_(sxy), chi(j + 1, x4)}));
            auto pz = twovar_z_premise(j);
            pz.push_back(Formula::negate(end_(V("x", 2) + 3)));
            push_z(base + ".pos.z", std::move(pz), end_(sxz));
        } else {
            auto zy = twovar_y_premise(j);
            zy.push_back(end_(V("x", 3) + 3));
            push_y(base + ".zero", std::move(zy),
                   Formula::conj({end_(sxy), end_(V("x", 12) + 3), chi(ins.target, x4)}));

            auto py = twovar_y_premise(j);
            py.push_back(Formula::negate(end_(V("x", 3) + 3)));
            push_y(base + ".pos.y", std::move(py),
                   Formula::conj({end_(sxy), chi(j + 1, x4)}));
            auto pz = twovar_z_premise(j, /*shift=*/true);
            pz.push_back(lt(V("x", 3) + 3, z + 1));
            push_z(base + ".pos.z", std::move(pz), end_(sxz));
        }
        break;
    case Opcode::Halt:
        push_y(base + ".y", twovar_y_premise(j), Formula::conj({end_(sxy), chi(K, x4)}));
        push_z(base + ".z", twovar_z_premise(j), end_(sxz));
        break;
    }
}

// ---------------------------------------------------------------------------
// fixed-width layout (stride 3d, uninterpreted constants d and e)

void emit_fixed_phi1(std::vector<NamedSentence>& out, Nat k) {
    const LinearTerm x = V("x"), d = V("d"), e = V("e");
    const LinearTerm d2 = V("d", 2), d3 = V("d", 3);
    out.push_back({"phi1.1", Formula::conj({le(C(k), d), le(C(0), e)})});
    out.push_back({"phi1.2",
                   Formula::conj({chunk(C(0)), brk(d), brk(d2),
                                  Formula::forall({"x"},
                                      Formula::implies(lt(x, C(0)), nP(x)))})});
    out.push_back({"phi1.3",
                   Formula::forall({"x"},
                       Formula::implies(
                           Formula::conj({chunk(x), lt(x, d3),
                                          Formula::negate(eq(x, C(0)))}),
                           bottom()))});
    out.push_back({"phi1.4",
                   Formula::forall({"x"},
                       Formula::implies(
                           Formula::conj({brk(x), lt(x, d3), Formula::negate(eq(x, d)),
                                          Formula::negate(eq(x, d2))}),
                           bottom()))});
    out.push_back({"phi1.5",
                   Formula::forall({"x"},
                       Formula::implies(Formula::conj({chunk(x), lt(x, e)}),
                                        chunk(x + d3)))});
    out.push_back({"phi1.6",
                   Formula::forall({"x"},
                       Formula::implies(Formula::conj({chunk(x + d3), le(C(0), x)}),
                                        chunk(x)))});
    out.push_back({"phi1.7",
                   Formula::forall({"x"},
                       Formula::implies(Formula::conj({brk(x), lt(x, e)}), brk(x + d3)))});
    out.push_back({"phi1.8",
                   Formula::forall({"x"},
                       Formula::implies(Formula::conj({brk(x + d3), le(C(0), x)}),
                                        brk(x)))});
}

std::vector<Formula> fixed_y_premise(std::size_t j, bool shift = false) {
    const LinearTerm x = V("x"), d = V("d");
    const LinearTerm t = shift ? V("y") + 1 : V("y");
    return {chunk(x), le(x + d, t), le(t, x + V("d", 2)), end_(t), chi(j, x)};
}

std::vector<Formula> fixed_z_premise(std::size_t j, bool shift = false) {
    const LinearTerm x = V("x");
    const LinearTerm t = shift ? V("z") + 1 : V("z");
    return {chunk(x), le(x + V("d", 2), t), le(t, x + V("d", 3)), end_(t), chi(j, x)};
}

void emit_fixed_instr(std::vector<NamedSentence>& out, const Program& p,
                      std::size_t j) {
    const Instruction& ins = p.lines[j];
    const std::size_t K = p.last_line();
    const LinearTerm x = V("x"), y = V("y"), z = V("z");
    const LinearTerm d3 = V("d", 3);
    const LinearTerm next = x + d3;
    const std::string base = instr_name(j);

    auto push_y = [&](const std::string& name, std::vector<Formula> prem, Formula cons) {
        out.push_back({name, Formula::forall({"x", "y"},
                                 Formula::implies(Formula::conj(std::move(prem)),
                                                  std::move(cons)))});
    };
    auto push_z = [&](const std::string& name, std::vector<Formula> prem, Formula cons) {
        out.push_back({name, Formula::forall({"x", "z"},
                                 Formula::implies(Formula::conj(std::move(prem)),
                                                  std::move(cons)))});
    };

    const LinearTerm c1_zero = x + V("d") + 3;        // x+d+3
    const LinearTerm c2_zero = x + V("d", 2) + 3;     // x+2d+3

    switch (ins.op) {
    case Opcode::Inc:
        if (ins.counter == 1) {
            push_y(base + ".y", fixed_y_premise(j),
                   Formula::conj({end_(y + d3 + 1), chi(j + 1, next)}));
            push_z(base + ".z", fixed_z_premise(j), end_(z + d3));
        } else {
            push_y(base + ".y", fixed_y_premise(j),
                   Formula::conj({end_(y + d3), chi(j + 1, next)}));
            push_z(base + ".z", fixed_z_premise(j), end_(z + d3 + 1));
        }
        break;
    case Opcode::TestDec:
        if (ins.counter == 1) {
            auto zp = fixed_z_premise(j);
            zp.push_back(end_(c1_zero));
            push_z(base + ".zero", std::move(zp),
                   Formula::conj({end_(x + V("d", 4) + 3), end_(z + d3),
                                  chi(ins.target, next)}));

            auto py = fixed_y_premise(j, /*shift=*/true);
            py.push_back(lt(c1_zero, y + 1));
            push_y(base + ".pos.y", std::move(py),
                   Formula::conj({end_(y + d3), chi(j + 1, next)}));
            auto pz = fixed_z_premise(j);
            pz.push_back(Formula::negate(end_(c1_zero)));
            push_z(base + ".pos.z", std::move(pz), end_(z + d3));
        } else {
            auto zy = fixed_y_premise(j);
            zy.push_back(end_(c2_zero));
            push_y(base + ".zero", std::move(zy),
                   Formula::conj({end_(y + d3), end_(x + V("d", 5) + 3),
                                  chi(ins.target, next)}));

            auto py = fixed_y_premise(j);
            py.push_back(Formula::negate(end_(c2_zero)));
            push_y(base + ".pos.y", std::move(py),
                   Formula::conj({end_(y + d3), chi(j + 1, next)}));
            auto pz = fixed_z_premise(j, /*shift=*/true);
            pz.push_back(lt(c2_zero, z + 1));
            push_z(base + ".pos.z", std::move(pz), end_(z + d3));
        }
        break;
    case Opcode::Halt:
        push_y(base + ".y", fixed_y_premise(j), Formula::conj({end_(y + d3), chi(K, next)}));
        push_z(base + ".z", fixed_z_premise(j), end_(z + d3));
        break;
    }
}

// ---------------------------------------------------------------------------

EncodingResult encode_standard_like(const Program& p, Nat m, Nat n, Variant v) {
    EncodingResult r;
    r.variant = v;
    r.d = compute_d(p, m, n);
    const std::size_t K = p.last_line();
    const bool two_var = v == Variant::TwoVar;
    const bool nondet = v == Variant::NondetRecurrence;

    emit_phi1(r.sentences, r.d, two_var);
    if (nondet) {
        r.sentences.push_back(
            {"phi2", Formula::conj({end_(C(2 * r.d + 3)), end_(C(3 * r.d + 3)),
                                    chi(0, C(r.d))})});
    } else {
        r.sentences.push_back(
            {"phi2", Formula::conj({chi(0, C(r.d)), end_(C(2 * r.d + 3 + m)),
                                    end_(C(3 * r.d + 3 + n))})});
    }
    r.sentences.push_back({"phi3", phi3_sentence(K)});
    for (std::size_t j = 0; j <= K; ++j) {
        if (two_var)
            emit_twovar_instr(r.sentences, p, j);
        else
            emit_standard_instr(r.sentences, p, j);
    }
    if (nondet) {
        const LinearTerm x = V("x"), y = V("y");
        r.sentences.push_back(
            {"phi5", Formula::forall({"x"},
                         Formula::exists({"y"},
                             Formula::conj({le(x, y), chunk(y), chi(0, y)})))});
    } else {
        r.sentences.push_back(
            {"phi4", Formula::forall({"x"}, Formula::implies(chunk(V("x")),
                                                 Formula::negate(chi(K, V("x")))))});
    }
    return r;
}

EncodingResult encode_finite_exists(const Program& p, Nat m, Nat n) {
    EncodingResult r;
    r.variant = Variant::FiniteExists;
    r.d = compute_d(p, m, n);
    const std::size_t K = p.last_line();
    const Nat d = r.d;
    const LinearTerm x = V("x"), z = V("z");

    std::vector<NamedSentence> parts;
    emit_phi1(parts, d, /*two_var=*/false);
    // Subformula (3) only propagates delimiters below z, so finitely many
    // chunks suffice.
    parts[2].formula = Formula::forall({"x"},
        Formula::implies(
            Formula::conj({lt(x, z), chunk(x)}),
            Formula::conj({brk(V("x", 2)), brk(V("x", 3)), chunk(V("x", 4))})));
    parts.push_back({"phi2", Formula::conj({chi(0, C(d)), end_(C(2 * d + 3 + m)),
                                            end_(C(3 * d + 3 + n))})});
    parts.push_back({"phi3", phi3_sentence(K)});
    for (std::size_t j = 0; j < K; ++j)
        emit_standard_instr(parts, p, j);
    parts.push_back({"phi4", Formula::conj({chunk(z), chi(K, z)})});

    std::vector<Formula> body;
    body.reserve(parts.size());
    for (auto& s : parts) body.push_back(std::move(s.formula));
    r.sentences.push_back({"phi", Formula::exists({"z"}, Formula::conj(std::move(body)))});
    return r;
}

EncodingResult encode_fixed_width(const Program& p, Nat m, Nat n) {
    EncodingResult r;
    r.variant = Variant::FixedWidth;
    r.k = compute_d(p, m, n);
    r.symbolic_d_e = true;
    const std::size_t K = p.last_line();
    const LinearTerm d = V("d"), e = V("e");

    emit_fixed_phi1(r.sentences, r.k);
    r.sentences.push_back(
        {"phi2", Formula::conj({chi(0, C(0)), end_(d + 3 + m),
                                end_(V("d", 2) + 3 + n)})});
    r.sentences.push_back(
        {"phi3", Formula::forall({"x", "y"},
                     Formula::implies(
                         Formula::conj({chunk(V("x")), end_(V("y")),
                                        lt(V("x") + 5 + K, V("y")),
                                        le(V("y"), V("x") + d)}),
                         bottom()))});
    for (std::size_t j = 0; j < K; ++j)
        emit_fixed_instr(r.sentences, p, j);
    r.sentences.push_back({"phi4", Formula::conj({chunk(e), chi(K, e)})});
    return r;
}

EncodingResult encode_fn(const Program& p, Nat m, Nat n, Variant v) {
    EncodingResult base = encode_standard_like(p, m, n, Variant::Standard);
    const logic::FnFlavor flavor =
        v == Variant::FnHornNat ? logic::FnFlavor::Nat : logic::FnFlavor::Real;
    EncodingResult r;
    r.variant = v;
    r.d = base.d;
    r.uses_function = true;
    r.real_domain = v == Variant::FnHornReal;
    r.sentences.push_back({"range", logic::function_range_axiom(flavor)});
    for (const auto& s : base.sentences)
        r.sentences.push_back({s.name, logic::predicate_to_function(s.formula, flavor).formula});
    return r;
}

} // namespace

EncodingResult encode(const Program& p, Nat m, Nat n, Variant variant) {
    auto problems = machine::validate_program(p);
    if (!problems.empty())
        throw Error("invalid program: " + problems.front());

    if (variant == Variant::NondetRecurrence) {
        if (!p.has_branches())
            throw Error("nondet-recurrence requires a branch-annotated program");
        if (m != 0 || n != 0)
            throw Error("nondet-recurrence requires input (0,0)");
        return encode_standard_like(p, 0, 0, variant);
    }
    if (p.has_branches())
        throw Error("branch annotations are only supported by nondet-recurrence");

    switch (variant) {
    case Variant::Standard:
    case Variant::TwoVar:
        return encode_standard_like(p, m, n, variant);
    case Variant::FnHornNat:
    case Variant::FnHornReal:
        return encode_fn(p, m, n, variant);
    case Variant::FiniteExists:
        return encode_finite_exists(p, m, n);
    case Variant::FixedWidth:
        return encode_fixed_width(p, m, n);
    case Variant::NondetRecurrence:
        break;
    }
    throw Error("bad variant");
}

} // namespace cm2pa::encoder
