#ifndef CM2PA_ENCODER_HPP
#define CM2PA_ENCODER_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cm2pa/logic.hpp"
#include "cm2pa/machine.hpp"

namespace cm2pa::encoder {

using Nat = std::uint64_t;

enum class Variant {
    Standard,         // phi1.1-phi1.8, phi2, phi3, instr.*, phi4
    TwoVar,           // at most two variables per sentence
    FnHornNat,        // Standard with P replaced by f : N -> N, f(x) <= 1
    FnHornReal,       // Standard with P replaced by f, 0 <= f(x) <= 1, P(t) -> f(t) > 0
    NondetRecurrence, // branch-aware schemes, phi5 recurrence instead of phi4
    FiniteExists,     // single exists-z sentence, satisfiable by finite models
    FixedWidth,       // stride 3d with uninterpreted constants d, e
};

std::string variant_name(Variant v);
std::optional<Variant> parse_variant(std::string_view name);

struct NamedSentence {
    std::string name;
    logic::Formula formula;
};

struct EncodingResult {
    Variant variant = Variant::Standard;
    std::vector<NamedSentence> sentences;
    Nat d = 0;              // chunk parameter (growing variants)
    Nat k = 0;              // fixed-width numeral bound on d
    bool symbolic_d_e = false; // d and e occur as uninterpreted constants
    bool uses_function = false;
    bool real_domain = false;
};

/// d = max{K+6, m+4, n+4}.
Nat compute_d(const machine::Program& p, Nat m, Nat n);

enum class MacroKind { Chunk, Break, Start, End };

/// The bit-pattern abbreviations over P at term t, as literal conjunctions:
/// Chunk forces 001011, Break 0011, Start 01, End 10.
logic::Formula macro(MacroKind kind, const logic::LinearTerm& t);

/// chi_j(t) = phiEnd(t+5+j): program line j is active in the chunk at t.
logic::Formula chi(Nat j, const logic::LinearTerm& t);

/// Compiles the program plus input <m,n> into the chosen sentence set.
/// Throws Error on variant/program mismatch (branch annotations are required
/// for NondetRecurrence and rejected everywhere else; NondetRecurrence
/// requires input (0,0)).
EncodingResult encode(const machine::Program& p, Nat m, Nat n, Variant variant);

} // namespace cm2pa::encoder

#endif
