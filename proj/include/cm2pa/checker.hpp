#ifndef CM2PA_CHECKER_HPP
#define CM2PA_CHECKER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "cm2pa/encoder.hpp"
#include "cm2pa/logic.hpp"
#include "cm2pa/model.hpp"

namespace cm2pa::checker {

using Nat = std::uint64_t;

struct CheckerConfig {
    Nat outer_bound = 0;  // B: largest value instantiated for universal variables
    Nat inner_bound = 0;  // B_e: largest value tried for existential variables
    Nat access_limit = 0; // optional cap on P-access positions; 0 = model length
    unsigned jobs = 1;    // parallel enumeration of the outermost variable
    logic::Env base;      // pre-bound uninterpreted constants (fixed-width d, e)
};

/// Model length needed so every scheme term stays in range for variables up
/// to B: the largest position read is below 16B + 8.
Nat required_length(Nat B);

enum class Status { Satisfied, BoundedSatisfied, Violated };

std::string status_name(Status s);

struct Verdict {
    Status status = Status::Satisfied;
    logic::Env witness;          // ground assignment of the quantified prefix
    std::string failing_literal; // rendered false subformula
    Nat skipped = 0;             // instantiations abandoned on out-of-range access
};

/// Standard truth evaluation of a quantifier-free formula: P(n) is bit n.
/// Throws EvalError on quantifiers or unbound variables, AccessError on
/// out-of-range P-access (never silently false).
bool eval_ground(const logic::Formula& f, const model::BitModel& m,
                 const logic::Env& env = {});

/// Bounded truth value: universal variables range over 0..B, existential
/// variables over 0..B_e. Instantiations that run off the model are skipped
/// and counted in *skipped. Throws AccessError only for ground accesses
/// outside any quantifier.
bool eval_bounded(const logic::Formula& f, const model::BitModel& m,
                  const CheckerConfig& cfg, const logic::Env& env = {},
                  Nat* skipped = nullptr);

/// Lexicographic bounded instantiation with first-violation witnesses.
/// A sentence containing an existential quantifier can at best earn
/// BoundedSatisfied.
Verdict check_bounded(const logic::Formula& s, const model::BitModel& m,
                      const CheckerConfig& cfg);

struct SentenceReport {
    std::string name;
    Verdict verdict;
};

struct Report {
    std::vector<SentenceReport> sentences;
    std::string summary; // "all-satisfied" or "first violation: <name>"
    Nat bound = 0;
    Nat model_length = 0;

    bool all_satisfied() const;
};

Report check_report(const encoder::EncodingResult& enc, const model::BitModel& m,
                    const CheckerConfig& cfg);

} // namespace cm2pa::checker

#endif
