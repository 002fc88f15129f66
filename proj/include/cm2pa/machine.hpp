#ifndef CM2PA_MACHINE_HPP
#define CM2PA_MACHINE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cm2pa/errors.hpp"

namespace cm2pa::machine {

using Nat = std::uint64_t;

enum class Opcode { Inc, TestDec, Halt };

struct Instruction {
    Opcode op = Opcode::Halt;
    int counter = 0;           // 1 or 2 for Inc/TestDec
    std::size_t target = 0;    // jump target for TestDec on zero
    // Nondeterministic successors for the fall-through edge. A TestDec
    // zero-jump ignores the branch.
    std::optional<std::pair<std::size_t, std::size_t>> branch;
};

struct Program {
    std::vector<Instruction> lines;

    std::size_t last_line() const { return lines.size() - 1; } // K

    bool has_branches() const {
        for (const auto& ins : lines)
            if (ins.branch) return true;
        return false;
    }
};

struct Configuration {
    std::size_t line = 0;
    Nat c1 = 0;
    Nat c2 = 0;

    bool operator==(const Configuration&) const = default;
};

struct Run {
    Nat m = 0;
    Nat n = 0;
    std::vector<Configuration> configs;
    std::optional<std::size_t> halted_at; // step index at which a halt line was entered
};

/// Parses the one-instruction-per-line program DSL.
///
///   LABEL: inc c1|c2 [-> J | K]
///   LABEL: tdec c1|c2 TARGET [-> J | K]
///   LABEL: halt
///
/// '#' starts a comment. Labels must be 0..K in order.
Program parse_program(std::string_view text);

/// Returns the list of convention violations (empty means ok):
/// last line must be halt, all jump and branch targets must be <= K.
std::vector<std::string> validate_program(const Program& p);

/// One step of execution. Returns std::nullopt when c sits on a halt line.
/// `choice` selects the branch successor (0 -> first, 1 -> second) and must be
/// given exactly when the executed line has a branch and takes its
/// fall-through edge.
std::optional<Configuration> step(const Program& p, const Configuration& c,
                                  std::optional<int> choice = std::nullopt);

/// Iterates step() from <0,m,n> until a halt line is entered or max_steps
/// steps were taken. Branch choices are consumed from `choices` in order.
Run run(const Program& p, Nat m, Nat n, std::size_t max_steps,
        std::span<const int> choices = {});

/// Pads a halted run with <K,c1,c2> up to n_chunks configurations, or
/// truncates a running run to exactly n_chunks.
std::vector<Configuration> extend_halting(const Program& p, const Run& r,
                                          std::size_t n_chunks);

std::string to_string(const Configuration& c);
std::string to_string(const Instruction& ins, std::size_t own_line);

/// FNV-1a over the canonical rendering of the program; used to tag outputs.
std::uint64_t program_hash(const Program& p);

} // namespace cm2pa::machine

#endif
