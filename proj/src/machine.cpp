#include "cm2pa/machine.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace cm2pa::machine {

namespace {

struct Cursor {
    std::string_view text;
    std::size_t pos = 0;
    int line = 1;
    int col = 1;

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    void advance() {
        if (text[pos] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++pos;
    }
};

struct LineLexer {
    std::string_view s;
    std::size_t i = 0;
    int line_no;

    explicit LineLexer(std::string_view s, int line_no) : s(s), line_no(line_no) {}

    void skip_ws() {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    }

    bool done() {
        skip_ws();
        return i >= s.size();
    }

    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError(msg, line_no, static_cast<int>(i) + 1);
    }

    std::uint64_t number() {
        skip_ws();
        if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i])))
            fail("expected a number");
        std::uint64_t v = 0;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
            v = v * 10 + static_cast<std::uint64_t>(s[i] - '0');
            ++i;
        }
        return v;
    }

    std::string word() {
        skip_ws();
        std::size_t start = i;
        while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '&'))
            ++i;
        if (start == i) fail("expected a word");
        return std::string(s.substr(start, i - start));
    }

    void expect(char c) {
        skip_ws();
        if (i >= s.size() || s[i] != c)
            fail(std::string("expected '") + c + "'");
        ++i;
    }

    bool try_consume(std::string_view tok) {
        skip_ws();
        if (s.substr(i, tok.size()) == tok) {
            i += tok.size();
            return true;
        }
        return false;
    }
};

int parse_counter(LineLexer& lx) {
    std::string w = lx.word();
    if (w == "c1") return 1;
    if (w == "c2") return 2;
    lx.fail("expected counter 'c1' or 'c2'");
}

} // namespace

Program parse_program(std::string_view text) {
    Program p;
    int line_no = 0;
    std::size_t start = 0;
    std::size_t expected_label = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        std::string_view raw = text.substr(
            start, end == std::string_view::npos ? text.size() - start : end - start);
        ++line_no;
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;

        std::string_view stripped = raw.substr(0, raw.find('#'));
        LineLexer lx(stripped, line_no);
        if (lx.done()) continue;

        std::uint64_t label = lx.number();
        lx.expect(':');
        if (label != expected_label)
            throw ParseError("expected label " + std::to_string(expected_label) +
                                 ", got " + std::to_string(label),
                             line_no, 1);
        ++expected_label;

        Instruction ins;
        std::string op = lx.word();
        if (op == "inc") {
            ins.op = Opcode::Inc;
            ins.counter = parse_counter(lx);
        } else if (op == "tdec" || op == "test&dec") {
            ins.op = Opcode::TestDec;
            ins.counter = parse_counter(lx);
            ins.target = lx.number();
        } else if (op == "halt") {
            ins.op = Opcode::Halt;
        } else {
            lx.fail("unknown instruction '" + op + "'");
        }

        if (lx.try_consume("->")) {
            if (ins.op == Opcode::Halt) lx.fail("halt cannot carry a branch");
            std::size_t j1 = lx.number();
            lx.expect('|');
            std::size_t j2 = lx.number();
            ins.branch = {j1, j2};
        }
        if (!lx.done()) lx.fail("trailing input");
        p.lines.push_back(ins);
    }
    if (p.lines.empty())
        throw ParseError("program has no instructions", line_no, 1);
    return p;
}

std::vector<std::string> validate_program(const Program& p) {
    std::vector<std::string> problems;
    if (p.lines.empty()) {
        problems.push_back("program is empty");
        return problems;
    }
    const std::size_t K = p.last_line();
    if (p.lines.back().op != Opcode::Halt)
        problems.push_back("last line not halt");
    for (std::size_t j = 0; j < p.lines.size(); ++j) {
        const auto& ins = p.lines[j];
        if (ins.op == Opcode::TestDec && ins.target > K)
            problems.push_back("target " + std::to_string(ins.target) + " > K=" +
                               std::to_string(K) + " on line " + std::to_string(j));
        if (ins.branch) {
            if (ins.branch->first > K || ins.branch->second > K)
                problems.push_back("branch target out of range on line " + std::to_string(j));
        }
    }
    return problems;
}

std::optional<Configuration> step(const Program& p, const Configuration& c,
                                  std::optional<int> choice) {
    const Instruction& ins = p.lines.at(c.line);
    if (ins.op == Opcode::Halt) return std::nullopt;

    auto fallthrough = [&](const Instruction& i) -> std::size_t {
        if (i.branch) {
            if (!choice)
                throw Error("branch on line " + std::to_string(c.line) +
                            " requires a choice");
            return *choice == 0 ? i.branch->first : i.branch->second;
        }
        return c.line + 1;
    };

    Configuration next = c;
    switch (ins.op) {
    case Opcode::Inc:
        if (ins.counter == 1)
            ++next.c1;
        else
            ++next.c2;
        next.line = fallthrough(ins);
        break;
    case Opcode::TestDec: {
        Nat& ctr = ins.counter == 1 ? next.c1 : next.c2;
        if (ctr > 0) {
            --ctr;
            next.line = fallthrough(ins);
        } else {
            next.line = ins.target; // zero test jumps; branch does not apply
        }
        break;
    }
    case Opcode::Halt:
        break; // unreachable
    }
    return next;
}

Run run(const Program& p, Nat m, Nat n, std::size_t max_steps,
        std::span<const int> choices) {
    Run r;
    r.m = m;
    r.n = n;
    r.configs.push_back(Configuration{0, m, n});
    std::size_t next_choice = 0;
    for (std::size_t s = 0; s < max_steps; ++s) {
        const Configuration& cur = r.configs.back();
        const Instruction& ins = p.lines.at(cur.line);
        if (ins.op == Opcode::Halt) {
            r.halted_at = s;
            return r;
        }
        std::optional<int> choice;
        bool takes_fallthrough =
            ins.branch && (ins.op == Opcode::Inc ||
                           (ins.op == Opcode::TestDec &&
                            (ins.counter == 1 ? cur.c1 : cur.c2) > 0));
        if (takes_fallthrough) {
            if (next_choice >= choices.size())
                throw Error("choice sequence exhausted at step " + std::to_string(s));
            choice = choices[next_choice++];
        }
        r.configs.push_back(*step(p, cur, choice));
    }
    if (p.lines.at(r.configs.back().line).op == Opcode::Halt)
        r.halted_at = max_steps;
    return r;
}

std::vector<Configuration> extend_halting(const Program& p, const Run& r,
                                          std::size_t n_chunks) {
    std::vector<Configuration> out = r.configs;
    if (r.halted_at) {
        if (out.size() > n_chunks)
            throw Error("n_chunks smaller than the halted run");
        Configuration pad = out.back();
        pad.line = p.last_line();
        while (out.size() < n_chunks) out.push_back(pad);
    } else {
        if (out.size() < n_chunks)
            throw Error("running run has fewer than n_chunks configurations");
        out.resize(n_chunks);
    }
    return out;
}

std::string to_string(const Configuration& c) {
    return "<" + std::to_string(c.line) + "," + std::to_string(c.c1) + "," +
           std::to_string(c.c2) + ">";
}

std::string to_string(const Instruction& ins, std::size_t own_line) {
    std::string s = std::to_string(own_line) + ": ";
    switch (ins.op) {
    case Opcode::Inc:
        s += "inc c" + std::to_string(ins.counter);
        break;
    case Opcode::TestDec:
        s += "tdec c" + std::to_string(ins.counter) + " " + std::to_string(ins.target);
        break;
    case Opcode::Halt:
        s += "halt";
        break;
    }
    if (ins.branch)
        s += " -> " + std::to_string(ins.branch->first) + " | " +
             std::to_string(ins.branch->second);
    return s;
}

std::uint64_t program_hash(const Program& p) {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&](std::string_view s) {
        for (char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
    };
    for (std::size_t j = 0; j < p.lines.size(); ++j) {
        mix(to_string(p.lines[j], j));
        mix("\n");
    }
    return h;
}

} // namespace cm2pa::machine
