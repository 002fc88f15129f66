#include "cm2pa/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cm2pa/checker.hpp"
#include "cm2pa/encoder.hpp"
#include "cm2pa/logic.hpp"
#include "cm2pa/machine.hpp"
#include "cm2pa/model.hpp"

namespace cm2pa::cli {

namespace {

using Nat = std::uint64_t;
using machine::Configuration;
using machine::Program;

Program load_program(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open program file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    Program p = machine::parse_program(ss.str());
    auto problems = machine::validate_program(p);
    if (!problems.empty()) throw Error("invalid program: " + problems.front());
    return p;
}

std::pair<Nat, Nat> parse_input(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos)
        throw Error("--input expects the form m,n");
    try {
        return {std::stoull(s.substr(0, comma)), std::stoull(s.substr(comma + 1))};
    } catch (const std::exception&) {
        throw Error("--input expects the form m,n");
    }
}

std::vector<int> parse_choices(const std::string& s) {
    std::vector<int> bits;
    for (char c : s) {
        if (c != '0' && c != '1') throw Error("--choices expects a string of 0s and 1s");
        bits.push_back(c - '0');
    }
    return bits;
}

std::vector<Configuration> growing_configs(const Program& p, Nat m, Nat n, Nat chunks,
                                           const std::vector<int>& choices) {
    if (chunks == 0) return {};
    auto r = machine::run(p, m, n, chunks - 1, choices);
    return machine::extend_halting(p, r, chunks);
}

std::vector<Configuration> halting_configs(const Program& p, Nat m, Nat n,
                                           Nat max_steps,
                                           const std::vector<int>& choices) {
    auto r = machine::run(p, m, n, max_steps, choices);
    if (!r.halted_at)
        throw Error("machine did not halt within " + std::to_string(max_steps) +
                    " steps; the fixed-width layout needs a halting run");
    return r.configs;
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw Error("cannot open output file: " + path);
    f << text;
}

struct Options {
    std::string program_path;
    std::string input = "0,0";
    std::string choices;
    std::string variant = "standard";
    std::string format = "text";
    std::string output;
    std::string layout = "growing";
    Nat chunks = 3;
    Nat max_steps = 100;
    Nat bound = 0;       // 0 = derive from the model
    Nat inner_bound = 0; // 0 = same as bound
    unsigned jobs = 1;
};

encoder::Variant need_variant(const std::string& name) {
    auto v = encoder::parse_variant(name);
    if (!v) throw Error("unknown variant: " + name);
    return *v;
}

int cmd_simulate(const Options& o, std::ostream& out) {
    Program p = load_program(o.program_path);
    auto [m, n] = parse_input(o.input);
    auto choices = parse_choices(o.choices);
    auto r = machine::run(p, m, n, o.max_steps, choices);
    for (std::size_t i = 0; i < r.configs.size(); ++i) {
        out << machine::to_string(r.configs[i]);
        if (i + 1 == r.configs.size()) {
            if (r.halted_at)
                out << " halted at step " << *r.halted_at;
            else
                out << " running";
        }
        out << "\n";
    }
    return 0;
}

int cmd_encode(const Options& o, std::ostream& out) {
    Program p = load_program(o.program_path);
    auto [m, n] = parse_input(o.input);
    auto enc = encoder::encode(p, m, n, need_variant(o.variant));

    std::string text;
    if (o.format == "text") {
        for (const auto& s : enc.sentences)
            text += s.name + ": " + s.formula.str() + "\n";
    } else if (o.format == "smt2") {
        logic::SmtMeta meta;
        meta.variant_name = encoder::variant_name(enc.variant);
        meta.machine_hash = machine::program_hash(p);
        meta.uses_function = enc.uses_function;
        meta.real_domain = enc.real_domain;
        meta.declare_d_e = enc.symbolic_d_e;
        std::vector<logic::Formula> fs;
        for (const auto& s : enc.sentences) {
            meta.names.push_back(s.name);
            fs.push_back(s.formula);
        }
        text = logic::to_smtlib(fs, meta);
    } else if (o.format == "cnf") {
        for (const auto& s : enc.sentences) {
            text += s.name + ":\n";
            text += logic::to_cnf(s.formula).str();
        }
    } else {
        throw Error("unknown format: " + o.format + " (expected text, smt2 or cnf)");
    }
    write_output(o.output, text, out);
    return 0;
}

model::BitModel build_model(const Program& p, Nat m, Nat n, const Options& o,
                            bool fixed) {
    auto choices = parse_choices(o.choices);
    if (fixed) {
        auto configs = halting_configs(p, m, n, o.max_steps, choices);
        return model::build_fixed_width(configs, encoder::compute_d(p, m, n),
                                        p.last_line());
    }
    auto configs = growing_configs(p, m, n, o.chunks, choices);
    return model::build_canonical(configs, encoder::compute_d(p, m, n));
}

int cmd_model(const Options& o, std::ostream& out) {
    Program p = load_program(o.program_path);
    auto [m, n] = parse_input(o.input);
    if (o.layout != "growing" && o.layout != "fixed")
        throw Error("unknown layout: " + o.layout);
    auto bm = build_model(p, m, n, o, o.layout == "fixed");
    write_output(o.output, bm.dump(), out);
    return 0;
}

nlohmann::ordered_json report_to_json(const checker::Report& rep) {
    nlohmann::ordered_json sentences = nlohmann::ordered_json::array();
    for (const auto& s : rep.sentences) {
        nlohmann::ordered_json j;
        j["name"] = s.name;
        j["verdict"] = checker::status_name(s.verdict.status);
        if (s.verdict.status == checker::Status::Violated) {
            nlohmann::ordered_json w;
            for (const auto& [var, val] : s.verdict.witness) w[var] = val;
            j["witness"] = w;
            j["failing_literal"] = s.verdict.failing_literal;
        }
        if (s.verdict.skipped > 0) j["skipped"] = s.verdict.skipped;
        sentences.push_back(j);
    }
    nlohmann::ordered_json j;
    j["sentences"] = sentences;
    j["summary"] = rep.summary;
    j["bound"] = rep.bound;
    j["model_length"] = rep.model_length;
    return j;
}

int cmd_check(const Options& o, std::ostream& out) {
    Program p = load_program(o.program_path);
    auto [m, n] = parse_input(o.input);
    auto variant = need_variant(o.variant);
    auto enc = encoder::encode(p, m, n, variant);
    const bool fixed = variant == encoder::Variant::FixedWidth;
    auto bm = build_model(p, m, n, o, fixed);

    checker::CheckerConfig cfg;
    if (fixed) {
        const auto& lay = std::get<model::FixedWidthLayout>(bm.layout());
        cfg.base = {{"d", lay.d}, {"e", lay.e}};
        cfg.outer_bound = o.bound ? o.bound : bm.length();
    } else {
        cfg.outer_bound =
            o.bound ? o.bound : model::chunk_start(o.chunks, enc.d);
    }
    cfg.inner_bound = o.inner_bound ? o.inner_bound : cfg.outer_bound;
    cfg.jobs = o.jobs;

    auto rep = checker::check_report(enc, bm, cfg);
    write_output(o.output, report_to_json(rep).dump(2) + "\n", out);
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"two-counter machine to Presburger encoding workbench"};
    app.require_subcommand(1);

    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--program", o.program_path, "program file in the machine DSL")
            ->required();
        sub->add_option("--input", o.input, "input counters m,n");
        sub->add_option("--choices", o.choices, "branch choice bits (nondeterministic runs)");
    };

    auto* sim = app.add_subcommand("simulate", "run the machine and print the trace");
    add_common(sim);
    sim->add_option("--max-steps", o.max_steps, "step limit");

    auto* enc = app.add_subcommand("encode", "emit the encoding sentences");
    add_common(enc);
    enc->add_option("--variant", o.variant, "encoding variant");
    enc->add_option("--format", o.format, "text, smt2 or cnf");
    enc->add_option("--output", o.output, "output file (default stdout)");

    auto* mdl = app.add_subcommand("model", "build and dump the canonical bit model");
    add_common(mdl);
    mdl->add_option("--chunks", o.chunks, "number of configurations to materialize");
    mdl->add_option("--layout", o.layout, "growing or fixed");
    mdl->add_option("--max-steps", o.max_steps, "halt search limit for the fixed layout");
    mdl->add_option("--output", o.output, "output file (default stdout)");

    auto* chk = app.add_subcommand("check", "check the encoding against the canonical model");
    add_common(chk);
    chk->add_option("--variant", o.variant, "encoding variant");
    chk->add_option("--chunks", o.chunks, "number of configurations to materialize");
    chk->add_option("--max-steps", o.max_steps, "halt search limit for fixed-width");
    chk->add_option("--bound", o.bound, "universal instantiation bound (default: model extent)");
    chk->add_option("--inner-bound", o.inner_bound, "existential bound (default: --bound)");
    chk->add_option("--jobs", o.jobs, "parallel checker threads");
    chk->add_option("--output", o.output, "output file (default stdout)");

    std::vector<const char*> argv;
    argv.push_back("cm2pa");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << e.what() << "\n";
        return 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(o, out);
        if (enc->parsed()) return cmd_encode(o, out);
        if (mdl->parsed()) return cmd_model(o, out);
        if (chk->parsed()) return cmd_check(o, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace cm2pa::cli
