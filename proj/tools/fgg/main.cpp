#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <future>
#include <random>
#include <sstream>

#ifdef __linux__
#include <sys/resource.h>
#endif

#include "fgg/diff.hpp"
#include "fgg/parser.hpp"
#include "fgg/printer.hpp"
#include "fgg/tl_text.hpp"

namespace {

// Exit codes: 0 full pass, 1 semantic FAIL, 2 type/parse error, 3 usage.
constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitTypeError = 2;
constexpr int kExitUsage = 3;

struct Options {
    std::string input;
    std::uint64_t max_steps = fgg::kDefaultMaxSteps;
    std::string strategy = "direct";
    std::vector<std::string> strategies;
    std::optional<std::uint64_t> seed;
    std::string main_type;
    bool base_types = true;
    std::string format = "text";
    bool trace = false;
    std::string output;
    // cohere
    std::string strategy_a = "direct", strategy_b = "direct";
    std::string main_type_a, main_type_b;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint64_t derive_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

// Strategy spec: "direct" or "random" or "random:SEED".
fgg::Strategy parse_strategy(const std::string& spec, std::optional<std::uint64_t> seed,
                             const std::string& main_type) {
    fgg::Strategy s;
    if (spec == "direct") {
        s.path = fgg::Strategy::Path::Direct;
    } else if (spec == "random") {
        s.path = fgg::Strategy::Path::Randomized;
        s.seed = seed ? *seed : derive_seed();
    } else if (spec.rfind("random:", 0) == 0) {
        s.path = fgg::Strategy::Path::Randomized;
        s.seed = std::stoull(spec.substr(7));
    } else {
        throw std::runtime_error("unknown strategy '" + spec + "' (expected direct|random[:SEED])");
    }
    if (!main_type.empty()) s.main_type = fgg::parse_type_text(main_type);
    return s;
}

void print_diags(const std::vector<fgg::Diag>& diags) {
    for (const auto& d : diags) std::cerr << "error: " << d.render() << "\n";
}

void emit(const Options& opt, const nlohmann::ordered_json& j, const std::string& text) {
    if (opt.format == "json") std::cout << j.dump(2) << "\n";
    else std::cout << text;
}

int cmd_check(const Options& opt) {
    fgg::Program p = fgg::parse_program(read_file(opt.input), opt.base_types);
    fgg::TranslateResult tr = fgg::translate_program(p);
    if (!tr.ok()) {
        print_diags(tr.diags);
        nlohmann::ordered_json j;
        j["ok"] = false;
        j["diagnostics"] = fgg::diags_json(tr.diags);
        emit(opt, j, "FAIL\n");
        return kExitTypeError;
    }
    nlohmann::ordered_json j;
    j["ok"] = true;
    j["main_type"] = fgg::print_type(tr.translation->main_type);
    emit(opt, j, "OK: main has type " + fgg::print_type(tr.translation->main_type) + "\n");
    return kExitPass;
}

int cmd_run(const Options& opt) {
    fgg::Program p = fgg::parse_program(read_file(opt.input), opt.base_types);
    auto viol = fgg::validate_restrictions(p);
    if (!viol.empty()) {
        print_diags(viol);
        return kExitTypeError;
    }
    if (!p.base_types && fgg::program_uses_base_expr_forms(p)) {
        print_diags({{fgg::Code::BaseDisabled, "program uses base forms", std::nullopt}});
        return kExitTypeError;
    }
    fgg::TraceFn trace;
    if (opt.trace)
        trace = [](std::uint64_t n, const fgg::ExprPtr& e) {
            std::cerr << n << ": " << fgg::print_expr(e) << "\n";
        };
    auto out = fgg::eval_source(p, opt.max_steps, trace);
    nlohmann::ordered_json j = fgg::outcome_json(out);
    if (out.is_value()) {
        emit(opt, j, fgg::print_expr(out.value) + "\n");
        return kExitPass;
    }
    if (out.is_step_limit()) {
        emit(opt, j, "STEP_LIMIT after " + std::to_string(out.steps) + " steps\n");
        return kExitPass;
    }
    emit(opt, j, "STUCK: " + out.diagnostic + "\n");
    return kExitFail;
}

int cmd_compile(const Options& opt) {
    fgg::Program p = fgg::parse_program(read_file(opt.input), opt.base_types);
    fgg::Strategy strat = parse_strategy(opt.strategy, opt.seed, opt.main_type);
    if (strat.path == fgg::Strategy::Path::Randomized)
        std::cerr << "seed: " << strat.seed << "\n";
    fgg::TranslateResult tr = fgg::translate_program(p, strat);
    if (!tr.ok()) {
        print_diags(tr.diags);
        return kExitTypeError;
    }
    std::string text = fgg::print_tl_program(tr.translation->program);
    if (!opt.output.empty()) {
        std::ofstream out(opt.output, std::ios::binary);
        out << text;
    } else {
        std::cout << text;
    }
    return kExitPass;
}

int cmd_run_tl(const Options& opt) {
    fgg::TLProgram p = fgg::parse_tl_program(read_file(opt.input));
    auto out = fgg::eval_tl(p, opt.max_steps);
    nlohmann::ordered_json j = fgg::outcome_json(out);
    if (out.is_value()) {
        emit(opt, j, fgg::print_tl(out.value) + "\n");
        return kExitPass;
    }
    if (out.is_step_limit()) {
        emit(opt, j, "STEP_LIMIT after " + std::to_string(out.steps) + " steps\n");
        return kExitPass;
    }
    emit(opt, j, "STUCK: " + out.diagnostic + "\n");
    return kExitFail;
}

int cmd_diff(const Options& opt) {
    fgg::Program p = fgg::parse_program(read_file(opt.input), opt.base_types);
    std::vector<fgg::Strategy> strategies;
    std::vector<std::string> specs = opt.strategies.empty() ? std::vector<std::string>{"direct"} : opt.strategies;
    for (const auto& spec : specs) strategies.push_back(parse_strategy(spec, opt.seed, opt.main_type));
    for (const auto& s : strategies)
        if (s.path == fgg::Strategy::Path::Randomized)
            std::cerr << "seed: " << s.seed << "\n";
    fgg::DiffReport rep = fgg::differential_run(p, strategies, opt.max_steps);
    for (const auto& run : rep.targets)
        if (!run.translated) {
            print_diags(run.diags);
            return kExitTypeError;
        }
    nlohmann::ordered_json j = fgg::diff_report_json(rep);
    std::string text;
    for (const auto& run : rep.targets) text += run.label + ": " + run.verdict + "\n";
    text += "verdict: " + rep.verdict + "\n";
    emit(opt, j, text);
    return rep.verdict == "PASS" ? kExitPass : kExitFail;
}

int cmd_cohere(const Options& opt) {
    fgg::Program p = fgg::parse_program(read_file(opt.input), opt.base_types);
    fgg::Strategy a = parse_strategy(opt.strategy_a, opt.seed, opt.main_type_a);
    fgg::Strategy b = parse_strategy(opt.strategy_b, opt.seed, opt.main_type_b);
    fgg::CoherenceReport rep = fgg::coherence_check(p, a, b, opt.max_steps);
    if (rep.verdict == "ERROR") {
        print_diags(rep.a.diags);
        print_diags(rep.b.diags);
        return kExitTypeError;
    }
    nlohmann::ordered_json j = fgg::coherence_report_json(rep);
    std::string text = rep.a.label + " vs " + rep.b.label + ": " + rep.verdict;
    if (!rep.detail.empty()) text += " (" + rep.detail + ")";
    emit(opt, j, text + "\n");
    return rep.verdict == "PASS" ? kExitPass : kExitFail;
}

struct CaseResult {
    std::string file;
    std::string verdict = "PASS";
    std::string detail;
};

CaseResult run_corpus_case(const nlohmann::json& c, const std::string& manifest_dir, const Options& opt) {
    CaseResult r;
    r.file = c.at("file").get<std::string>();
    std::string expect_kind = c.at("expect").at("kind").get<std::string>();
    std::uint64_t max_steps = c.value("max_steps", opt.max_steps);
    try {
        fgg::Program p = fgg::parse_program(read_file(manifest_dir + "/" + r.file), opt.base_types);
        auto viol = fgg::validate_restrictions(p);
        fgg::TranslateResult tr = viol.empty() ? fgg::translate_program(p) : fgg::TranslateResult{};
        if (!viol.empty()) tr.diags = viol;
        if (expect_kind == "type_error") {
            std::string want = c.at("expect").at("code").get<std::string>();
            bool hit = false;
            for (const auto& d : tr.diags)
                if (fgg::code_name(d.code) == want) hit = true;
            if (tr.ok() || !hit) {
                r.verdict = "FAIL";
                r.detail = tr.ok() ? "type-checked but expected " + want
                                   : "wrong diagnostic (expected " + want + ")";
            }
        } else if (!tr.ok()) {
            r.verdict = "FAIL";
            r.detail = "unexpected type error: " +
                       (tr.diags.empty() ? std::string("?") : tr.diags.front().render());
        } else {
            std::vector<fgg::Strategy> strategies;
            if (c.contains("strategies"))
                for (const auto& s : c.at("strategies"))
                    strategies.push_back(parse_strategy(s.get<std::string>(), std::nullopt, ""));
            else
                strategies.push_back(fgg::Strategy::direct());
            fgg::DiffReport rep = fgg::differential_run(p, strategies, max_steps);
            if (rep.verdict != "PASS") {
                r.verdict = "FAIL";
                r.detail = "differential run failed";
            }
            if (expect_kind == "value") {
                fgg::ExprPtr want = fgg::parse_expr_text(c.at("expect").at("value").get<std::string>());
                if (!rep.source.is_value() || !fgg::expr_equal(rep.source.value, want)) {
                    r.verdict = "FAIL";
                    r.detail = "source value mismatch";
                }
            } else if (expect_kind == "step_limit") {
                if (!rep.source.is_step_limit()) {
                    r.verdict = "FAIL";
                    r.detail = "expected STEP_LIMIT, got " +
                               (rep.source.is_value() ? fgg::print_expr(rep.source.value)
                                                      : rep.source.diagnostic);
                }
            } else {
                r.verdict = "ERROR";
                r.detail = "unknown expectation kind " + expect_kind;
            }
        }
    } catch (const fgg::TypeError& err) {
        bool expected_rejection =
            expect_kind == "type_error" &&
            fgg::code_name(err.diag.code) == c.at("expect").at("code").get<std::string>();
        if (!expected_rejection) {
            r.verdict = "ERROR";
            r.detail = err.diag.render();
        }
    } catch (const std::exception& ex) {
        r.verdict = "ERROR";
        r.detail = ex.what();
    }
    return r;
}

// Corpus manifest: {"cases": [{"file", "expect": {"kind": value|step_limit|
// type_error, ...}, "strategies": [...], "max_steps"?}]}. Cases are fully
// isolated and run concurrently; output keeps manifest order.
int cmd_corpus(const Options& opt) {
    std::string manifest_dir = ".";
    if (auto slash = opt.input.find_last_of('/'); slash != std::string::npos)
        manifest_dir = opt.input.substr(0, slash);
    nlohmann::json manifest = nlohmann::json::parse(read_file(opt.input));

    std::vector<std::future<CaseResult>> futures;
    for (const auto& c : manifest.at("cases"))
        futures.push_back(std::async(std::launch::async, [c, manifest_dir, &opt] {
            return run_corpus_case(c, manifest_dir, opt);
        }));

    int failures = 0, errors = 0, total = 0;
    nlohmann::ordered_json results = nlohmann::ordered_json::array();
    for (auto& f : futures) {
        CaseResult r = f.get();
        ++total;
        if (r.verdict == "FAIL") ++failures;
        if (r.verdict == "ERROR") ++errors;
        nlohmann::ordered_json j;
        j["file"] = r.file;
        j["verdict"] = r.verdict;
        if (!r.detail.empty()) j["detail"] = r.detail;
        results.push_back(std::move(j));
        if (opt.format != "json")
            std::cout << r.file << ": " << r.verdict << (r.detail.empty() ? "" : " (" + r.detail + ")")
                      << "\n";
    }
    nlohmann::ordered_json j;
    j["cases"] = std::move(results);
    j["total"] = total;
    j["failures"] = failures;
    j["errors"] = errors;
    if (opt.format == "json") std::cout << j.dump(2) << "\n";
    else std::cout << total - failures - errors << "/" << total << " passed\n";
    if (errors > 0) return kExitTypeError;
    return failures == 0 ? kExitPass : kExitFail;
}

} // namespace

// The evaluators recurse to the depth of the term under reduction, and
// diverging programs can grow their terms with every step; a roomy stack
// keeps such runs bounded by the step budget rather than by a crash.
void raise_stack_limit() {
#ifdef __linux__
    rlimit rl{};
    if (getrlimit(RLIMIT_STACK, &rl) == 0) {
        rlim_t want = 1ull << 30; // 1 GiB
        if (rl.rlim_cur != RLIM_INFINITY && rl.rlim_cur < want) {
            rl.rlim_cur = rl.rlim_max == RLIM_INFINITY ? want : std::min<rlim_t>(want, rl.rlim_max);
            setrlimit(RLIMIT_STACK, &rl);
        }
    }
#endif
}

int main(int argc, char** argv) {
    raise_stack_limit();
    CLI::App app{"FGG-minus reference compiler and differential-testing harness"};
    app.require_subcommand(1);

    Options opt;
    if (const char* env = std::getenv("FGG_MAX_STEPS")) opt.max_steps = std::strtoull(env, nullptr, 10);

    auto add_common = [&](CLI::App* sub, bool needs_input = true) {
        if (needs_input) sub->add_option("input", opt.input, "input file")->required();
        sub->add_option("--max-steps", opt.max_steps, "step budget");
        sub->add_option("--format", opt.format, "output format (text|json)")
            ->check(CLI::IsMember({"text", "json"}));
        sub->add_option("--base-types", [&](const std::vector<std::string>& vals) {
            opt.base_types = vals.at(0) == "on";
            return vals.at(0) == "on" || vals.at(0) == "off";
        }, "base-type extension (on|off)");
    };

    CLI::App* check = app.add_subcommand("check", "restrictions + well-formedness + typing");
    add_common(check);

    CLI::App* run = app.add_subcommand("run", "evaluate a source program");
    add_common(run);
    run->add_flag("--trace", opt.trace, "print one line per reduction step");

    CLI::App* compile = app.add_subcommand("compile", "translate to the target language");
    add_common(compile);
    compile->add_option("--strategy", opt.strategy, "direct|random[:SEED]");
    compile->add_option("--seed", opt.seed, "seed for random strategy");
    compile->add_option("--main-type", opt.main_type, "requested type for the main expression");
    compile->add_option("-o,--output", opt.output, "output file (default stdout)");

    CLI::App* run_tl = app.add_subcommand("run-tl", "evaluate a serialized target program");
    add_common(run_tl);

    CLI::App* diff = app.add_subcommand("diff", "differential source-vs-target run");
    add_common(diff);
    diff->add_option("--strategy", opt.strategies, "strategy (repeatable): direct|random[:SEED]");
    diff->add_option("--seed", opt.seed, "seed for plain 'random'");
    diff->add_option("--main-type", opt.main_type, "requested type for the main expression");

    CLI::App* cohere = app.add_subcommand("cohere", "compare two translations up to erasure");
    add_common(cohere);
    cohere->add_option("--strategy-a", opt.strategy_a, "direct|random[:SEED]");
    cohere->add_option("--strategy-b", opt.strategy_b, "direct|random[:SEED]");
    cohere->add_option("--seed", opt.seed, "seed for plain 'random'");
    cohere->add_option("--main-type-a", opt.main_type_a, "requested main type for side a");
    cohere->add_option("--main-type-b", opt.main_type_b, "requested main type for side b");

    CLI::App* corpus = app.add_subcommand("corpus", "run a corpus manifest");
    add_common(corpus);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (check->parsed()) return cmd_check(opt);
        if (run->parsed()) return cmd_run(opt);
        if (compile->parsed()) return cmd_compile(opt);
        if (run_tl->parsed()) return cmd_run_tl(opt);
        if (diff->parsed()) return cmd_diff(opt);
        if (cohere->parsed()) return cmd_cohere(opt);
        if (corpus->parsed()) return cmd_corpus(opt);
    } catch (const fgg::TypeError& err) {
        std::cerr << "error: " << err.diag.render() << "\n";
        return kExitTypeError;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
