#pragma once

#include <json.hpp>

#include "fgg/erase.hpp"
#include "fgg/tl_eval.hpp"
#include "fgg/tl_text.hpp"
#include "fgg/translate.hpp"

namespace fgg {

// ---------------------------------------------------------------------------
// Differential runs: evaluate the source once, each translation once, and
// compare outcomes. A PASS on (StepLimit, StepLimit) is budget-equivalent,
// never a divergence proof.

struct StrategyRun {
    Strategy strategy;
    std::string label;
    std::vector<Diag> diags; // translation errors abort this entry only
    bool translated = false;
    TypePtr main_type;
    Outcome<TLPtr> outcome;
    bool correspondence = false;
    EVPtr erased;
    std::string erase_error;
    std::string verdict; // PASS | FAIL | ERROR
};

struct DiffReport {
    Outcome<ExprPtr> source;
    std::vector<StrategyRun> targets;
    bool erased_agree = true;
    std::string verdict;
};

inline DiffReport differential_run(const Program& p, const std::vector<Strategy>& strategies,
                                   std::uint64_t max_steps = kDefaultMaxSteps,
                                   Sabotage sab = Sabotage::None) {
    DeclTable table(p);
    DiffReport report;
    report.source = eval_source(p, max_steps);

    for (const Strategy& strat : strategies) {
        StrategyRun run;
        run.strategy = strat;
        run.label = strategy_label(strat);
        TranslateResult tr = translate_program(p, strat, sab);
        if (!tr.ok()) {
            run.diags = tr.diags;
            run.verdict = "ERROR";
            report.targets.push_back(std::move(run));
            continue;
        }
        run.translated = true;
        run.main_type = tr.translation->main_type;
        run.outcome = eval_tl(tr.translation->program, max_steps);

        if (report.source.is_value() && run.outcome.is_value()) {
            run.correspondence =
                value_correspondence(report.source.value, run.outcome.value, run.main_type, table);
            try {
                run.erased = erase_at_type(run.main_type, run.outcome.value, table);
            } catch (const TypeError& err) {
                run.erase_error = err.diag.render();
            }
            run.verdict = run.correspondence && run.erased ? "PASS" : "FAIL";
        } else if (report.source.is_step_limit() && run.outcome.is_step_limit()) {
            run.verdict = "PASS"; // budget-equivalent
        } else {
            run.verdict = "FAIL";
        }
        report.targets.push_back(std::move(run));
    }

    const EVPtr* reference = nullptr;
    for (const auto& run : report.targets) {
        if (!run.erased) continue;
        if (!reference) reference = &run.erased;
        else if (!erased_equal(*reference, run.erased)) report.erased_agree = false;
    }
    bool all_pass = !report.targets.empty();
    for (const auto& run : report.targets)
        if (run.verdict != "PASS") all_pass = false;
    report.verdict = all_pass && report.erased_agree ? "PASS" : "FAIL";
    return report;
}

// ---------------------------------------------------------------------------
// Coherence: two translations of one program must evaluate to erased-equal
// values (or both exhaust the budget).

struct CoherenceSide {
    std::string label;
    std::vector<Diag> diags;
    bool translated = false;
    TypePtr main_type;
    Outcome<TLPtr> outcome;
    EVPtr erased;
    std::string erase_error;
};

struct CoherenceReport {
    CoherenceSide a, b;
    std::string verdict; // PASS | FAIL | ERROR
    std::string detail;
};

inline CoherenceSide coherence_side(const Program& p, const Strategy& strat, std::uint64_t max_steps,
                                    const DeclTable& table) {
    CoherenceSide side;
    side.label = strategy_label(strat);
    TranslateResult tr = translate_program(p, strat);
    if (!tr.ok()) {
        side.diags = tr.diags;
        return side;
    }
    side.translated = true;
    side.main_type = tr.translation->main_type;
    side.outcome = eval_tl(tr.translation->program, max_steps);
    if (side.outcome.is_value()) {
        try {
            side.erased = erase_at_type(side.main_type, side.outcome.value, table);
        } catch (const TypeError& err) {
            side.erase_error = err.diag.render();
        }
    }
    return side;
}

inline CoherenceReport coherence_check(const Program& p, const Strategy& a, const Strategy& b,
                                       std::uint64_t max_steps = kDefaultMaxSteps) {
    DeclTable table(p);
    CoherenceReport report;
    report.a = coherence_side(p, a, max_steps, table);
    report.b = coherence_side(p, b, max_steps, table);
    if (!report.a.translated || !report.b.translated) {
        report.verdict = "ERROR";
        report.detail = "translation failed";
        return report;
    }
    if (report.a.outcome.is_value() && report.b.outcome.is_value()) {
        if (report.a.erased && report.b.erased && erased_equal(report.a.erased, report.b.erased)) {
            report.verdict = "PASS";
        } else {
            report.verdict = "FAIL";
            report.detail = "erased values differ";
        }
    } else if (report.a.outcome.is_step_limit() && report.b.outcome.is_step_limit()) {
        report.verdict = "PASS";
        report.detail = "budget-equivalent";
    } else {
        report.verdict = "FAIL";
        report.detail = "outcome kinds differ";
    }
    return report;
}

// ---------------------------------------------------------------------------
// Stable JSON documents (field order fixed) for CI diffing.

using OrderedJson = nlohmann::ordered_json;

inline OrderedJson outcome_json(const Outcome<ExprPtr>& o) {
    OrderedJson j;
    j["outcome"] = o.is_value() ? "value" : o.is_step_limit() ? "step_limit" : "stuck";
    if (o.is_value()) j["value"] = print_expr(o.value);
    if (o.is_stuck()) j["diagnostic"] = o.diagnostic;
    j["steps"] = o.steps;
    return j;
}

inline OrderedJson outcome_json(const Outcome<TLPtr>& o) {
    OrderedJson j;
    j["outcome"] = o.is_value() ? "value" : o.is_step_limit() ? "step_limit" : "stuck";
    if (o.is_value()) j["value"] = print_tl(o.value);
    if (o.is_stuck()) j["diagnostic"] = o.diagnostic;
    j["steps"] = o.steps;
    return j;
}

inline OrderedJson diags_json(const std::vector<Diag>& diags) {
    OrderedJson arr = OrderedJson::array();
    for (const auto& d : diags) {
        OrderedJson j;
        j["code"] = code_name(d.code);
        j["message"] = d.message;
        if (d.pos) {
            j["line"] = d.pos->line;
            j["col"] = d.pos->col;
        }
        arr.push_back(std::move(j));
    }
    return arr;
}

inline OrderedJson diff_report_json(const DiffReport& r) {
    OrderedJson j;
    j["source"] = outcome_json(r.source);
    OrderedJson targets = OrderedJson::array();
    for (const auto& run : r.targets) {
        OrderedJson t;
        t["strategy"] = run.label;
        if (!run.translated) {
            t["verdict"] = run.verdict;
            t["diagnostics"] = diags_json(run.diags);
            targets.push_back(std::move(t));
            continue;
        }
        t["main_type"] = print_type(run.main_type);
        t["target"] = outcome_json(run.outcome);
        t["correspondence"] = run.correspondence;
        if (run.erased) t["erased"] = print_erased(run.erased);
        if (!run.erase_error.empty()) t["erase_error"] = run.erase_error;
        t["verdict"] = run.verdict;
        targets.push_back(std::move(t));
    }
    j["strategies"] = std::move(targets);
    j["erased_agree"] = r.erased_agree;
    j["verdict"] = r.verdict;
    return j;
}

inline OrderedJson coherence_side_json(const CoherenceSide& s) {
    OrderedJson j;
    j["strategy"] = s.label;
    if (!s.translated) {
        j["diagnostics"] = diags_json(s.diags);
        return j;
    }
    j["main_type"] = print_type(s.main_type);
    j["target"] = outcome_json(s.outcome);
    if (s.erased) j["erased"] = print_erased(s.erased);
    if (!s.erase_error.empty()) j["erase_error"] = s.erase_error;
    return j;
}

inline OrderedJson coherence_report_json(const CoherenceReport& r) {
    OrderedJson j;
    j["a"] = coherence_side_json(r.a);
    j["b"] = coherence_side_json(r.b);
    j["verdict"] = r.verdict;
    if (!r.detail.empty()) j["detail"] = r.detail;
    return j;
}

} // namespace fgg
