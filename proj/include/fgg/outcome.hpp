#pragma once

#include <cstdint>
#include <string>

namespace fgg {

// Result of running an evaluator for a bounded number of steps. Divergence
// shows up as StepLimit, never as an error; Stuck carries a diagnostic
// naming the offending redex.
template <typename V>
struct Outcome {
    enum class Kind { Value, StepLimit, Stuck };

    Kind kind = Kind::Stuck;
    V value{};
    std::uint64_t steps = 0;
    std::string diagnostic;

    static Outcome make_value(V v, std::uint64_t steps) {
        Outcome o;
        o.kind = Kind::Value;
        o.value = std::move(v);
        o.steps = steps;
        return o;
    }
    static Outcome make_step_limit(std::uint64_t steps) {
        Outcome o;
        o.kind = Kind::StepLimit;
        o.steps = steps;
        return o;
    }
    static Outcome make_stuck(std::string why, std::uint64_t steps) {
        Outcome o;
        o.kind = Kind::Stuck;
        o.diagnostic = std::move(why);
        o.steps = steps;
        return o;
    }

    bool is_value() const { return kind == Kind::Value; }
    bool is_step_limit() const { return kind == Kind::StepLimit; }
    bool is_stuck() const { return kind == Kind::Stuck; }
};

constexpr std::uint64_t kDefaultMaxSteps = 1'000'000;

} // namespace fgg
