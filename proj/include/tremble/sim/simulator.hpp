#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tremble/domain/error_model.hpp"
#include "tremble/solver/strategy.hpp"

namespace tremble::sim {

using domain::ActionId;
using domain::StateId;
using solver::ProductState;

/// Per-run random source. Every step draws exactly two numbers (slip, then
/// nature), so draw k of a run is a function of (seed, step index) alone.
class StepRng {
public:
    explicit StepRng(std::uint64_t seed) : gen_(seed) {}
    /// Uniform in [0, 1), from the top 53 bits of one 64-bit output.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 gen_;
};

/// What the nature sees when it resolves a step.
struct NatureQuery {
    std::size_t step;
    ProductState current;
    ActionId intended;
    ActionId instructed;
    const std::vector<StateId>& theta;  // F(s, instructed), ascending
    double draw;                        // this step's nature random number
};

/// Returns an index into query.theta.
using NaturePolicy = std::function<std::size_t(const NatureQuery&)>;

/// Successor minimizing the strategy's value, lowest state id on ties.
NaturePolicy adversarial_greedy(std::shared_ptr<const solver::Strategy> strategy);
NaturePolicy uniform_random();
/// Defers to a caller-supplied prompt.
NaturePolicy interactive(std::function<std::size_t(const NatureQuery&)> prompt);

/// Index AdversarialGreedy would pick.
std::size_t greedy_index(const solver::Strategy& strategy, ProductState current, const std::vector<StateId>& theta);

enum class Outcome { Running, Goal, LeftRelevant, Truncated };
std::string to_string(Outcome o);

struct StepRecord {
    std::size_t step;
    StateId s;
    ltlf::DfaState q;
    ActionId intended;
    ActionId instructed;
    std::vector<StateId> theta;
    StateId chosen;
    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct RunResult {
    std::vector<StepRecord> path;
    bool success = false;
    Outcome outcome = Outcome::Running;
    std::size_t steps = 0;
    std::uint64_t seed = 0;
    ProductState final_state{};
    friend bool operator==(const RunResult&, const RunResult&) = default;
};

/// One live execution, driven either by run() or step by step by the serve
/// mode: propose() samples the slip and exposes the successor set, resolve()
/// applies the nature's choice.
class Execution {
public:
    /// `d` and `e` must outlive the execution.
    Execution(const domain::Domain& d, const domain::ErrorModel& e, std::shared_ptr<const solver::Strategy> strategy,
              std::uint64_t seed, std::size_t max_steps);

    struct Pending {
        ActionId intended;
        ActionId instructed;
        std::vector<StateId> theta;
        double nature_draw;
    };

    Outcome outcome() const noexcept { return outcome_; }
    bool finished() const noexcept { return outcome_ != Outcome::Running; }
    ProductState current() const noexcept { return current_; }
    std::size_t step() const noexcept { return path_.size(); }
    const std::optional<Pending>& pending() const noexcept { return pending_; }
    const std::vector<StepRecord>& path() const noexcept { return path_; }
    const solver::Strategy& strategy() const noexcept { return *strategy_; }

    /// Throws InputError when finished or when a step is already pending.
    const Pending& propose();
    /// Throws InputError without a pending step and IllegalObservation when
    /// `index` is not a position in the successor set.
    void resolve(std::size_t index);

    RunResult result() const;

private:
    void classify();

    const domain::Domain& d_;
    const domain::ErrorModel& e_;
    std::shared_ptr<const solver::Strategy> strategy_;
    std::uint64_t seed_;
    std::size_t max_steps_;
    StepRng rng_;
    ProductState current_;
    Outcome outcome_ = Outcome::Running;
    std::optional<Pending> pending_;
    std::vector<StepRecord> path_;
};

/// 10 × the number of relevant product states, at least 1.
std::size_t default_max_steps(const solver::Strategy& strategy);

RunResult run(const domain::Domain& d, const domain::ErrorModel& e, std::shared_ptr<const solver::Strategy> strategy,
              const NaturePolicy& nature, std::uint64_t seed, std::size_t max_steps);

struct MonteCarlo {
    double estimate = 0;
    double stderr_ = 0;
    std::size_t successes = 0;
    std::size_t runs = 0;
    std::vector<bool> outcomes;  // per seed, in seed order
};

/// Runs seeds base_seed .. base_seed + n_runs - 1. Results do not depend on
/// `threads`; with threads > 1 the nature must be safe to call concurrently.
MonteCarlo monte_carlo(const domain::Domain& d, const domain::ErrorModel& e,
                       std::shared_ptr<const solver::Strategy> strategy, const NaturePolicy& nature,
                       std::size_t n_runs, std::uint64_t base_seed, std::size_t max_steps, unsigned threads = 1);

/// One JSON object per line: step, s, q (formula text), intended, instructed,
/// theta, chosen.
std::string run_log(const solver::Strategy& strategy, const std::vector<StepRecord>& path);
nlohmann::json step_to_json(const solver::Strategy& strategy, const StepRecord& r);

}  // namespace tremble::sim
