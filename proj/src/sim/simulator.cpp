#include "tremble/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "tremble/errors.hpp"

namespace tremble::sim {

using nlohmann::json;

std::size_t greedy_index(const solver::Strategy& strategy, ProductState current, const std::vector<StateId>& theta) {
    std::size_t best = 0;
    double best_v = 2;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const ProductState next{theta[i], strategy.dfa().step(current.q, strategy.model().label(theta[i]))};
        const double v = strategy.value_at(next);
        if (v < best_v) {
            best_v = v;
            best = i;
        }
    }
    return best;
}

NaturePolicy adversarial_greedy(std::shared_ptr<const solver::Strategy> strategy) {
    return [strategy](const NatureQuery& q) { return greedy_index(*strategy, q.current, q.theta); };
}

NaturePolicy uniform_random() {
    return [](const NatureQuery& q) {
        return std::min(q.theta.size() - 1, static_cast<std::size_t>(q.draw * static_cast<double>(q.theta.size())));
    };
}

NaturePolicy interactive(std::function<std::size_t(const NatureQuery&)> prompt) { return prompt; }

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::Running: return "running";
        case Outcome::Goal: return "goal";
        case Outcome::LeftRelevant: return "left-relevant";
        case Outcome::Truncated: return "truncated";
    }
    return "?";
}

Execution::Execution(const domain::Domain& d, const domain::ErrorModel& e,
                     std::shared_ptr<const solver::Strategy> strategy, std::uint64_t seed, std::size_t max_steps)
    : d_(d), e_(e), strategy_(std::move(strategy)), seed_(seed), max_steps_(max_steps), rng_(seed),
      current_(strategy_->initial()) {
    if (max_steps_ < 1) throw InputError("max_steps must be at least 1");
    classify();
}

void Execution::classify() {
    if (strategy_->goal(current_)) outcome_ = Outcome::Goal;
    else if (!strategy_->relevant(current_)) outcome_ = Outcome::LeftRelevant;
    else if (path_.size() >= max_steps_) outcome_ = Outcome::Truncated;
}

const Execution::Pending& Execution::propose() {
    if (finished()) throw InputError("the run has finished (" + to_string(outcome_) + ")");
    if (pending_) throw InputError("a step is already pending");
    const ActionId intended = strategy_->action(current_);
    const double slip = rng_.uniform(), draw = rng_.uniform();
    const auto dist = e_.dist(d_, current_.s, intended);
    ActionId instructed = dist.back().action;
    double acc = 0;
    for (const auto& m : dist) {
        acc += m.p;
        if (slip < acc) {
            instructed = m.action;
            break;
        }
    }
    pending_ = Pending{intended, instructed, d_.successors(current_.s, instructed), draw};
    return *pending_;
}

void Execution::resolve(std::size_t index) {
    if (!pending_) throw InputError("no pending step to resolve");
    if (index >= pending_->theta.size()) {
        throw IllegalObservation("choice " + std::to_string(index) + " is outside the " +
                                 std::to_string(pending_->theta.size()) + " possible successors");
    }
    const StateId chosen = pending_->theta[index];
    path_.push_back({path_.size(), current_.s, current_.q, pending_->intended, pending_->instructed, pending_->theta,
                     chosen});
    current_ = solver::advance(*strategy_, strategy_->dfa(), current_, chosen);
    pending_.reset();
    classify();
}

RunResult Execution::result() const {
    RunResult r;
    r.path = path_;
    r.outcome = outcome_;
    r.success = outcome_ == Outcome::Goal;
    r.steps = path_.size();
    r.seed = seed_;
    r.final_state = current_;
    return r;
}

std::size_t default_max_steps(const solver::Strategy& strategy) {
    return std::max<std::size_t>(1, 10 * strategy.num_relevant());
}

RunResult run(const domain::Domain& d, const domain::ErrorModel& e, std::shared_ptr<const solver::Strategy> strategy,
              const NaturePolicy& nature, std::uint64_t seed, std::size_t max_steps) {
    Execution ex(d, e, std::move(strategy), seed, max_steps);
    while (!ex.finished()) {
        const auto& p = ex.propose();
        std::size_t index = 0;
        if (p.theta.size() > 1) {
            index = nature(NatureQuery{ex.step(), ex.current(), p.intended, p.instructed, p.theta, p.nature_draw});
        }
        ex.resolve(index);
    }
    return ex.result();
}

MonteCarlo monte_carlo(const domain::Domain& d, const domain::ErrorModel& e,
                       std::shared_ptr<const solver::Strategy> strategy, const NaturePolicy& nature,
                       std::size_t n_runs, std::uint64_t base_seed, std::size_t max_steps, unsigned threads) {
    if (n_runs < 1) throw InputError("n_runs must be at least 1");
    MonteCarlo mc;
    mc.runs = n_runs;
    std::vector<char> ok(n_runs, 0);
    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) ok[i] = run(d, e, strategy, nature, base_seed + i, max_steps).success;
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_runs)));
    if (workers == 1) {
        work(0, n_runs);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (n_runs + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t lo = w * chunk, hi = std::min(n_runs, lo + chunk);
            if (lo < hi) pool.emplace_back(work, lo, hi);
        }
    }
    for (char c : ok) {
        mc.outcomes.push_back(c != 0);
        mc.successes += c != 0;
    }
    const double n = static_cast<double>(n_runs);
    mc.estimate = static_cast<double>(mc.successes) / n;
    mc.stderr_ = std::sqrt(mc.estimate * (1 - mc.estimate) / n);
    return mc;
}

json step_to_json(const solver::Strategy& strategy, const StepRecord& r) {
    return {{"step", r.step},
            {"s", r.s},
            {"q", ltlf::to_string(strategy.dfa().formula(r.q))},
            {"intended", r.intended},
            {"instructed", r.instructed},
            {"theta", r.theta},
            {"chosen", r.chosen}};
}

std::string run_log(const solver::Strategy& strategy, const std::vector<StepRecord>& path) {
    std::string out;
    for (const auto& r : path) out += step_to_json(strategy, r).dump() + "\n";
    return out;
}

}  // namespace tremble::sim
