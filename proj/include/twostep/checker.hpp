#pragma once

#include "twostep/simnet.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace twostep {

// Outcome of one executable property. A failing verdict carries a witness
// that reproduces the failure: a scenario line for run-based properties, or
// a vote-configuration description for the recovery oracle.
struct Verdict {
    std::string property;
    bool pass = true;
    std::string witness;
    std::string detail;
    std::map<std::string, std::int64_t> stats;

    std::string to_string() const; // one-line machine-readable record
};

// Safety and liveness predicates over a single trace.
Verdict check_agreement(const Trace& trace);
Verdict check_validity(const Trace& trace, const Scenario& scenario);
Verdict check_termination(const Trace& trace, const Config& cfg, Time bound);

// Slow-path safety: once n-f distinct processes have voted for (b, v) with
// b > 0, every 2A at a ballot >= b must carry v.
Verdict check_slow_path_safety(const Trace& trace);

struct TwoStepOptions {
    std::vector<Value> domain = {Value::of(0), Value::of(1)};
    // Discharge the existential over delivery orders by searching all sender
    // permutations instead of using the favored-first construction. Only
    // sensible for n <= 4.
    bool exhaustive_orders = false;
    std::int64_t max_cases = 2'000'000; // guard against unenumerable domains
};

// Task variant: for every failure set E of size e and every initial
// configuration, the favored-first synchronous run decides within two
// message delays; when all correct processes share one value, it does so at
// every correct process in turn.
Verdict check_two_step_task(const Config& cfg, const TwoStepOptions& opts = {});

// Object variant: for every E, value v and correct p, the run where only p
// proposes v decides at p by two delays, and so does the run where all
// correct processes propose v with p's message ordered first.
Verdict check_two_step_object(const Config& cfg, const TwoStepOptions& opts = {});

// Exhaustive ballot-0 recovery check: enumerates every vote configuration
// reachable under the variant's rules in which some value holds a fast
// quorum, and asserts that compute_proposal returns that value for every
// (n-f)-quorum and every coordinator in it. At the variant's bound this
// passes; one process below it, counterexamples exist.
Verdict recovery_oracle(const Config& cfg);

struct FuzzOptions {
    std::uint64_t first_seed = 0;
    std::uint64_t num_seeds = 1000;
    int crash_budget = -1; // -1 = up to f
    Mutation mutation = Mutation::none;
    bool require_termination = true;
    Time termination_slack = 0; // 0 = 15 * delta past GST
};

// Builds the seeded scenario the fuzzer runs for this seed (three random
// schedules followed by one spliced schedule, repeating).
Scenario fuzz_scenario(const Config& cfg, std::uint64_t seed, int crash_budget,
                       Mutation mutation = Mutation::none);

// Runs seeded random and spliced schedules and applies agreement, validity,
// slow-path safety and (optionally) the post-GST termination bound to every
// trace. Aggregates one verdict with the first failing seed's scenario as
// witness.
Verdict fuzz(const Config& cfg, const FuzzOptions& opts = {});

// Human-readable table of verdicts.
std::string summarize(const std::vector<Verdict>& verdicts);

} // namespace twostep
