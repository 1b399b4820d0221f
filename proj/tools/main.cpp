#include "twostep/checker.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace twostep;

// Relative output paths land in $TWOSTEP_OUT_DIR when it is set.
std::string resolve_output(const std::string& path) {
    if (path.empty())
        return path;
    std::filesystem::path p(path);
    if (p.is_absolute())
        return path;
    const char* dir = std::getenv("TWOSTEP_OUT_DIR");
    if (!dir || !*dir)
        return path;
    return (std::filesystem::path(dir) / p).string();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << content;
}

std::vector<ProcessId> parse_pid_list(const std::string& csv) {
    std::vector<ProcessId> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        if (item[0] == 'p' || item[0] == 'P')
            item = item.substr(1);
        out.push_back(std::stoi(item));
    }
    return out;
}

std::vector<Value> parse_domain(const std::string& csv) {
    std::vector<Value> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(value_from_string(item));
    return out;
}

struct CommonFlags {
    std::string variant = "task";
    int n = 0;
    int e = 1;
    int f = 1;
    Time delta = 10;
    bool allow_below_bound = false;
    std::string domain;

    Config to_config() const {
        Config cfg;
        cfg.variant = variant_from_string(variant);
        cfg.e = e;
        cfg.f = f;
        cfg.delta = delta;
        cfg.n = n > 0 ? n : required_n(e, f, cfg.variant);
        if (!domain.empty())
            cfg.value_domain = parse_domain(domain);
        cfg.validate(allow_below_bound);
        return cfg;
    }
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_domain = true) {
    cmd->add_option("--variant", flags.variant, "task or object")
        ->check(CLI::IsMember({"task", "object"}));
    cmd->add_option("--n", flags.n, "process count (default: the bound for e and f)");
    cmd->add_option("--e", flags.e, "fast-failure threshold");
    cmd->add_option("--f", flags.f, "resilience threshold");
    cmd->add_option("--delta", flags.delta, "message-delay unit in ticks");
    cmd->add_flag("--allow-below-bound", flags.allow_below_bound,
                  "permit n below the variant's bound");
    if (with_domain)
        cmd->add_option("--domain", flags.domain, "comma-separated value domain");
}

int emit_verdicts(const std::vector<Verdict>& verdicts, const std::string& out_path) {
    std::ostringstream records;
    for (const auto& v : verdicts)
        records << v.to_string() << '\n';
    std::cout << records.str() << summarize(verdicts);
    if (!out_path.empty())
        write_file(resolve_output(out_path), records.str());
    for (const auto& v : verdicts)
        if (!v.pass)
            return 1;
    return 0;
}

int cmd_run(const CommonFlags& flags, const std::string& schedule, std::uint64_t seed,
            Time gst, Time horizon, const std::string& faulty, const std::string& crashes,
            const std::string& proposals, const std::string& calls,
            const std::string& favored_flag, const std::string& omega, Time otimeout,
            const std::string& mutation,
            const std::string& groups, const std::string& rounds, std::uint64_t cseed,
            const std::string& scenario_file, const std::string& trace_path) {
    const ProcessId favored =
        favored_flag.empty() ? 0 : parse_pid_list(favored_flag).at(0);
    Scenario sc;
    if (!scenario_file.empty()) {
        sc = scenario_from_file(scenario_file);
    } else {
        Config cfg = flags.to_config();
        if (schedule == "sync") {
            std::set<ProcessId> e_set;
            for (ProcessId p : parse_pid_list(faulty))
                e_set.insert(p);
            ProcessId fav = favored;
            if (fav == 0) {
                for (ProcessId p = 1; p <= cfg.n && fav == 0; ++p)
                    if (!e_set.count(p))
                        fav = p;
            }
            sc = make_sync_schedule(cfg, e_set, fav);
        } else if (schedule == "splice") {
            std::vector<std::vector<ProcessId>> gs;
            std::stringstream ss(groups);
            std::string grp;
            while (std::getline(ss, grp, '|'))
                gs.push_back(parse_pid_list(grp));
            std::vector<int> rs;
            std::stringstream rr(rounds);
            std::string r;
            while (std::getline(rr, r, ','))
                if (!r.empty())
                    rs.push_back(std::stoi(r));
            std::set<ProcessId> crash_set;
            for (ProcessId p : parse_pid_list(faulty))
                crash_set.insert(p);
            sc = make_splice_schedule(cfg, gs, rs, crash_set, cseed);
        } else {
            sc.cfg = cfg;
            sc.cfg.gst = gst;
            sc.kind = ScheduleKind::random_walk;
            sc.seed = seed;
            std::stringstream ss(crashes);
            std::string item;
            while (std::getline(ss, item, ',')) {
                if (item.empty())
                    continue;
                auto at = item.find('@');
                Time t = 0;
                std::string pid = item;
                if (at != std::string::npos) {
                    t = std::stoll(item.substr(at + 1));
                    pid = item.substr(0, at);
                }
                if (pid[0] == 'p' || pid[0] == 'P')
                    pid = pid.substr(1);
                sc.crash_plan.emplace_back(t, std::stoi(pid));
            }
        }
        if (horizon > 0)
            sc.horizon = horizon;
        sc.omega = omega == "heartbeat" ? OmegaMode::heartbeat : OmegaMode::oracle;
        sc.omega_timeout = otimeout;
        sc.mutation = mutation == "drop-fast-guard" ? Mutation::drop_fast_own_support_guard
                                                    : Mutation::none;
        sc.allow_below_bound = flags.allow_below_bound;
        if (sc.cfg.variant == Variant::task) {
            std::stringstream ss(proposals);
            std::string item;
            ProcessId p = 1;
            while (std::getline(ss, item, ',')) {
                if (item != "_" && !item.empty())
                    sc.task_proposals[p] = value_from_string(item);
                ++p;
            }
        } else {
            std::stringstream ss(calls);
            std::string item;
            while (std::getline(ss, item, ',')) {
                if (item.empty())
                    continue;
                auto colon = item.find(':');
                auto at = item.find('@');
                if (colon == std::string::npos)
                    throw std::invalid_argument("bad --propose entry: " + item);
                std::string pid = item.substr(0, colon);
                if (pid[0] == 'p' || pid[0] == 'P')
                    pid = pid.substr(1);
                Time t = 0;
                std::string val = item.substr(colon + 1);
                if (at != std::string::npos && at > colon) {
                    val = item.substr(colon + 1, at - colon - 1);
                    t = std::stoll(item.substr(at + 1));
                }
                sc.object_calls.push_back({t, std::stoi(pid), value_from_string(val)});
            }
        }
    }

    sc.validate();
    Trace trace = run(sc);
    if (!trace_path.empty())
        write_file(resolve_output(trace_path), trace.to_text());

    validate_trace(trace);
    std::vector<Verdict> verdicts;
    verdicts.push_back(check_agreement(trace));
    verdicts.push_back(check_validity(trace, sc));
    verdicts.push_back(check_slow_path_safety(trace));

    std::cout << "scenario " << to_line(sc) << '\n';
    const auto decisions = trace.first_decisions();
    for (const auto& [p, tv] : decisions)
        std::cout << "decision p" << p << " " << to_string(tv.second) << " at t=" << tv.first
                  << '\n';
    if (decisions.empty())
        std::cout << "no decisions before the horizon\n";
    return emit_verdicts(verdicts, "");
}

int cmd_check(CommonFlags& flags, bool have_sizing, bool exhaustive,
              const std::string& out_path) {
    std::vector<Verdict> verdicts;
    TwoStepOptions opts;
    if (!flags.domain.empty())
        opts.domain = parse_domain(flags.domain);
    opts.exhaustive_orders = exhaustive;

    auto run_cell = [&](Config cfg) {
        Verdict ts = cfg.variant == Variant::task ? check_two_step_task(cfg, opts)
                                                  : check_two_step_object(cfg, opts);
        ts.property += " n=" + std::to_string(cfg.n) + " e=" + std::to_string(cfg.e) +
                       " f=" + std::to_string(cfg.f);
        verdicts.push_back(std::move(ts));
        if (cfg.n <= 8) {
            Config oc = cfg;
            oc.value_domain = opts.domain;
            Verdict ro = recovery_oracle(oc);
            ro.property += " n=" + std::to_string(cfg.n) + " e=" + std::to_string(cfg.e) +
                           " f=" + std::to_string(cfg.f) + " " + to_string(cfg.variant);
            verdicts.push_back(std::move(ro));
        }
    };

    if (have_sizing) {
        run_cell(flags.to_config());
    } else {
        for (int e = 1; e <= 3; ++e) {
            for (int f = e; f <= 3; ++f) {
                for (Variant variant : {Variant::task, Variant::object}) {
                    Config cfg;
                    cfg.variant = variant;
                    cfg.e = e;
                    cfg.f = f;
                    cfg.n = required_n(e, f, variant);
                    cfg.delta = flags.delta;
                    cfg.value_domain = opts.domain;
                    run_cell(cfg);
                }
            }
        }
    }
    return emit_verdicts(verdicts, out_path);
}

int cmd_fuzz(const CommonFlags& flags, std::uint64_t first_seed, std::uint64_t num_seeds,
             int crash_budget, const std::string& mutation, bool no_termination,
             const std::string& out_path, const std::string& witness_path) {
    FuzzOptions opts;
    opts.first_seed = first_seed;
    opts.num_seeds = num_seeds;
    opts.crash_budget = crash_budget;
    opts.mutation =
        mutation == "drop-fast-guard" ? Mutation::drop_fast_own_support_guard : Mutation::none;
    opts.require_termination = !no_termination && opts.mutation == Mutation::none;
    Verdict v = fuzz(flags.to_config(), opts);
    if (!v.pass && !witness_path.empty())
        write_file(resolve_output(witness_path), v.witness + "\n");
    return emit_verdicts({v}, out_path);
}

int cmd_oracle(const CommonFlags& flags, const std::string& out_path) {
    Verdict v = recovery_oracle(flags.to_config());
    return emit_verdicts({v}, out_path);
}

int cmd_replay(const std::string& path) {
    ReplayResult r = replay_file(path);
    if (r.ok) {
        std::cout << "replay ok: " << path << "\n";
        return 0;
    }
    std::cerr << "replay failed: " << r.message << "\n";
    return r.message.rfind("cannot open", 0) == 0 || r.message.rfind("empty trace", 0) == 0 ||
                   r.message.rfind("missing", 0) == 0
               ? 2
               : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-step consensus simulator and checker suite"};
    app.require_subcommand(1);
    app.set_config("--config")->configurable(false);

    CommonFlags run_flags, check_flags, fuzz_flags, oracle_flags;

    // run
    auto* c_run = app.add_subcommand("run", "simulate one scenario and write its trace");
    add_common(c_run, run_flags);
    std::string schedule = "sync", faulty, crashes, proposals, calls, omega_mode = "oracle";
    std::string mutation = "none", groups, rounds, scenario_file, trace_path, favored;
    std::uint64_t seed = 0, cseed = 0;
    Time gst = 0, horizon = 0, otimeout = 0;
    c_run->add_option("--schedule", schedule, "sync, random or splice")
        ->check(CLI::IsMember({"sync", "random", "splice"}));
    c_run->add_option("--seed", seed, "random-schedule seed");
    c_run->add_option("--gst", gst, "global stabilization time in ticks");
    c_run->add_option("--horizon", horizon, "simulated time limit in ticks");
    c_run->add_option("--faulty", faulty, "sync/splice crash set, e.g. p5,p6");
    c_run->add_option("--crash", crashes, "random-schedule crashes, e.g. p3@40,p5@0");
    c_run->add_option("--proposals", proposals,
                      "task proposals by process id; _ marks a crashed process");
    c_run->add_option("--propose", calls, "object propose() calls, e.g. p1:2@0,p4:1@30");
    c_run->add_option("--favored", favored, "process whose messages are ordered first");
    c_run->add_option("--omega", omega_mode, "oracle or heartbeat")
        ->check(CLI::IsMember({"oracle", "heartbeat"}));
    c_run->add_option("--omega-timeout", otimeout, "heartbeat suspicion timeout in ticks");
    c_run->add_option("--mutation", mutation, "none or drop-fast-guard")
        ->check(CLI::IsMember({"none", "drop-fast-guard"}));
    c_run->add_option("--groups", groups, "splice groups, e.g. p1,p2|p3,p4,p5");
    c_run->add_option("--rounds", rounds, "splice rounds per group, e.g. 2,2");
    c_run->add_option("--cseed", cseed, "splice continuation seed");
    c_run->add_option("--scenario", scenario_file, "load the scenario from a file");
    c_run->add_option("--trace", trace_path, "write the trace to this file");

    // check
    auto* c_check = app.add_subcommand(
        "check", "two-step and recovery checks (full default grid without sizing flags)");
    add_common(c_check, check_flags);
    bool exhaustive = false;
    std::string check_out;
    check_flags.domain = "0,1";
    c_check->add_flag("--exhaustive-orders", exhaustive,
                      "search all delivery orders instead of the favored-first schedule");
    c_check->add_option("--verdicts", check_out, "write verdict records to this file");

    // fuzz
    auto* c_fuzz = app.add_subcommand("fuzz", "seeded random and spliced schedules");
    add_common(c_fuzz, fuzz_flags);
    std::uint64_t first_seed = 0, num_seeds = 1000;
    int crash_budget = -1;
    bool no_termination = false;
    std::string fuzz_mutation = "none", fuzz_out, witness_out;
    c_fuzz->add_option("--first-seed", first_seed, "first seed");
    c_fuzz->add_option("--seeds", num_seeds, "number of seeds");
    c_fuzz->add_option("--crashes", crash_budget, "crash budget per run (default f)");
    c_fuzz->add_option("--mutation", fuzz_mutation, "none or drop-fast-guard")
        ->check(CLI::IsMember({"none", "drop-fast-guard"}));
    c_fuzz->add_flag("--no-termination", no_termination, "skip the termination bound");
    c_fuzz->add_option("--verdicts", fuzz_out, "write verdict records to this file");
    c_fuzz->add_option("--witness", witness_out, "write a failing scenario to this file");

    // oracle
    auto* c_oracle =
        app.add_subcommand("oracle", "exhaustive ballot-0 recovery check at the given size");
    add_common(c_oracle, oracle_flags);
    oracle_flags.domain = "0,1";
    std::string oracle_out;
    c_oracle->add_option("--verdicts", oracle_out, "write verdict records to this file");

    // replay
    auto* c_replay = app.add_subcommand("replay", "re-execute a trace file and compare");
    std::string replay_path;
    c_replay->add_option("trace", replay_path, "trace file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (c_run->parsed())
            return cmd_run(run_flags, schedule, seed, gst, horizon, faulty, crashes, proposals,
                           calls, favored, omega_mode, otimeout, mutation, groups, rounds,
                           cseed, scenario_file, trace_path);
        if (c_check->parsed())
            return cmd_check(check_flags,
                             c_check->count("--e") || c_check->count("--f") ||
                                 c_check->count("--n"),
                             exhaustive, check_out);
        if (c_fuzz->parsed())
            return cmd_fuzz(fuzz_flags, first_seed, num_seeds, crash_budget, fuzz_mutation,
                            no_termination, fuzz_out, witness_out);
        if (c_oracle->parsed())
            return cmd_oracle(oracle_flags, oracle_out);
        if (c_replay->parsed())
            return cmd_replay(replay_path);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
