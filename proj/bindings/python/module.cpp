#include "twostep/checker.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace twostep;

namespace {

Variant variant_arg(const std::string& s) { return variant_from_string(s); }

Config make_config(const std::string& variant, int e, int f, int n,
                   const std::vector<int>& domain, Time delta, bool allow_below_bound) {
    Config cfg;
    cfg.variant = variant_arg(variant);
    cfg.e = e;
    cfg.f = f;
    cfg.delta = delta;
    cfg.n = n > 0 ? n : required_n(e, f, cfg.variant);
    if (!domain.empty()) {
        cfg.value_domain.clear();
        for (int v : domain)
            cfg.value_domain.push_back(Value::of(v));
    }
    cfg.validate(allow_below_bound);
    return cfg;
}

py::dict verdict_dict(const Verdict& v) {
    py::dict d;
    d["property"] = v.property;
    d["pass"] = v.pass;
    d["witness"] = v.witness;
    d["detail"] = v.detail;
    py::dict stats;
    for (const auto& [k, val] : v.stats)
        stats[py::str(k)] = val;
    d["stats"] = stats;
    return d;
}

py::dict trace_dict(const Trace& t) {
    py::dict d;
    d["text"] = t.to_text();
    d["scenario"] = to_line(t.scenario);
    py::dict decisions;
    for (const auto& [p, tv] : t.first_decisions()) {
        py::dict one;
        one["time"] = tv.first;
        one["value"] = tv.second.payload();
        decisions[py::int_(p)] = one;
    }
    d["decisions"] = decisions;
    d["max_decision_time"] = t.max_decision_time();
    d["faults"] = t.fault_count();
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "two-step consensus simulator and checkers (C++ core)";

    m.def("required_n", [](int e, int f, const std::string& variant) {
        return required_n(e, f, variant_arg(variant));
    },
          py::arg("e"), py::arg("f"), py::arg("variant"),
          "Minimal process count for an e-two-step, f-resilient protocol.");

    m.def("run_scenario", [](const std::string& scenario_line) {
        Scenario sc = scenario_from_line(scenario_line);
        sc.validate();
        Trace t = run(sc);
        validate_trace(t);
        return trace_dict(t);
    },
          py::arg("scenario"),
          "Execute one scenario (canonical key=value line) and return its trace.");

    m.def("check_two_step",
          [](const std::string& variant, int e, int f, int n, const std::vector<int>& domain) {
              Config cfg = make_config(variant, e, f, n, domain, 10, false);
              TwoStepOptions opts;
              opts.domain = cfg.value_domain;
              Verdict v = cfg.variant == Variant::task ? check_two_step_task(cfg, opts)
                                                       : check_two_step_object(cfg, opts);
              return verdict_dict(v);
          },
          py::arg("variant"), py::arg("e"), py::arg("f"), py::arg("n") = 0,
          py::arg("domain") = std::vector<int>{0, 1},
          "Exhaustive two-step check at the given size (default: the bound).");

    m.def("recovery_oracle",
          [](const std::string& variant, int e, int f, int n, const std::vector<int>& domain,
             bool allow_below_bound) {
              Config cfg = make_config(variant, e, f, n, domain, 10, allow_below_bound);
              return verdict_dict(recovery_oracle(cfg));
          },
          py::arg("variant"), py::arg("e"), py::arg("f"), py::arg("n") = 0,
          py::arg("domain") = std::vector<int>{0, 1}, py::arg("allow_below_bound") = false,
          "Exhaustive ballot-0 recovery check over all vote configurations and quorums.");

    m.def("fuzz",
          [](const std::string& variant, int e, int f, int n, std::uint64_t seeds,
             std::uint64_t first_seed, int crashes, const std::string& mutation,
             bool require_termination) {
              Config cfg = make_config(variant, e, f, n, {0, 1}, 10, false);
              FuzzOptions opts;
              opts.first_seed = first_seed;
              opts.num_seeds = seeds;
              opts.crash_budget = crashes;
              opts.mutation = mutation == "drop-fast-guard"
                                  ? Mutation::drop_fast_own_support_guard
                                  : Mutation::none;
              opts.require_termination = require_termination && opts.mutation == Mutation::none;
              return verdict_dict(fuzz(cfg, opts));
          },
          py::arg("variant"), py::arg("e"), py::arg("f"), py::arg("n") = 0,
          py::arg("seeds") = 1000, py::arg("first_seed") = 0, py::arg("crashes") = -1,
          py::arg("mutation") = "none", py::arg("require_termination") = true,
          "Seeded random and spliced schedules with safety and termination checks.");

    m.def("replay", [](const std::string& trace_text) {
        ReplayResult r = replay_text(trace_text);
        py::dict d;
        d["ok"] = r.ok;
        d["message"] = r.message;
        return d;
    },
          py::arg("trace_text"), "Re-execute a recorded trace and compare byte-for-byte.");

    m.def("sync_scenario",
          [](const std::string& variant, int e, int f, int n, const std::vector<int>& faulty,
             int favored, const std::map<int, int>& proposals,
             const std::vector<std::tuple<int, int, int>>& calls) {
              Config cfg = make_config(variant, e, f, n, {}, 10, false);
              std::set<ProcessId> e_set(faulty.begin(), faulty.end());
              Scenario sc = make_sync_schedule(cfg, e_set, favored);
              for (const auto& [p, v] : proposals)
                  sc.task_proposals[p] = Value::of(v);
              for (const auto& [t, p, v] : calls)
                  sc.object_calls.push_back({t, p, Value::of(v)});
              sc.validate();
              return to_line(sc);
          },
          py::arg("variant"), py::arg("e"), py::arg("f"), py::arg("n"), py::arg("faulty"),
          py::arg("favored"), py::arg("proposals") = std::map<int, int>{},
          py::arg("calls") = std::vector<std::tuple<int, int, int>>{},
          "Build the favored-first E-faulty synchronous scenario line.");
}
