#include "twostep/protocol.hpp"

#include <algorithm>
#include <sstream>

namespace twostep {

std::optional<Value> compute_proposal(const std::vector<std::pair<ProcessId, OneB>>& replies,
                                      const std::set<ProcessId>& quorum, const Config& cfg,
                                      Value own_initial) {
    if (static_cast<int>(quorum.size()) < cfg.n - cfg.f)
        throw std::invalid_argument("compute_proposal: quorum smaller than n-f");
    if (replies.size() != quorum.size())
        throw std::invalid_argument("compute_proposal: replies do not match quorum");
    std::set<ProcessId> senders;
    for (const auto& [from, payload] : replies) {
        if (!senders.insert(from).second)
            throw std::invalid_argument("compute_proposal: duplicate sender");
        if (!quorum.count(from))
            throw std::invalid_argument("compute_proposal: sender outside quorum");
    }

    // A reported decision wins outright.
    std::optional<Value> decided;
    for (const auto& [from, r] : replies)
        if (r.decided && (!decided || *decided < *r.decided))
            decided = r.decided;
    if (decided)
        return decided;

    // Votes at the highest slow ballot supersede everything at ballot 0.
    Ballot bmax = 0;
    for (const auto& [from, r] : replies)
        bmax = std::max(bmax, r.vbal);
    if (bmax > 0) {
        std::optional<Value> best;
        for (const auto& [from, r] : replies)
            if (r.vbal == bmax && r.val && (!best || *best < *r.val))
                best = r.val;
        return best;
    }

    // Ballot 0: a value is a candidate only if some vote for it records a
    // proposer outside the quorum (proposers inside the quorum have joined a
    // slow ballot and can no longer take the fast path).
    std::map<Value, int> votes;
    std::set<Value> candidates;
    for (const auto& [from, r] : replies) {
        if (r.vbal != 0 || !r.val)
            continue;
        ++votes[*r.val];
        if (r.val_proposer && !quorum.count(*r.val_proposer))
            candidates.insert(*r.val);
    }
    const int threshold = cfg.n - cfg.f - cfg.e;
    std::optional<Value> over, exact;
    for (Value v : candidates) {
        if (votes[v] > threshold && (!over || *over < v))
            over = v;
        else if (votes[v] == threshold && (!exact || *exact < v))
            exact = v;
    }
    if (over)
        return over;
    if (exact)
        return exact;

    if (!own_initial.is_bottom())
        return own_initial;

    // Object-variant fall-back: nothing recoverable was voted, so any
    // reported value is safe to propose; prefer the greatest. Abstain when
    // the replies carry no value at all.
    std::optional<Value> best;
    for (const auto& [from, r] : replies) {
        if (r.val && !r.val->is_bottom() && (!best || *best < *r.val))
            best = r.val;
        if (!r.initial.is_bottom() && (!best || *best < r.initial))
            best = r.initial;
    }
    return best;
}

Process::Process(const Config& cfg, ProcessId pid, Mutation mutation)
    : cfg_(cfg), mutation_(mutation) {
    if (pid < 1 || pid > cfg.n)
        throw std::invalid_argument("process id out of range");
    st_.pid = pid;
}

std::vector<Effect> Process::start(std::optional<Value> initial) {
    if (st_.started)
        throw std::invalid_argument("start: already started");
    st_.started = true;
    std::vector<Effect> out;
    if (cfg_.variant == Variant::task) {
        if (!initial || initial->is_bottom())
            throw std::invalid_argument("start: task variant needs a proper initial value");
        st_.initial_val = *initial;
        // implicit self-vote
        st_.val = *initial;
        st_.vbal = 0;
        st_.val_proposer = st_.pid;
        out.push_back(Broadcast{ProposeMsg{*initial, st_.pid}});
    } else {
        if (initial)
            throw std::invalid_argument("start: object variant starts without an initial value");
        st_.initial_val = Value::bottom();
    }
    out.push_back(SetTimer{2 * cfg_.delta});
    return out;
}

std::vector<Effect> Process::propose(Value v) {
    if (cfg_.variant != Variant::object)
        throw std::invalid_argument("propose: only the object variant proposes explicitly");
    if (v.is_bottom())
        throw std::invalid_argument("propose: Bottom cannot be proposed");
    if (st_.proposed)
        throw std::invalid_argument("propose: already proposed on this process");
    st_.proposed = true;
    st_.initial_val = v;
    std::vector<Effect> out;
    if (st_.val && *st_.val != v) {
        // Already voted for someone else's value: keep the vote, send no
        // Propose. The decision reaches this process via the normal flow.
        return out;
    }
    if (!st_.val) {
        st_.val = v;
        st_.vbal = 0;
        st_.val_proposer = st_.pid;
    }
    out.push_back(Broadcast{ProposeMsg{v, st_.pid}});
    return out;
}

std::vector<Effect> Process::on_propose(ProcessId from, Value v) {
    if (from == st_.pid)
        throw std::invalid_argument("on_propose: a process never receives its own proposal");
    std::vector<Effect> out;
    // A decided proposer must not vote: its implicit support was already
    // consumed by its own fast decision, and casting a fresh vote for a
    // higher value would let that value assemble a second fast quorum.
    if (st_.bal != 0 || st_.voted_ballot0 || st_.decided)
        return out;
    if (v < st_.initial_val)
        return out;
    if (cfg_.variant == Variant::object && !st_.initial_val.is_bottom() && st_.initial_val != v)
        return out;
    st_.val = v;
    st_.vbal = 0;
    st_.val_proposer = from;
    st_.voted_ballot0 = true;
    out.push_back(Send{from, TwoB{0, v}});
    return out;
}

void Process::apply_one_a(ProcessId from, Ballot b, std::vector<Effect>& out) {
    if (b <= st_.bal)
        return;
    st_.bal = b;
    out.push_back(Send{from, OneB{b, st_.vbal, st_.val, st_.val_proposer, st_.decided,
                                  st_.initial_val}});
}

std::vector<Effect> Process::on_one_a(ProcessId from, Ballot b) {
    std::vector<Effect> out;
    apply_one_a(from, b, out);
    return out;
}

void Process::try_recover(Ballot b, std::vector<Effect>& out) {
    auto& replies = st_.oneb_replies[b];
    if (static_cast<int>(replies.size()) < cfg_.n - cfg_.f)
        return;
    std::set<ProcessId> quorum;
    for (const auto& [from, payload] : replies)
        quorum.insert(from);
    auto v = compute_proposal(replies, quorum, cfg_, st_.initial_val);
    if (!v) {
        // Nothing proposable yet (object variant). Keep the ballot open and
        // re-run on later replies rather than burning it.
        st_.recovery[b] = RecoveryState::abstained;
        return;
    }
    st_.recovery[b] = RecoveryState::closed;
    st_.pending_2a = *v;
    out.push_back(Broadcast{TwoA{b, *v}});
    apply_two_a(st_.pid, b, *v, out); // the coordinator votes for its own 2A
}

std::vector<Effect> Process::on_one_b(ProcessId from, const OneB& payload) {
    if (ballot_owner(payload.ballot, cfg_.n) != st_.pid)
        throw std::invalid_argument("on_one_b: reply for a ballot not owned by this process");
    std::vector<Effect> out;
    auto state = st_.recovery.find(payload.ballot);
    if (state != st_.recovery.end() && state->second == RecoveryState::closed)
        return out;
    auto& replies = st_.oneb_replies[payload.ballot];
    for (const auto& [sender, existing] : replies)
        if (sender == from)
            return out;
    replies.emplace_back(from, payload);
    try_recover(payload.ballot, out);
    return out;
}

void Process::apply_two_a(ProcessId from, Ballot b, Value v, std::vector<Effect>& out) {
    if (b < st_.bal)
        return;
    if (st_.vbal == b && st_.val != v)
        return; // conflicting 2A on an already-voted ballot; ignore
    if (st_.vbal > b)
        return;
    st_.bal = b;
    st_.vbal = b;
    st_.val = v;
    st_.val_proposer = from;
    out.push_back(Send{from, TwoB{b, v}});
}

std::vector<Effect> Process::on_two_a(ProcessId from, Ballot b, Value v) {
    if (b <= 0)
        throw std::invalid_argument("on_two_a: 2A only exists on slow ballots");
    std::vector<Effect> out;
    apply_two_a(from, b, v, out);
    return out;
}

std::vector<Effect> Process::decide_effects(Value v) {
    st_.decided = v;
    std::vector<Effect> out;
    out.push_back(Decided{v});
    out.push_back(Broadcast{DecideMsg{v}});
    out.push_back(StopTimer{});
    return out;
}

std::vector<Effect> Process::on_two_b(ProcessId from, Ballot b, Value v) {
    std::vector<Effect> out;
    if (b == 0)
        st_.fast_votes[v].insert(from);
    else
        st_.slow_votes[{b, v}].insert(from);
    if (st_.decided)
        return out;

    if (b == 0) {
        // Fast path: own proposal, still at ballot 0, own support intact,
        // and n-e-1 distinct supporters (self is the n-e-th, implicitly).
        const bool own_support =
            mutation_ == Mutation::drop_fast_own_support_guard || st_.val == v;
        if (st_.bal == 0 && !st_.initial_val.is_bottom() && v == st_.initial_val &&
            own_support &&
            static_cast<int>(st_.fast_votes[v].size()) >= cfg_.n - cfg_.e - 1) {
            return decide_effects(v);
        }
        return out;
    }

    if (ballot_owner(b, cfg_.n) == st_.pid && st_.pending_2a == v &&
        static_cast<int>(st_.slow_votes[{b, v}].size()) >= cfg_.n - cfg_.f) {
        return decide_effects(v);
    }
    return out;
}

std::vector<Effect> Process::on_decide(Value v) {
    std::vector<Effect> out;
    if (st_.decided) {
        if (*st_.decided != v) {
            std::ostringstream os;
            os << "agreement violation at p" << st_.pid << ": decided "
               << to_string(*st_.decided) << ", received Decide(" << to_string(v) << ")";
            throw ProtocolFault(os.str());
        }
        return out;
    }
    return decide_effects(v);
}

std::vector<Effect> Process::on_timer(ProcessId leader) {
    std::vector<Effect> out;
    out.push_back(SetTimer{5 * cfg_.delta});
    if (leader != st_.pid || st_.decided)
        return out;
    Ballot b = st_.bal + 1;
    while (ballot_owner(b, cfg_.n) != st_.pid)
        ++b;
    out.push_back(Broadcast{OneA{b}});
    // Join the own ballot immediately; the resulting 1B is self-addressed and
    // the simulator applies it in place.
    apply_one_a(st_.pid, b, out);
    return out;
}

std::vector<Effect> Process::on_message(ProcessId from, const Message& m) {
    return std::visit(
        [&](const auto& msg) -> std::vector<Effect> {
            using T = std::decay_t<decltype(msg)>;
            if constexpr (std::is_same_v<T, ProposeMsg>)
                return on_propose(msg.proposer, msg.value);
            else if constexpr (std::is_same_v<T, OneA>)
                return on_one_a(from, msg.ballot);
            else if constexpr (std::is_same_v<T, OneB>)
                return on_one_b(from, msg);
            else if constexpr (std::is_same_v<T, TwoA>)
                return on_two_a(from, msg.ballot, msg.value);
            else if constexpr (std::is_same_v<T, TwoB>)
                return on_two_b(from, msg.ballot, msg.value);
            else
                return on_decide(msg.value);
        },
        m);
}

} // namespace twostep
