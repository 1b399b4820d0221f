#include "twostep/model.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace twostep {

int required_n(int e, int f, Variant variant) {
    if (e < 1)
        throw std::invalid_argument("required_n: e must be at least 1");
    if (e > f)
        throw std::invalid_argument("required_n: e must not exceed f");
    const int fast = variant == Variant::task ? 2 * e + f : 2 * e + f - 1;
    return std::max(fast, 2 * f + 1);
}

ProcessId ballot_owner(Ballot b, int n) {
    if (b <= 0 || n <= 0)
        throw std::invalid_argument("ballot_owner: need b > 0 and n > 0");
    return static_cast<ProcessId>((b - 1) % n) + 1;
}

void Config::validate(bool allow_below_bound) const {
    if (n < 1)
        throw std::invalid_argument("config: n must be positive");
    if (e < 0 || f < 0)
        throw std::invalid_argument("config: e and f must be non-negative");
    if (e > f)
        throw std::invalid_argument("config: e must not exceed f");
    if (delta <= 0)
        throw std::invalid_argument("config: delta must be positive");
    if (gst < 0)
        throw std::invalid_argument("config: gst must be non-negative");
    if (value_domain.empty())
        throw std::invalid_argument("config: value domain must not be empty");
    for (std::size_t i = 0; i < value_domain.size(); ++i) {
        if (value_domain[i].is_bottom())
            throw std::invalid_argument("config: Bottom is implicit, not a domain element");
        if (i > 0 && !(value_domain[i - 1] < value_domain[i]))
            throw std::invalid_argument("config: value domain must be strictly increasing");
    }
    if (!allow_below_bound && e >= 1) {
        const int need = required_n(e, f, variant);
        if (n < need) {
            std::ostringstream os;
            os << "config: n=" << n << " is below the bound " << need << " for e=" << e
               << " f=" << f << " variant=" << to_string(variant)
               << " (pass allow_below_bound to override)";
            throw std::invalid_argument(os.str());
        }
    }
}

std::string to_string(Value v) {
    if (v.is_bottom())
        return "bot";
    return std::to_string(v.payload());
}

std::string to_string(Variant v) {
    return v == Variant::task ? "task" : "object";
}

Variant variant_from_string(const std::string& s) {
    if (s == "task")
        return Variant::task;
    if (s == "object")
        return Variant::object;
    throw std::invalid_argument("unknown variant: " + s);
}

Value value_from_string(const std::string& s) {
    if (s == "bot")
        return Value::bottom();
    return Value::of(std::stoi(s));
}

namespace {

std::string opt_str(const std::optional<Value>& v) {
    return v ? to_string(*v) : "-";
}

std::string opt_str(const std::optional<ProcessId>& p) {
    return p ? "p" + std::to_string(*p) : "-";
}

} // namespace

std::string to_string(const Message& m) {
    std::ostringstream os;
    std::visit(
        [&](const auto& msg) {
            using T = std::decay_t<decltype(msg)>;
            if constexpr (std::is_same_v<T, ProposeMsg>) {
                os << "Propose(v=" << to_string(msg.value) << ",from=p" << msg.proposer << ")";
            } else if constexpr (std::is_same_v<T, OneA>) {
                os << "1A(b=" << msg.ballot << ")";
            } else if constexpr (std::is_same_v<T, OneB>) {
                os << "1B(b=" << msg.ballot << ",vbal=" << msg.vbal << ",val=" << opt_str(msg.val)
                   << ",prop=" << opt_str(msg.val_proposer) << ",dec=" << opt_str(msg.decided)
                   << ",init=" << to_string(msg.initial) << ")";
            } else if constexpr (std::is_same_v<T, TwoA>) {
                os << "2A(b=" << msg.ballot << ",v=" << to_string(msg.value) << ")";
            } else if constexpr (std::is_same_v<T, TwoB>) {
                os << "2B(b=" << msg.ballot << ",v=" << to_string(msg.value) << ")";
            } else {
                os << "Decide(v=" << to_string(msg.value) << ")";
            }
        },
        m);
    return os.str();
}

std::string to_string(const Effect& e) {
    std::ostringstream os;
    std::visit(
        [&](const auto& eff) {
            using T = std::decay_t<decltype(eff)>;
            if constexpr (std::is_same_v<T, Send>) {
                os << "send(p" << eff.to << "," << to_string(eff.msg) << ")";
            } else if constexpr (std::is_same_v<T, Broadcast>) {
                os << "broadcast(" << to_string(eff.msg) << ")";
            } else if constexpr (std::is_same_v<T, Decided>) {
                os << "decided(" << to_string(eff.value) << ")";
            } else if constexpr (std::is_same_v<T, SetTimer>) {
                os << "set_timer(" << eff.duration << ")";
            } else {
                os << "stop_timer";
            }
        },
        e);
    return os.str();
}

} // namespace twostep
