#pragma once

// Departure dynamics: n -> n/2 for even n, n -> h*n + sign for odd n.
// (3, +1) is the Collatz map, (3, -1) the "3n-1" variant.

#include "exact_algebra.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace arrival {

class DynamicsSpec {
public:
    /// The Collatz map.
    constexpr DynamicsSpec() = default;

    DynamicsSpec(std::int64_t h, int sign) : h_(static_cast<std::uint32_t>(h)), sign_(sign)
    {
        if (h < 3 || h % 2 == 0 || h > std::numeric_limits<std::uint32_t>::max())
            throw std::invalid_argument("dynamics: h must be an odd integer >= 3, got " + std::to_string(h));
        if (sign != 1 && sign != -1)
            throw std::invalid_argument("dynamics: sign must be +1 or -1, got " + std::to_string(sign));
    }

    constexpr std::uint32_t h() const { return h_; }
    constexpr int sign() const { return sign_; }

    std::string label() const { return std::to_string(h_) + "n" + (sign_ > 0 ? "+1" : "-1"); }

    friend constexpr bool operator==(const DynamicsSpec&, const DynamicsSpec&) = default;

private:
    std::uint32_t h_ = 3;
    int sign_ = 1;
};

/// Thrown when an orbit or series outgrows the configured limits.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ResourceLimits {
    BigInt max_state = default_max_state();
    std::uint64_t max_steps = 10'000'000;
    std::uint64_t max_series_terms = 10'000'000;

    static BigInt default_max_state()
    {
        BigInt r;
        mpz_ui_pow_ui(r.get_mpz_t(), 10, 10000);
        return r;
    }
};

inline const ResourceLimits& default_limits()
{
    static const ResourceLimits limits;
    return limits;
}

inline bool is_odd(const BigInt& n) { return mpz_odd_p(n.get_mpz_t()) != 0; }

inline BigInt step(const BigInt& n, const DynamicsSpec& spec)
{
    if (n <= 0)
        throw std::invalid_argument("step: state must be a positive integer, got " + n.get_str());
    if (is_odd(n))
        return n * spec.h() + spec.sign();
    BigInt r;
    mpz_fdiv_q_2exp(r.get_mpz_t(), n.get_mpz_t(), 1);
    return r;
}

/// Orbit position that stays in a machine word while it can and widens to
/// BigInt when h*n + sign would overflow. The representation is canonical
/// (narrow whenever the value fits), so equality is representation equality.
class OrbitCursor {
public:
    explicit OrbitCursor(const BigInt& start)
    {
        if (start <= 0)
            throw std::invalid_argument("orbit: start must be a positive integer, got " + start.get_str());
        assign(start);
    }
    explicit OrbitCursor(std::uint64_t start) : small_(start)
    {
        if (start == 0)
            throw std::invalid_argument("orbit: start must be a positive integer, got 0");
    }

    void advance(const DynamicsSpec& spec)
    {
        if (!wide_) {
            if ((small_ & 1u) == 0) {
                small_ >>= 1;
                return;
            }
            constexpr auto max = std::numeric_limits<std::uint64_t>::max();
            if (small_ <= (max - 1) / spec.h()) {
                small_ = small_ * spec.h() + static_cast<std::uint64_t>(static_cast<std::int64_t>(spec.sign()));
                return;
            }
            big_ = to_big_from_u64(small_);
            wide_ = true;
        }
        big_ = step(big_, spec);
        if (mpz_fits_ulong_p(big_.get_mpz_t()) && sizeof(unsigned long) == sizeof(std::uint64_t)) {
            small_ = mpz_get_ui(big_.get_mpz_t());
            wide_ = false;
        }
    }

    bool wide() const { return wide_; }
    bool is_one() const { return !wide_ && small_ == 1; }
    bool equals(std::uint64_t v) const { return !wide_ && small_ == v; }
    std::uint64_t narrow() const { return small_; }

    BigInt value() const { return wide_ ? big_ : to_big_from_u64(small_); }

    bool exceeds(const BigInt& max_state) const
    {
        return wide_ ? big_ > max_state : to_big_from_u64(small_) > max_state;
    }

    friend bool operator==(const OrbitCursor& a, const OrbitCursor& b)
    {
        if (a.wide_ != b.wide_)
            return false;
        return a.wide_ ? a.big_ == b.big_ : a.small_ == b.small_;
    }

private:
    static BigInt to_big_from_u64(std::uint64_t v)
    {
        BigInt r;
        mpz_import(r.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
        return r;
    }

    void assign(const BigInt& v)
    {
        if (mpz_fits_ulong_p(v.get_mpz_t()) && sizeof(unsigned long) == sizeof(std::uint64_t)) {
            small_ = mpz_get_ui(v.get_mpz_t());
            wide_ = false;
        } else {
            big_ = v;
            wide_ = true;
        }
    }

    std::uint64_t small_ = 0;
    BigInt big_;
    bool wide_ = false;
};

/// Magnitude limit checked against an OrbitCursor without allocating while
/// both fit in a machine word.
class StateBound {
public:
    explicit StateBound(const BigInt& max_state) : big_(max_state)
    {
        narrow_ = max_state >= 0 && mpz_fits_ulong_p(max_state.get_mpz_t()) && sizeof(unsigned long) == 8;
        if (narrow_)
            small_ = mpz_get_ui(max_state.get_mpz_t());
    }

    bool exceeded_by(const OrbitCursor& c) const
    {
        if (!c.wide())
            return narrow_ && c.narrow() > small_;
        return c.exceeds(big_);
    }

private:
    BigInt big_;
    std::uint64_t small_ = 0;
    bool narrow_ = false;
};

struct CycleInfo {
    std::uint64_t entry_step = 0;
    std::uint64_t length = 0;

    friend bool operator==(const CycleInfo&, const CycleInfo&) = default;
};

struct Trajectory {
    BigInt start;
    DynamicsSpec spec;
    std::vector<BigInt> states;
    std::map<BigInt, std::vector<std::uint64_t>> visits;
    std::optional<CycleInfo> cycle;

    std::uint64_t steps() const { return states.empty() ? 0 : states.size() - 1; }

    /// Number of even-branch steps among the first j steps.
    std::uint64_t evens_before(std::uint64_t j) const { return j - odds_before(j); }
    std::uint64_t odds_before(std::uint64_t j) const
    {
        std::uint64_t n = 0;
        for (std::uint64_t s = 0; s < j; ++s)
            n += is_odd(states[s]) ? 1 : 0;
        return n;
    }
};

namespace detail {

inline void check_state(const BigInt& state, std::uint64_t step_index, const ResourceLimits& limits)
{
    if (state > limits.max_state)
        throw ResourceError("orbit state exceeds the magnitude limit at step " + std::to_string(step_index));
}

inline void check_steps(std::uint64_t steps, const ResourceLimits& limits)
{
    if (steps > limits.max_steps)
        throw ResourceError("requested " + std::to_string(steps) + " steps, limit is " +
                            std::to_string(limits.max_steps));
}

} // namespace detail

/// d_0 = k, d_{i+1} = step(d_i) for i < steps.
inline Trajectory departure(const BigInt& k, const DynamicsSpec& spec, std::uint64_t steps,
                            const ResourceLimits& limits = default_limits())
{
    if (k <= 0)
        throw std::invalid_argument("departure: k must be a positive integer, got " + k.get_str());
    detail::check_steps(steps, limits);

    Trajectory t{k, spec, {}, {}, std::nullopt};
    t.states.reserve(steps + 1);
    t.states.push_back(k);
    t.visits[k].push_back(0);
    for (std::uint64_t i = 1; i <= steps; ++i) {
        BigInt next = step(t.states.back(), spec);
        detail::check_state(next, i, limits);
        auto& seen = t.visits[next];
        if (!seen.empty() && !t.cycle)
            t.cycle = CycleInfo{seen.front(), i - seen.front()};
        seen.push_back(i);
        t.states.push_back(std::move(next));
    }
    return t;
}

/// Smallest i <= max_steps with d_i == target.
inline std::optional<std::uint64_t> hitting_time(const BigInt& k, const BigInt& target, const DynamicsSpec& spec,
                                                 std::uint64_t max_steps,
                                                 const ResourceLimits& limits = default_limits())
{
    if (target <= 0)
        throw std::invalid_argument("hitting_time: target must be a positive integer");
    detail::check_steps(max_steps, limits);
    OrbitCursor cur(k);
    const OrbitCursor goal(target);
    const StateBound bound(limits.max_state);
    for (std::uint64_t i = 0;; ++i) {
        if (cur == goal)
            return i;
        if (i == max_steps)
            return std::nullopt;
        cur.advance(spec);
        if (bound.exceeded_by(cur))
            throw ResourceError("orbit state exceeds the magnitude limit at step " + std::to_string(i + 1));
    }
}

/// First repeated state of the orbit: (first index of that state, period).
/// Brent's algorithm; absent when entry + period > max_steps.
inline std::optional<CycleInfo> detect_cycle(const BigInt& k, const DynamicsSpec& spec, std::uint64_t max_steps,
                                             const ResourceLimits& limits = default_limits())
{
    detail::check_steps(max_steps, limits);
    const OrbitCursor start(k);
    const StateBound bound(limits.max_state);
    auto advance = [&](OrbitCursor& c, std::uint64_t& evaluations) {
        c.advance(spec);
        ++evaluations;
        if (bound.exceeded_by(c))
            throw ResourceError("orbit state exceeds the magnitude limit during cycle search");
    };

    // A repeat with entry + period <= max_steps is met well before the hare
    // runs past 4 * (max_steps + 1) evaluations.
    const std::uint64_t cap = 4 * max_steps + 4;
    std::uint64_t evaluations = 0;
    std::uint64_t power = 1, period = 1;
    OrbitCursor tortoise = start, hare = start;
    advance(hare, evaluations);
    while (!(tortoise == hare)) {
        if (power == period) {
            tortoise = hare;
            power *= 2;
            period = 0;
        }
        advance(hare, evaluations);
        ++period;
        if (evaluations > cap)
            return std::nullopt;
    }

    std::uint64_t unused = 0;
    tortoise = start;
    hare = start;
    for (std::uint64_t i = 0; i < period; ++i)
        advance(hare, unused);
    std::uint64_t entry = 0;
    while (!(tortoise == hare)) {
        advance(tortoise, unused);
        advance(hare, unused);
        ++entry;
    }
    if (entry + period > max_steps)
        return std::nullopt;
    return CycleInfo{entry, period};
}

/// CSV with columns step,state,parity.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& t)
{
    out << "step,state,parity\n";
    for (std::size_t i = 0; i < t.states.size(); ++i)
        out << i << ',' << t.states[i].get_str() << ',' << (is_odd(t.states[i]) ? "odd" : "even") << '\n';
}

} // namespace arrival
