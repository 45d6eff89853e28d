#pragma once

// Checks that tie the arrival series back to the departure orbit.

#include "arrival_series.hpp"
#include "collatz_core.hpp"
#include "exact_algebra.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace arrival {

/// Coefficient map built straight from the orbit: step j contributes the
/// monomial w_b^{evens} w_f^{odds} (counts over the first j steps) at d_j.
inline std::map<BigInt, WeightPoly> weighted_trajectory_map(const BigInt& k, std::uint64_t i,
                                                            const DynamicsSpec& spec,
                                                            const ResourceLimits& limits = default_limits())
{
    Trajectory t = departure(k, spec, i, limits);
    std::map<BigInt, WeightPoly> out;
    std::uint32_t evens = 0, odds = 0;
    for (std::uint64_t j = 0; j <= i; ++j) {
        out[t.states[j]].add_term(WeightMonomial{evens, odds}, 1);
        if (is_odd(t.states[j]))
            ++odds;
        else
            ++evens;
    }
    return out;
}

/// First i <= max_i at which a_{k,1} of A_{k,i} is nonzero.
inline std::optional<std::uint64_t> min_nonzero_iteration(const BigInt& k, const DynamicsSpec& spec,
                                                          std::uint64_t max_i,
                                                          const ResourceLimits& limits = default_limits())
{
    SparseSeries s = monomial_series(k, spec);
    for (std::uint64_t i = 0;; ++i) {
        if (!derivative_at_zero(s).is_zero())
            return i;
        if (i == max_i)
            return std::nullopt;
        s = apply_step(s);
        if (s.coeffs.size() > limits.max_series_terms || s.coeffs.rbegin()->first > limits.max_state)
            throw ResourceError("series exceeds the resource limits at iteration " + std::to_string(s.i));
    }
}

/// Explains the iteration-origin convention behind min_nonzero_iteration.
inline std::string iteration_origin_note(const BigInt& k, std::uint64_t min_i)
{
    return "note: a_{" + k.get_str() + ",1} first becomes nonzero at i=" + std::to_string(min_i) +
           " counting from A_{k,0}(x)=x^k (equal to the hitting time of 1); counting from A_{k,1}(x)=x^k the "
           "same iterate is numbered i=" +
           std::to_string(min_i + 1);
}

inline bool oracle_equivalence(const BigInt& k, std::uint64_t i, const DynamicsSpec& spec,
                               const ResourceLimits& limits = default_limits())
{
    return iterate(k, i, spec, limits).coeffs == weighted_trajectory_map(k, i, spec, limits);
}

/// Nonzero indices of A_{k,i} are exactly the states visited in the first i steps.
inline bool implication_check(const BigInt& k, std::uint64_t i, const DynamicsSpec& spec,
                              const ResourceLimits& limits = default_limits())
{
    SparseSeries s = iterate(k, i, spec, limits);
    Trajectory t = departure(k, spec, i, limits);
    if (s.coeffs.size() != t.visits.size())
        return false;
    auto a = s.coeffs.begin();
    auto b = t.visits.begin();
    for (; a != s.coeffs.end(); ++a, ++b)
        if (a->first != b->first || a->second.is_zero())
            return false;
    return true;
}

namespace detail {

/// n = 2^e * odd
inline std::uint64_t two_adic_valuation(const BigInt& n) { return mpz_scan1(n.get_mpz_t(), 0); }

} // namespace detail

/// For every nonzero index 2^e * o of A_{k,i} (o odd), each 2^j * o with
/// j <= e is nonzero in A_{k,i+e}. Collatz dynamics only.
inline bool odd_group_check(const BigInt& k, std::uint64_t i, const ResourceLimits& limits = default_limits())
{
    const DynamicsSpec spec{};
    SparseSeries s = iterate(k, i, spec, limits);

    std::map<std::uint64_t, std::vector<BigInt>> required;  // extra iterations -> indices
    for (const auto& [n, poly] : s.coeffs) {
        std::uint64_t e = detail::two_adic_valuation(n);
        for (std::uint64_t j = 0; j <= e; ++j) {
            BigInt idx;
            mpz_fdiv_q_2exp(idx.get_mpz_t(), n.get_mpz_t(), e - j);
            required[e].push_back(std::move(idx));
        }
    }

    std::uint64_t at = 0;
    for (const auto& [extra, indices] : required) {
        for (; at < extra; ++at)
            s = apply_step(s);
        for (const auto& idx : indices)
            if (!s.coeffs.contains(idx))
                return false;
    }
    return true;
}

struct SweepRow {
    BigInt k;
    std::optional<std::uint64_t> min_i;
    BigInt max_state;
    std::uint64_t distinct_states = 0;
    bool verified = false;
    /// reached_1, cycle_without_1, budget_exhausted, resource_limit, spot_check_mismatch
    std::string reason;

    friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepOptions {
    unsigned threads = 1;
    /// Every k divisible by this is re-derived through the full series path; 0 disables.
    std::uint64_t spot_check_every = 1000;
    ResourceLimits limits = default_limits();
};

/// One sweep row from the orbit alone.
inline SweepRow sweep_row(const BigInt& k, const DynamicsSpec& spec, std::uint64_t max_i,
                          const ResourceLimits& limits = default_limits())
{
    SweepRow row{k, std::nullopt, k, 1, false, ""};
    try {
        OrbitCursor cur(k);
        std::uint64_t small_max = cur.wide() ? 0 : cur.narrow();
        BigInt big_max = cur.wide() ? k : BigInt(0);
        std::uint64_t steps = 0;
        const StateBound bound(limits.max_state);
        auto track = [&] {
            if (bound.exceeded_by(cur))
                throw ResourceError("orbit state exceeds the magnitude limit at step " + std::to_string(steps));
            if (cur.wide()) {
                BigInt v = cur.value();
                if (v > big_max)
                    big_max = std::move(v);
            } else {
                small_max = std::max(small_max, cur.narrow());
            }
        };
        auto current_max = [&] {
            BigInt small;
            mpz_import(small.get_mpz_t(), 1, 1, sizeof(small_max), 0, 0, &small_max);
            return big_max > small ? big_max : small;
        };

        while (!cur.is_one() && steps < max_i) {
            cur.advance(spec);
            ++steps;
            track();
        }
        if (cur.is_one()) {
            // an orbit that repeats never reaches 1, so states up to here are distinct
            row.min_i = steps;
            row.max_state = current_max();
            row.distinct_states = steps + 1;
            row.verified = true;
            row.reason = "reached_1";
            return row;
        }

        // Second pass: count distinct states and tell a cycle from a short budget.
        std::set<BigInt> seen;
        BigInt state = k;
        BigInt max_state = k;
        seen.insert(state);
        row.reason = "budget_exhausted";
        for (std::uint64_t j = 0; j < max_i; ++j) {
            state = step(state, spec);
            detail::check_state(state, j + 1, limits);
            if (!seen.insert(state).second) {
                row.reason = "cycle_without_1";
                break;
            }
            if (state > max_state)
                max_state = state;
        }
        row.max_state = max_state;
        row.distinct_states = seen.size();
    } catch (const ResourceError&) {
        row.min_i.reset();
        row.verified = false;
        row.reason = "resource_limit";
    }
    return row;
}

/// Rows for k_from..k_to in ascending k, computed from the orbit; every
/// spot_check_every-th k is cross-checked through the series.
inline std::vector<SweepRow> sweep(const BigInt& k_from, const BigInt& k_to, const DynamicsSpec& spec,
                                   std::uint64_t max_i, const SweepOptions& options = {})
{
    if (k_from <= 0)
        throw std::invalid_argument("sweep: k_from must be a positive integer");
    if (k_from > k_to)
        throw std::invalid_argument("sweep: k_from must not exceed k_to");
    BigInt span_big = k_to - k_from + 1;
    if (!mpz_fits_ulong_p(span_big.get_mpz_t()))
        throw std::invalid_argument("sweep: range too large");
    const std::uint64_t span = mpz_get_ui(span_big.get_mpz_t());

    std::vector<SweepRow> rows(span);
    auto work = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t idx = begin; idx < end; ++idx) {
            BigInt k = k_from + BigInt(static_cast<unsigned long>(idx));
            SweepRow row = sweep_row(k, spec, max_i, options.limits);
            if (options.spot_check_every != 0 && row.verified &&
                mpz_divisible_ui_p(k.get_mpz_t(), options.spot_check_every)) {
                try {
                    if (min_nonzero_iteration(k, spec, *row.min_i, options.limits) != row.min_i) {
                        row.verified = false;
                        row.reason = "spot_check_mismatch";
                    }
                } catch (const ResourceError&) {
                    row.verified = false;
                    row.min_i.reset();
                    row.reason = "resource_limit";
                }
            }
            rows[idx] = std::move(row);
        }
    };

    const auto cap = static_cast<unsigned>(std::min<std::uint64_t>(span, 1024));
    const unsigned threads = std::max(1u, std::min(options.threads, cap));
    if (threads == 1) {
        work(0, span);
        return rows;
    }
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (span + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        std::uint64_t begin = t * chunk, end = std::min(span, begin + chunk);
        if (begin < end)
            pool.emplace_back(work, begin, end);
    }
    for (auto& th : pool)
        th.join();
    return rows;
}

/// CSV with columns k,min_i,max_state,distinct_states,verified,reason.
inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows)
{
    out << "k,min_i,max_state,distinct_states,verified,reason\n";
    for (const auto& r : rows)
        out << r.k.get_str() << ',' << (r.min_i ? std::to_string(*r.min_i) : "") << ',' << r.max_state.get_str()
            << ',' << r.distinct_states << ',' << (r.verified ? "true" : "false") << ',' << r.reason << '\n';
}

} // namespace arrival
