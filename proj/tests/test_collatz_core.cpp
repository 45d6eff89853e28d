#include <arrival/collatz_core.hpp>

#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <unordered_map>

using namespace arrival;

namespace {

const DynamicsSpec collatz{3, 1};
const DynamicsSpec minus{3, -1};

std::vector<BigInt> big(std::initializer_list<long> xs)
{
    std::vector<BigInt> out;
    for (long x : xs)
        out.emplace_back(x);
    return out;
}

// Hash-map scan of a word-sized orbit: first index at which a state repeats.
std::optional<CycleInfo> reference_cycle(std::uint64_t k, int sign, std::uint64_t max_steps)
{
    std::unordered_map<std::uint64_t, std::uint64_t> first_seen;
    std::uint64_t n = k;
    for (std::uint64_t i = 0; i <= max_steps; ++i) {
        auto [it, fresh] = first_seen.emplace(n, i);
        if (!fresh)
            return CycleInfo{it->second, i - it->second};
        n = (n % 2 == 0) ? n / 2 : 3 * n + sign;
    }
    return std::nullopt;
}

} // namespace

TEST(DynamicsSpec, Validation)
{
    EXPECT_EQ(DynamicsSpec{}, collatz);
    EXPECT_THROW(DynamicsSpec(1, 1), std::invalid_argument);
    EXPECT_THROW(DynamicsSpec(1, -1), std::invalid_argument);
    EXPECT_THROW(DynamicsSpec(4, 1), std::invalid_argument);
    EXPECT_THROW(DynamicsSpec(3, 0), std::invalid_argument);
    EXPECT_NO_THROW(DynamicsSpec(5, -1));
    EXPECT_EQ(minus.label(), "3n-1");
}

TEST(Step, Examples)
{
    EXPECT_EQ(step(5, collatz), 16);
    EXPECT_EQ(step(6, collatz), 3);
    EXPECT_EQ(step(5, minus), 14);
    EXPECT_THROW(step(0, collatz), std::invalid_argument);
    EXPECT_THROW(step(-4, collatz), std::invalid_argument);
}

TEST(Step, ParityTotality)
{
    for (long n = 1; n < 2000; ++n) {
        BigInt s = step(n, collatz);
        if (n % 2 == 0)
            EXPECT_EQ(s * 2, n);
        else
            EXPECT_EQ(s, 3 * n + 1);
    }
}

TEST(Departure, Examples)
{
    EXPECT_EQ(departure(5, collatz, 6).states, big({5, 16, 8, 4, 2, 1, 4}));
    EXPECT_EQ(departure(1, collatz, 3).states, big({1, 4, 2, 1}));
    Trajectory zero = departure(42, collatz, 0);
    EXPECT_EQ(zero.states, big({42}));
    EXPECT_FALSE(zero.cycle);
    EXPECT_THROW(departure(0, collatz, 3), std::invalid_argument);
}

TEST(Departure, VisitsAndCycle)
{
    Trajectory t = departure(5, collatz, 9);
    EXPECT_EQ(t.visits.at(4), (std::vector<std::uint64_t>{3, 6, 9}));
    EXPECT_EQ(t.visits.at(1), (std::vector<std::uint64_t>{5, 8}));
    ASSERT_TRUE(t.cycle);
    EXPECT_EQ(*t.cycle, (CycleInfo{3, 3}));
    EXPECT_EQ(t.odds_before(6), 2u);
    EXPECT_EQ(t.evens_before(5), 4u);
}

TEST(Departure, ConsistencyOnRandomStarts)
{
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<long> pick(1, 1'000'000);
    for (int trial = 0; trial < 200; ++trial) {
        long k = pick(rng);
        Trajectory t = departure(k, collatz, 300);
        ASSERT_EQ(t.states.front(), k);
        std::map<BigInt, std::vector<std::uint64_t>> rebuilt;
        BigInt n = k;
        for (std::uint64_t i = 0; i <= 300; ++i) {
            ASSERT_EQ(t.states[i], n);
            rebuilt[n].push_back(i);
            n = (n % 2 == 0) ? BigInt(n / 2) : BigInt(3 * n + 1);
        }
        EXPECT_EQ(rebuilt, t.visits);
        if (t.cycle) {
            for (std::uint64_t j = t.cycle->entry_step; j + t.cycle->length < t.states.size(); ++j)
                EXPECT_EQ(t.states[j], t.states[j + t.cycle->length]);
        }
    }
}

TEST(Departure, ResourceGuard)
{
    ResourceLimits tight;
    tight.max_steps = 10;
    EXPECT_THROW(departure(5, collatz, 11, tight), ResourceError);
    tight.max_state = 100;
    tight.max_steps = 1000;
    // 27 climbs past 100 quickly
    EXPECT_THROW(departure(27, collatz, 50, tight), ResourceError);
    EXPECT_THROW(hitting_time(27, 1, collatz, 500, tight), ResourceError);
}

TEST(HittingTime, Examples)
{
    EXPECT_EQ(hitting_time(5, 1, collatz, 100), 5u);
    EXPECT_EQ(hitting_time(1, 1, collatz, 10), 0u);
    EXPECT_EQ(hitting_time(5, 1, minus, 1000), std::nullopt);
    EXPECT_EQ(hitting_time(27, 1, collatz, 111), 111u);
    EXPECT_EQ(hitting_time(27, 1, collatz, 110), std::nullopt);
    EXPECT_EQ(hitting_time(5, 8, collatz, 100), 2u);
}

TEST(DetectCycle, Examples)
{
    EXPECT_EQ(detect_cycle(1, collatz, 10), (CycleInfo{0, 3}));
    EXPECT_EQ(detect_cycle(5, minus, 100), (CycleInfo{0, 5}));
    // 5, 16, 8, 4, 2, 1, 4: state 4 is the first to repeat, first seen at step 3
    EXPECT_EQ(detect_cycle(5, collatz, 100), (CycleInfo{3, 3}));
    EXPECT_EQ(detect_cycle(5, collatz, 5), std::nullopt);
    EXPECT_EQ(detect_cycle(5, collatz, 6), (CycleInfo{3, 3}));
}

TEST(DetectCycle, AgreesWithHashScan)
{
    for (int sign : {1, -1}) {
        const DynamicsSpec spec(3, sign);
        for (std::uint64_t k = 1; k <= 10'000; ++k) {
            auto expected = reference_cycle(k, sign, 2000);
            ASSERT_EQ(detect_cycle(BigInt(static_cast<unsigned long>(k)), spec, 2000), expected)
                << "k=" << k << " sign=" << sign;
        }
    }
}

TEST(OrbitCursor, WidensPastMachineWord)
{
    // 7n+1 from 7 passes 2^64 within a few hundred steps
    const DynamicsSpec seven(7, 1);
    OrbitCursor cur(BigInt(7));
    BigInt n = 7;
    bool went_wide = false;
    for (int i = 0; i < 400; ++i) {
        cur.advance(seven);
        n = step(n, seven);
        ASSERT_EQ(cur.value(), n) << "step " << i;
        went_wide = went_wide || cur.wide();
    }
    EXPECT_TRUE(went_wide);

    BigInt near_max("18446744073709551615");  // 2^64 - 1, odd
    OrbitCursor edge(near_max);
    edge.advance(collatz);
    EXPECT_TRUE(edge.wide());
    EXPECT_EQ(edge.value(), near_max * 3 + 1);
}

TEST(TrajectoryCsv, Schema)
{
    std::ostringstream out;
    write_trajectory_csv(out, departure(5, collatz, 2));
    EXPECT_EQ(out.str(), "step,state,parity\n0,5,odd\n1,16,even\n2,8,even\n");
}
