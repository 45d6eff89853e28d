#include <arrival/exact_algebra.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace arrival;

namespace {

WeightPoly random_poly(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> terms(0, 5), exp(0, 6), num(-9, 9), den(1, 7);
    WeightPoly p;
    for (int t = terms(rng); t > 0; --t)
        p.add_term({static_cast<std::uint32_t>(exp(rng)), static_cast<std::uint32_t>(exp(rng))},
                   make_exact(num(rng), den(rng)));
    return p;
}

ExactScalar random_scalar(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> num(-20, 20), den(1, 20);
    return make_exact(num(rng), den(rng));
}

bool all_canonical(const WeightPoly& p)
{
    for (const auto& [m, c] : p)
        if (c == 0 || !is_canonical(c))
            return false;
    return true;
}

} // namespace

TEST(PolyAdd, Examples)
{
    EXPECT_TRUE(poly_add({}, {}).is_zero());
    EXPECT_TRUE(poly_add(WeightPoly::monomial(0, 1), WeightPoly::monomial(0, 1, -1)).is_zero());

    WeightPoly sum = poly_add(WeightPoly::monomial(4, 1), WeightPoly::one());
    EXPECT_EQ(sum.size(), 2u);
    EXPECT_EQ(sum.coefficient({4, 1}), 1);
    EXPECT_EQ(sum.coefficient({0, 0}), 1);
}

TEST(PolyShift, Examples)
{
    EXPECT_EQ(poly_shift(WeightPoly::one(), Shift::backward), WeightPoly::monomial(1, 0));
    EXPECT_TRUE(poly_shift({}, Shift::forward).is_zero());
    EXPECT_EQ(poly_shift(WeightPoly::monomial(3, 1), Shift::forward), WeightPoly::monomial(3, 2));
}

TEST(PolyEval, Examples)
{
    const WeightValues v{parse_exact("0.45"), parse_exact("0.45")};
    EXPECT_EQ(poly_eval({}, v), 0);
    // (9/20)^5 = 59049 / 3200000
    EXPECT_EQ(poly_eval(WeightPoly::monomial(4, 1), v), make_exact(59049, 3200000));
    EXPECT_EQ(poly_eval(WeightPoly::constant(7), {make_exact(3, 5), make_exact(-2)}), 7);
}

TEST(ParseExact, Decimals)
{
    EXPECT_EQ(parse_exact("0.45"), make_exact(9, 20));
    EXPECT_EQ(parse_exact("0.999"), make_exact(999, 1000));
    EXPECT_EQ(parse_exact("-.5"), make_exact(-1, 2));
    EXPECT_EQ(parse_exact("7"), 7);
    EXPECT_EQ(parse_exact("-3/6"), make_exact(-1, 2));
    EXPECT_EQ(parse_exact("1.25e-2"), make_exact(1, 80));
    EXPECT_EQ(parse_exact("2E3"), 2000);
    EXPECT_TRUE(is_canonical(parse_exact("10/4")));
}

TEST(ParseExact, Rejects)
{
    for (const char* bad : {"", "abc", "1/0", "1.2.3", "--1", "0.5x", "1e", "/3", "."})
        EXPECT_THROW(parse_exact(bad), std::invalid_argument) << bad;
}

TEST(Render, Format)
{
    EXPECT_EQ(render({}), "0");
    EXPECT_EQ(render(WeightPoly::monomial(4, 1) + WeightPoly::monomial(2, 0, 2)), "w_b^4*w_f + 2*w_b^2");
    EXPECT_EQ(render(WeightPoly::one() - WeightPoly::monomial(2, 1)), "-w_b^2*w_f + 1");
    EXPECT_EQ(render(WeightPoly::monomial(1, 1)), "w_b*w_f");
    EXPECT_EQ(render(WeightPoly::monomial(0, 1, make_exact(9, 20))), "9/20*w_f");
    EXPECT_EQ(render(WeightPoly::constant(make_exact(-3, 4))), "-3/4");
    // same total degree: higher w_b power first
    EXPECT_EQ(render(WeightPoly::monomial(0, 2) + WeightPoly::monomial(2, 0)), "w_b^2 + w_f^2");
}

TEST(WeightPoly, StructuralEquality)
{
    WeightPoly a = WeightPoly::monomial(1, 2) + WeightPoly::one();
    WeightPoly b = WeightPoly::one() + WeightPoly::monomial(1, 2);
    EXPECT_EQ(a, b);
    a.add_term({1, 2}, -1);
    EXPECT_EQ(a, WeightPoly::one());
}

TEST(WeightPolyProperty, AddIsCommutativeAndAssociative)
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 500; ++trial) {
        WeightPoly a = random_poly(rng), b = random_poly(rng), c = random_poly(rng);
        EXPECT_EQ(a + b, b + a);
        EXPECT_EQ((a + b) + c, a + (b + c));
        EXPECT_TRUE(all_canonical(a + b));
    }
}

TEST(WeightPolyProperty, EvalIsLinearAndShiftMultiplies)
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        WeightPoly a = random_poly(rng), b = random_poly(rng);
        WeightValues v{random_scalar(rng), random_scalar(rng)};
        EXPECT_EQ(poly_eval(a + b, v), poly_eval(a, v) + poly_eval(b, v));
        EXPECT_EQ(poly_eval(poly_shift(a, Shift::backward), v), v.w_b * poly_eval(a, v));
        EXPECT_EQ(poly_eval(poly_shift(a, Shift::forward), v), v.w_f * poly_eval(a, v));
        EXPECT_TRUE(is_canonical(poly_eval(a, v)));
    }
}

TEST(WeightPolyProperty, ProductEvaluatesToProduct)
{
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        WeightPoly a = random_poly(rng), b = random_poly(rng);
        WeightValues v{random_scalar(rng), random_scalar(rng)};
        EXPECT_EQ(poly_eval(a * b, v), poly_eval(a, v) * poly_eval(b, v));
    }
}
