#pragma once

// Arrival series A_{k,i}(x) = sum_n a_{k,n} x^n, stored sparsely.
//
// One application of the operator maps
//   backward: coefficient at 2n   -> n          (times w_b)
//   forward:  coefficient at odd m -> h*m + sign (times w_f)
// and re-adds the seed x^k. Starting from x^k, the i-th iterate is the
// truncated Neumann sum sum_{j<=i} H^j x^k, which is exactly the weighted
// departure orbit of k over its first i steps.

#include "collatz_core.hpp"
#include "exact_algebra.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace arrival {

/// Raised when a computation needs |w_b| + |w_f| < 1 and the weights violate it.
class ContractionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct SparseSeries {
    BigInt k;
    std::uint64_t i = 0;
    DynamicsSpec spec;
    std::map<BigInt, WeightPoly> coeffs;

    friend bool operator==(const SparseSeries&, const SparseSeries&) = default;
};

/// (n - sign) / h when that is a positive odd integer, i.e. the odd m with
/// h*m + sign == n.
inline std::optional<BigInt> forward_preimage(const BigInt& n, const DynamicsSpec& spec)
{
    BigInt shifted = n - spec.sign();
    if (shifted <= 0 || !mpz_divisible_ui_p(shifted.get_mpz_t(), spec.h()))
        return std::nullopt;
    BigInt m;
    mpz_divexact_ui(m.get_mpz_t(), shifted.get_mpz_t(), spec.h());
    if (!is_odd(m))
        return std::nullopt;
    return m;
}

inline SparseSeries monomial_series(const BigInt& k, const DynamicsSpec& spec = {})
{
    if (k <= 0)
        throw std::invalid_argument("monomial_series: k must be a positive integer, got " + k.get_str());
    SparseSeries s{k, 0, spec, {}};
    s.coeffs.emplace(k, WeightPoly::one());
    return s;
}

/// Even-index extraction: out[n] = in[2n]. Odd indices vanish.
inline SparseSeries op_backward(const SparseSeries& s)
{
    SparseSeries out{s.k, s.i, s.spec, {}};
    for (const auto& [n, c] : s.coeffs) {
        if (is_odd(n))
            continue;
        BigInt half;
        mpz_fdiv_q_2exp(half.get_mpz_t(), n.get_mpz_t(), 1);
        out.coeffs.emplace_hint(out.coeffs.end(), std::move(half), c);
    }
    return out;
}

/// Odd-part reindexing: odd m moves to h*m + sign. Even indices vanish.
inline SparseSeries op_forward(const SparseSeries& s)
{
    SparseSeries out{s.k, s.i, s.spec, {}};
    for (const auto& [m, c] : s.coeffs)
        if (is_odd(m))
            out.coeffs.emplace_hint(out.coeffs.end(), m * s.spec.h() + s.spec.sign(), c);
    return out;
}

namespace detail {

inline void accumulate(std::map<BigInt, WeightPoly>& into, const BigInt& n, WeightPoly poly)
{
    if (poly.is_zero())
        return;
    auto [it, inserted] = into.try_emplace(n, std::move(poly));
    if (!inserted) {
        it->second += poly;
        if (it->second.is_zero())
            into.erase(it);
    }
}

} // namespace detail

/// w_b * H1(S) + w_f * H2(S) + x^k, with i advanced by one.
inline SparseSeries apply_step(const SparseSeries& s)
{
    SparseSeries out{s.k, s.i + 1, s.spec, {}};
    for (const auto& [n, c] : s.coeffs) {
        if (is_odd(n)) {
            detail::accumulate(out.coeffs, n * s.spec.h() + s.spec.sign(), poly_shift(c, Shift::forward));
        } else {
            BigInt half;
            mpz_fdiv_q_2exp(half.get_mpz_t(), n.get_mpz_t(), 1);
            detail::accumulate(out.coeffs, half, poly_shift(c, Shift::backward));
        }
    }
    detail::accumulate(out.coeffs, s.k, WeightPoly::one());
    return out;
}

/// A_{k,i}: apply_step composed i times on x^k.
inline SparseSeries iterate(const BigInt& k, std::uint64_t i, const DynamicsSpec& spec = {},
                            const ResourceLimits& limits = default_limits())
{
    SparseSeries s = monomial_series(k, spec);
    for (std::uint64_t it = 0; it < i; ++it) {
        s = apply_step(s);
        if (s.coeffs.size() > limits.max_series_terms)
            throw ResourceError("series term count exceeds the limit at iteration " + std::to_string(s.i));
        if (!s.coeffs.empty() && s.coeffs.rbegin()->first > limits.max_state)
            throw ResourceError("series index exceeds the magnitude limit at iteration " + std::to_string(s.i));
    }
    return s;
}

inline WeightPoly coefficient(const SparseSeries& s, const BigInt& n)
{
    if (n <= 0)
        throw std::invalid_argument("coefficient: index must be a positive integer, got " + n.get_str());
    auto it = s.coeffs.find(n);
    return it == s.coeffs.end() ? WeightPoly{} : it->second;
}

/// A'(0) = a_1.
inline WeightPoly derivative_at_zero(const SparseSeries& s) { return coefficient(s, 1); }

/// Describes the first broken structural invariant, if any: zero or index-0
/// entries, non-unit coefficients, repeated or too-large total degrees.
inline std::optional<std::string> structural_violation(const SparseSeries& s)
{
    for (const auto& [n, poly] : s.coeffs) {
        const std::string at = " at index " + n.get_str();
        if (n <= 0)
            return "non-positive index" + at;
        if (poly.is_zero())
            return "stored zero polynomial" + at;
        std::vector<std::uint64_t> degrees;
        for (const auto& [m, c] : poly) {
            if (c != 1)
                return "coefficient " + to_string(c) + " is not 1" + at;
            if (m.degree() > s.i)
                return "total degree exceeds iteration count" + at;
            degrees.push_back(m.degree());
        }
        // terms are sorted by degree, so duplicates are adjacent
        for (std::size_t j = 1; j < degrees.size(); ++j)
            if (degrees[j] == degrees[j - 1])
                return "repeated total degree" + at;
    }
    return std::nullopt;
}

/// (|w_b| + |w_f|)^{i+1}, the sup-norm bound on |A_{k,i+1} - A_{k,i}| over |x| <= 1.
inline ExactScalar neumann_tail_bound(const WeightValues& v, std::uint64_t i)
{
    ExactScalar norm = abs(v.w_b) + abs(v.w_f);
    if (norm >= 1)
        throw ContractionError("contraction condition |w_b| + |w_f| < 1 violated: |w_b| + |w_f| = " +
                               to_string(norm));
    if (i + 1 > std::numeric_limits<std::uint32_t>::max())
        throw std::invalid_argument("neumann_tail_bound: iteration count too large");
    return pow_exact(norm, static_cast<std::uint32_t>(i + 1));
}

namespace detail {

template <typename Complex>
Complex pow_big(Complex base, const BigInt& e)
{
    Complex result(1);
    const std::size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
    for (std::size_t b = bits; b-- > 0;) {
        result *= result;
        if (mpz_tstbit(e.get_mpz_t(), b))
            result *= base;
    }
    return result;
}

} // namespace detail

/// Numeric view of a series at fixed weights: (index, coefficient) pairs in
/// ascending index order. Weights are substituted exactly, then rounded once.
class NumericSeries {
public:
    NumericSeries(const SparseSeries& s, const WeightValues& v)
    {
        terms_.reserve(s.coeffs.size());
        for (const auto& [n, poly] : s.coeffs)
            terms_.emplace_back(n, poly_eval(poly, v).get_d());
    }

    /// Sum of c_n x^n in binary64. Real x with real coefficients stays real:
    /// every product has a zero imaginary factor.
    std::complex<double> operator()(std::complex<double> x) const
    {
        std::complex<double> sum(0.0, 0.0);
        std::complex<double> power(1.0, 0.0);
        BigInt prev = 0;
        for (const auto& [n, c] : terms_) {
            if (power != std::complex<double>(0.0, 0.0))
                power *= detail::pow_big(x, BigInt(n - prev));
            prev = n;
            sum += c * power;
        }
        return sum;
    }

    const std::vector<std::pair<BigInt, double>>& terms() const { return terms_; }

private:
    std::vector<std::pair<BigInt, double>> terms_;
};

inline std::complex<double> evaluate(const SparseSeries& s, std::complex<double> x, const WeightValues& v)
{
    return NumericSeries(s, v)(x);
}

inline bool is_finite(std::complex<double> z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// {"k":..,"i":..,"spec":{"h":..,"sign":..},"coeffs":[{"n":..,"poly":".."},..]}
/// Indices ascend. Integers are written as JSON numbers at full precision.
inline void write_series_json(std::ostream& out, const SparseSeries& s)
{
    out << "{\"k\":" << s.k.get_str() << ",\"i\":" << s.i << ",\"spec\":{\"h\":" << s.spec.h()
        << ",\"sign\":" << s.spec.sign() << "},\"coeffs\":[";
    bool first = true;
    for (const auto& [n, poly] : s.coeffs) {
        out << (first ? "" : ",") << "{\"n\":" << n.get_str() << ",\"poly\":\"" << render(poly) << "\"}";
        first = false;
    }
    out << "]}\n";
}

inline void write_series_text(std::ostream& out, const SparseSeries& s)
{
    out << "# k=" << s.k.get_str() << " i=" << s.i << " dynamics=" << s.spec.label() << '\n';
    for (const auto& [n, poly] : s.coeffs)
        out << "a_" << n.get_str() << " = " << render(poly) << '\n';
}

} // namespace arrival
