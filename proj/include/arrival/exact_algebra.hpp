#pragma once

// Exact rationals and polynomials in the two formal weights w_b, w_f.

#include <gmpxx.h>

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace arrival {

/// Arbitrary-precision integer, used for states and series indices.
using BigInt = mpz_class;

/// Exact rational. GMP keeps every result of arithmetic in lowest terms with
/// a positive denominator; values built from raw parts go through make_exact.
using ExactScalar = mpq_class;

inline ExactScalar make_exact(const BigInt& num, const BigInt& den = 1)
{
    if (den == 0)
        throw std::invalid_argument("exact scalar: zero denominator");
    ExactScalar r(num, den);
    r.canonicalize();
    return r;
}

/// True when the scalar is stored as num/den with den > 0 and gcd(|num|, den) = 1.
inline bool is_canonical(const ExactScalar& s)
{
    const BigInt& den = s.get_den();
    if (den <= 0)
        return false;
    BigInt g;
    mpz_gcd(g.get_mpz_t(), s.get_num_mpz_t(), den.get_mpz_t());
    return g == 1;
}

/// Parses "7", "-3/4", "0.45", "-.5", "1.25e-2" into an exact rational.
/// Decimal input is read digit by digit, so 0.45 becomes 9/20 with no rounding.
inline ExactScalar parse_exact(std::string_view text)
{
    auto fail = [&] {
        return std::invalid_argument("not an exact number: '" + std::string(text) + "'");
    };
    if (text.empty())
        throw fail();

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        std::string num(text.substr(0, slash)), den(text.substr(slash + 1));
        BigInt n, d;
        if (num.empty() || den.empty() || n.set_str(num, 10) != 0 || d.set_str(den, 10) != 0)
            throw fail();
        if (d == 0)
            throw std::invalid_argument("exact scalar: zero denominator");
        return make_exact(n, d);
    }

    std::size_t pos = 0;
    bool negative = false;
    if (text[pos] == '+' || text[pos] == '-') {
        negative = text[pos] == '-';
        ++pos;
    }
    std::string digits;
    long exponent = 0;
    bool seen_digit = false, seen_point = false;
    for (; pos < text.size(); ++pos) {
        char c = text[pos];
        if (c >= '0' && c <= '9') {
            digits.push_back(c);
            seen_digit = true;
            if (seen_point)
                --exponent;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!seen_digit)
        throw fail();
    if (pos < text.size()) {
        if (text[pos] != 'e' && text[pos] != 'E')
            throw fail();
        std::string exp_text(text.substr(pos + 1));
        if (exp_text.empty())
            throw fail();
        std::size_t used = 0;
        long e = 0;
        try {
            e = std::stol(exp_text, &used);
        } catch (const std::exception&) {
            throw fail();
        }
        if (used != exp_text.size() || e > 100000 || e < -100000)
            throw fail();
        exponent += e;
    }

    BigInt mantissa(digits, 10);
    if (negative)
        mantissa = -mantissa;
    BigInt scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    return exponent < 0 ? make_exact(mantissa, scale) : make_exact(mantissa * scale);
}

inline std::string to_string(const ExactScalar& s) { return s.get_str(10); }

/// w_b^p * w_f^q
struct WeightMonomial {
    std::uint32_t p = 0;
    std::uint32_t q = 0;

    constexpr std::uint64_t degree() const { return std::uint64_t(p) + q; }

    friend constexpr bool operator==(const WeightMonomial&, const WeightMonomial&) = default;

    // Display order: total degree descending, then p descending.
    friend constexpr std::strong_ordering operator<=>(const WeightMonomial& a, const WeightMonomial& b)
    {
        if (auto c = b.degree() <=> a.degree(); c != 0)
            return c;
        return b.p <=> a.p;
    }
};

enum class Shift { backward, forward };

struct WeightValues {
    ExactScalar w_b;
    ExactScalar w_f;
};

/// Polynomial in w_b, w_f with exact rational coefficients.
///
/// Terms are kept in a flat vector sorted by WeightMonomial ordering with no
/// zero coefficients, so two polynomials are equal iff their term lists are.
class WeightPoly {
public:
    using Term = std::pair<WeightMonomial, ExactScalar>;

    WeightPoly() = default;

    WeightPoly(std::initializer_list<Term> terms)
    {
        for (const auto& [m, c] : terms)
            add_term(m, c);
    }

    static WeightPoly constant(const ExactScalar& c) { return WeightPoly{{WeightMonomial{0, 0}, c}}; }
    static WeightPoly one() { return constant(1); }
    static WeightPoly monomial(std::uint32_t p, std::uint32_t q, const ExactScalar& c = 1)
    {
        return WeightPoly{{WeightMonomial{p, q}, c}};
    }

    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    const std::vector<Term>& terms() const { return terms_; }
    auto begin() const { return terms_.begin(); }
    auto end() const { return terms_.end(); }

    /// Coefficient of w_b^p w_f^q, zero if absent.
    ExactScalar coefficient(WeightMonomial m) const
    {
        auto it = find(m);
        return it != terms_.end() && it->first == m ? it->second : ExactScalar(0);
    }

    void add_term(WeightMonomial m, const ExactScalar& c)
    {
        if (c == 0)
            return;
        auto it = find(m);
        if (it != terms_.end() && it->first == m) {
            it->second += c;
            if (it->second == 0)
                terms_.erase(it);
        } else {
            terms_.insert(it, Term{m, c});
        }
    }

    WeightPoly& operator+=(const WeightPoly& other)
    {
        if (&other == this)
            return *this += WeightPoly(other);
        if (other.terms_.empty())
            return *this;
        if (terms_.empty()) {
            terms_ = other.terms_;
            return *this;
        }
        std::vector<Term> merged;
        merged.reserve(terms_.size() + other.terms_.size());
        auto a = terms_.begin();
        auto b = other.terms_.cbegin();
        while (a != terms_.end() || b != other.terms_.end()) {
            if (b == other.terms_.end() || (a != terms_.end() && a->first < b->first)) {
                merged.push_back(std::move(*a++));
            } else if (a == terms_.end() || b->first < a->first) {
                merged.push_back(*b++);
            } else {
                ExactScalar c = a->second + b->second;
                if (c != 0)
                    merged.emplace_back(a->first, std::move(c));
                ++a;
                ++b;
            }
        }
        terms_ = std::move(merged);
        return *this;
    }

    WeightPoly& operator-=(const WeightPoly& other) { return *this += -other; }

    WeightPoly operator-() const
    {
        WeightPoly r = *this;
        for (auto& t : r.terms_)
            t.second = -t.second;
        return r;
    }

    friend WeightPoly operator+(WeightPoly a, const WeightPoly& b) { return a += b; }
    friend WeightPoly operator-(WeightPoly a, const WeightPoly& b) { return a -= b; }

    friend WeightPoly operator*(const WeightPoly& a, const WeightPoly& b)
    {
        WeightPoly r;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_)
                r.add_term(WeightMonomial{ma.p + mb.p, ma.q + mb.q}, ca * cb);
        return r;
    }

    friend bool operator==(const WeightPoly& a, const WeightPoly& b) { return a.terms_ == b.terms_; }

private:
    std::vector<Term>::iterator find(WeightMonomial m)
    {
        return std::lower_bound(terms_.begin(), terms_.end(), m,
                                [](const Term& t, WeightMonomial key) { return t.first < key; });
    }
    std::vector<Term>::const_iterator find(WeightMonomial m) const
    {
        return std::lower_bound(terms_.begin(), terms_.end(), m,
                                [](const Term& t, WeightMonomial key) { return t.first < key; });
    }

    std::vector<Term> terms_;
};

inline WeightPoly poly_add(const WeightPoly& a, const WeightPoly& b) { return a + b; }

/// Multiplies every monomial by w_b (backward) or w_f (forward).
/// The shift is a uniform translation of exponents, so term order is preserved.
inline WeightPoly poly_shift(WeightPoly a, Shift which)
{
    WeightPoly r;
    for (const auto& [m, c] : a)
        r.add_term(which == Shift::backward ? WeightMonomial{m.p + 1, m.q} : WeightMonomial{m.p, m.q + 1}, c);
    return r;
}

inline ExactScalar pow_exact(const ExactScalar& base, std::uint32_t e)
{
    ExactScalar r;
    mpz_pow_ui(r.get_num_mpz_t(), base.get_num_mpz_t(), e);
    mpz_pow_ui(r.get_den_mpz_t(), base.get_den_mpz_t(), e);
    r.canonicalize();
    return r;
}

inline ExactScalar poly_eval(const WeightPoly& a, const WeightValues& v)
{
    ExactScalar sum = 0;
    for (const auto& [m, c] : a)
        sum += c * pow_exact(v.w_b, m.p) * pow_exact(v.w_f, m.q);
    return sum;
}

/// Renders e.g. "w_b^4*w_f + 2*w_b^2", "-w_b^2*w_f + 1", "0".
inline std::string render(const WeightPoly& a)
{
    if (a.is_zero())
        return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [m, c] : a) {
        bool negative = c < 0;
        ExactScalar mag = negative ? ExactScalar(-c) : c;
        if (first)
            out << (negative ? "-" : "");
        else
            out << (negative ? " - " : " + ");
        first = false;

        std::string vars;
        auto append = [&](std::string_view name, std::uint32_t e) {
            if (e == 0)
                return;
            if (!vars.empty())
                vars += '*';
            vars += name;
            if (e > 1)
                vars += '^' + std::to_string(e);
        };
        append("w_b", m.p);
        append("w_f", m.q);

        if (vars.empty())
            out << to_string(mag);
        else if (mag == 1)
            out << vars;
        else
            out << to_string(mag) << '*' << vars;
    }
    return out.str();
}

} // namespace arrival
