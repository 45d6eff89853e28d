#pragma once

// Coefficient matching on 2 A_k(x^2) = w_b (A_k(x) + A_k(-x)) + w_f x^2 (A_k(x^6) - A_k(-x^6)) + 2 x^{2k}
// (and its h, sign generalisation). The x^{2m} coefficient gives
//
//   a_m = w_b a_{2m} + w_f a_{(m - sign)/h} + [m == k]
//
// where the forward term exists only when (m - sign)/h is a positive odd
// integer. Odd powers of x cancel on both sides and give nothing.

#include "arrival_series.hpp"
#include "collatz_core.hpp"
#include "exact_algebra.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace arrival {

struct LinearEquation {
    BigInt m;
    BigInt backward_index;
    std::optional<BigInt> forward_index;
    int constant = 0;

    friend bool operator==(const LinearEquation&, const LinearEquation&) = default;
};

inline LinearEquation equation_for(const BigInt& m, const BigInt& k, const DynamicsSpec& spec)
{
    if (m <= 0)
        throw std::invalid_argument("equation_for: m must be a positive integer, got " + m.get_str());
    return LinearEquation{m, m * 2, forward_preimage(m, spec), m == k ? 1 : 0};
}

inline std::vector<LinearEquation> generate_equations(const BigInt& k, std::uint64_t m_max,
                                                      const DynamicsSpec& spec = {})
{
    if (k <= 0)
        throw std::invalid_argument("generate_equations: k must be a positive integer");
    if (m_max == 0)
        throw std::invalid_argument("generate_equations: m_max must be at least 1");
    std::vector<LinearEquation> eqs;
    eqs.reserve(m_max);
    for (std::uint64_t m = 1; m <= m_max; ++m)
        eqs.push_back(equation_for(BigInt(static_cast<unsigned long>(m)), k, spec));
    return eqs;
}

/// "a_5 = w_b*a_10 + 1", "a_4 = w_b*a_8 + w_f*a_1".
inline std::string render(const LinearEquation& eq)
{
    std::string s = "a_" + eq.m.get_str() + " = w_b*a_" + eq.backward_index.get_str();
    if (eq.forward_index)
        s += " + w_f*a_" + eq.forward_index->get_str();
    if (eq.constant != 0)
        s += " + " + std::to_string(eq.constant);
    return s;
}

/// The index a divisibility-only reading would attach a forward term to,
/// when it differs from the odd-preimage rule: (m - sign)/h is a positive
/// integer but even. Such an index is not an odd state, so no orbit step lands
/// on m from it and coefficient matching produces no term.
inline std::optional<BigInt> divisibility_only_forward_index(const BigInt& m, const DynamicsSpec& spec)
{
    BigInt shifted = m - spec.sign();
    if (shifted <= 0 || !mpz_divisible_ui_p(shifted.get_mpz_t(), spec.h()))
        return std::nullopt;
    BigInt q;
    mpz_divexact_ui(q.get_mpz_t(), shifted.get_mpz_t(), spec.h());
    if (is_odd(q))
        return std::nullopt;
    return q;
}

inline std::string discrepancy_note(const LinearEquation& eq, const DynamicsSpec& spec)
{
    auto alt = divisibility_only_forward_index(eq.m, spec);
    if (!alt)
        return {};
    std::string alt_eq = "a_" + eq.m.get_str() + " = w_f*a_" + alt->get_str() + " + w_b*a_" +
                         eq.backward_index.get_str() + (eq.constant ? " + 1" : "");
    return "# discrepancy m=" + eq.m.get_str() + ": divisibility-only reading gives \"" + alt_eq +
           "\"; forward index " + alt->get_str() + " is even, coefficient matching gives \"" + render(eq) + "\"";
}

enum class TableFormat { text, csv };

/// Equation table. Rows where the divisibility-only reading disagrees are
/// followed by a "# discrepancy" comment line.
inline void write_equation_table(std::ostream& out, const std::vector<LinearEquation>& eqs, const BigInt& k,
                                 const DynamicsSpec& spec, TableFormat format)
{
    out << "# equations for k=" << k.get_str() << ", dynamics " << spec.label() << ", m=1.."
        << (eqs.empty() ? std::string("0") : eqs.back().m.get_str()) << '\n';
    if (format == TableFormat::csv)
        out << "m,equation,forward_index,constant\n";
    for (const auto& eq : eqs) {
        if (format == TableFormat::csv)
            out << eq.m.get_str() << ',' << render(eq) << ',' << (eq.forward_index ? eq.forward_index->get_str() : "")
                << ',' << eq.constant << '\n';
        else
            out << render(eq) << '\n';
        if (auto note = discrepancy_note(eq, spec); !note.empty())
            out << note << '\n';
    }
}

/// a_start expressed through the doubling chain start, 2 start, 4 start, ...
/// after substituting `count` equations. References back to a_start are
/// collected in self_coefficient instead of being re-expanded.
struct ChainExpansion {
    BigInt start;
    std::map<BigInt, WeightPoly> terms;
    WeightPoly constant;
    WeightPoly self_coefficient;
    std::vector<LinearEquation> used;
    /// Position in `used` of the first equation that referenced a_start.
    std::optional<std::size_t> first_self_reference;
};

inline ChainExpansion expand_chain(const BigInt& start, std::uint64_t count, const BigInt& k,
                                   const DynamicsSpec& spec = {})
{
    if (start <= 0)
        throw std::invalid_argument("expand_chain: start must be a positive integer");
    ChainExpansion e{start, {}, {}, {}, {}, std::nullopt};
    e.terms.emplace(start, WeightPoly::one());
    BigInt current = start;
    for (std::uint64_t j = 0; j < count; ++j) {
        auto node = e.terms.extract(current);
        WeightPoly c = std::move(node.mapped());
        LinearEquation eq = equation_for(current, k, spec);
        detail::accumulate(e.terms, eq.backward_index, poly_shift(c, Shift::backward));
        if (eq.forward_index) {
            if (*eq.forward_index == start) {
                e.self_coefficient += poly_shift(c, Shift::forward);
                if (!e.first_self_reference)
                    e.first_self_reference = e.used.size();
            } else {
                detail::accumulate(e.terms, *eq.forward_index, poly_shift(c, Shift::forward));
            }
        }
        if (eq.constant != 0)
            e.constant += c;
        e.used.push_back(eq);
        current = eq.backward_index;
    }
    return e;
}

/// lhs * a_1 = sum terms + rhs_constant.
struct ChainRelation {
    WeightPoly lhs_poly;
    std::map<BigInt, WeightPoly> rhs_terms;
    WeightPoly rhs_constant;
    /// False when the depth ran out before any forward term into a_1 or any
    /// constant was met; the relation is then a bare restatement of the chain.
    bool closed = false;
    std::vector<LinearEquation> used;
    /// Expansion of the chain index right after the first forward term into
    /// a_1, using the equations left over past that point (e.g. a_8 for k=5).
    std::optional<ChainExpansion> continuation;
};

inline ChainRelation eliminate_chain(const BigInt& k, const DynamicsSpec& spec, std::uint64_t depth)
{
    if (depth == 0)
        throw std::invalid_argument("eliminate_chain: depth must be at least 1");
    ChainExpansion e = expand_chain(1, depth, k, spec);
    ChainRelation r;
    r.lhs_poly = WeightPoly::one() - e.self_coefficient;
    r.rhs_terms = e.terms;
    r.rhs_constant = e.constant;
    r.closed = !e.self_coefficient.is_zero() || !e.constant.is_zero();
    r.used = e.used;
    if (e.first_self_reference) {
        std::uint64_t consumed = *e.first_self_reference + 1;
        if (consumed < depth)
            r.continuation = expand_chain(e.used[*e.first_self_reference].backward_index, depth - consumed, k, spec);
    }
    return r;
}

namespace detail {

inline std::string render_scaled(const WeightPoly& c, const std::string& symbol)
{
    if (c == WeightPoly::one())
        return symbol;
    if (c.size() == 1)
        return render(c) + "*" + symbol;
    return "(" + render(c) + ")*" + symbol;
}

inline std::string render_rhs(const std::map<BigInt, WeightPoly>& terms, const WeightPoly& constant)
{
    std::string s;
    for (const auto& [n, c] : terms) {
        if (!s.empty())
            s += " + ";
        s += render_scaled(c, "a_" + n.get_str());
    }
    if (!constant.is_zero()) {
        if (!s.empty())
            s += " + ";
        s += constant.size() == 1 ? render(constant) : "(" + render(constant) + ")";
    }
    return s.empty() ? "0" : s;
}

} // namespace detail

/// "(-w_b^2*w_f + 1)*a_1 = w_b^3*a_8"
inline std::string render(const ChainRelation& r)
{
    return detail::render_scaled(r.lhs_poly, "a_1") + " = " + detail::render_rhs(r.rhs_terms, r.rhs_constant);
}

/// "a_8 = w_b*w_f*a_5 + w_b^2*a_32"
inline std::string render(const ChainExpansion& e)
{
    std::string lhs = "a_" + e.start.get_str();
    if (!e.self_coefficient.is_zero())
        lhs = detail::render_scaled(WeightPoly::one() - e.self_coefficient, lhs);
    return lhs + " = " + detail::render_rhs(e.terms, e.constant);
}

/// w_b^2 w_f != 1, exactly.
inline bool weight_condition_ok(const WeightValues& v) { return v.w_b * v.w_b * v.w_f != 1; }

} // namespace arrival
