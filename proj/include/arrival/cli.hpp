#pragma once

// Command-line front end. run() is the whole program; tools/arrival.cpp
// only forwards argv to it.
//
// Exit codes: 0 success, 1 usage error, 2 resource limit exceeded,
// 3 a verification found a violated property.

#include "arrival_series.hpp"
#include "collatz_core.hpp"
#include "exact_algebra.hpp"
#include "linear_system.hpp"
#include "verify_harness.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace arrival::cli {

enum ExitCode : int { ok = 0, usage = 1, resource = 2, violation = 3 };

/// Shortest round-trip decimal for a double; zeros of either sign print "0".
inline std::string format_double(double v)
{
    if (v == 0.0)
        return "0";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

inline std::string format_complex(std::complex<double> z)
{
    if (z.imag() == 0.0)
        return format_double(z.real());
    std::string im = format_double(z.imag());
    std::string re = z.real() == 0.0 ? "" : format_double(z.real());
    if (!re.empty() && im.front() != '-')
        im = "+" + im;
    return re + im + "i";
}

namespace detail {

inline double parse_double(std::string_view s, std::string_view whole)
{
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        throw std::invalid_argument("not a number: '" + std::string(whole) + "'");
    return v;
}

} // namespace detail

/// "0.2", "-0.2i", "i", "0.2-0.2i", "-1e-3+2i".
inline std::complex<double> parse_complex(std::string_view text)
{
    if (text.empty())
        throw std::invalid_argument("empty complex number");
    if (text.back() != 'i')
        return {detail::parse_double(text, text), 0.0};
    std::string_view body = text.substr(0, text.size() - 1);
    std::size_t split = std::string_view::npos;
    for (std::size_t p = body.size(); p-- > 1;) {
        if ((body[p] == '+' || body[p] == '-') && body[p - 1] != 'e' && body[p - 1] != 'E') {
            split = p;
            break;
        }
    }
    std::string_view re = split == std::string_view::npos ? std::string_view{} : body.substr(0, split);
    std::string_view im = split == std::string_view::npos ? body : body.substr(split);
    double imag = 0;
    if (im.empty() || im == "+")
        imag = 1;
    else if (im == "-")
        imag = -1;
    else
        imag = detail::parse_double(im, text);
    return {re.empty() ? 0.0 : detail::parse_double(re, text), imag};
}

inline BigInt parse_positive(const std::string& text, const char* what)
{
    BigInt v;
    if (text.empty() || v.set_str(text, 10) != 0 || v <= 0)
        throw std::invalid_argument(std::string(what) + " must be a positive integer, got '" + text + "'");
    return v;
}

inline DynamicsSpec parse_spec(long long h, const std::string& sign)
{
    int s = 0;
    if (sign == "+1" || sign == "1" || sign == "+")
        s = 1;
    else if (sign == "-1" || sign == "-")
        s = -1;
    else
        throw std::invalid_argument("--sign must be +1 or -1, got '" + sign + "'");
    return DynamicsSpec(h, s);
}

/// Evenly spaced points from a to b inclusive; symmetric intervals put an
/// exact 0 at the midpoint.
inline std::vector<std::complex<double>> segment_grid(std::complex<double> a, std::complex<double> b,
                                                      std::size_t points)
{
    if (points < 2)
        throw std::invalid_argument("grid needs at least 2 points");
    std::vector<std::complex<double>> xs;
    xs.reserve(points);
    for (std::size_t j = 0; j < points; ++j) {
        double t = static_cast<double>(j) / static_cast<double>(points - 1);
        xs.emplace_back(a.real() * (1 - t) + b.real() * t, a.imag() * (1 - t) + b.imag() * t);
    }
    return xs;
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Arrival-series toolkit for 3n+1 style dynamics", "arrival"};
    app.set_help_flag("--help", "print help and exit");
    app.require_subcommand(1);

    std::string k_text = "5", n_text = "1", out_path, format, from_text = "1", to_text = "10", sign = "+1",
                wb_text, wf_text;
    long long h = 3;
    std::uint64_t i = 0, steps = 0, m_max = 16, depth = 3, max_i = 1000, spot_every = 1000;
    std::optional<std::string> expand_from;
    unsigned threads = 1;
    std::vector<std::string> grid;

    auto add_dynamics = [&](CLI::App* sub) {
        sub->add_option("--h", h, "odd multiplier h >= 3")->capture_default_str();
        sub->add_option("--sign", sign, "+1 or -1")->capture_default_str();
    };
    auto add_output = [&](CLI::App* sub, const char* formats) {
        sub->add_option("--out,-o", out_path, "output file (default stdout)");
        sub->add_option("--format", format, formats);
    };

    auto* traj = app.add_subcommand("traj", "departure orbit as CSV (step,state,parity)");
    traj->add_option("--k", k_text, "start value")->required();
    traj->add_option("--steps,--i", steps, "number of steps")->required();
    add_dynamics(traj);
    add_output(traj, "csv|text");

    auto* iter = app.add_subcommand("iterate", "series A_{k,i} as JSON");
    iter->add_option("--k", k_text)->required();
    iter->add_option("--i", i)->required();
    add_dynamics(iter);
    add_output(iter, "json|text");

    auto* coeff = app.add_subcommand("coeff", "one coefficient a_{k,n} of A_{k,i}");
    coeff->add_option("--k", k_text)->required();
    coeff->add_option("--i", i)->required();
    coeff->add_option("--n", n_text)->capture_default_str();
    coeff->add_option("--wb", wb_text, "also print the exact value at these weights");
    coeff->add_option("--wf", wf_text);
    add_dynamics(coeff);
    add_output(coeff, "text");

    auto* eqs = app.add_subcommand("eqs", "coefficient-matching equations for m=1..m_max");
    eqs->add_option("--k", k_text)->required();
    eqs->add_option("--m-max", m_max)->capture_default_str();
    add_dynamics(eqs);
    add_output(eqs, "text|csv");

    auto* elim = app.add_subcommand("eliminate", "back-substitution along the doubling chain from a_1");
    elim->add_option("--k", k_text)->required();
    elim->add_option("--depth", depth, "equations to substitute")->capture_default_str();
    elim->add_option("--from", expand_from, "expand a_n instead of eliminating for a_1");
    add_dynamics(elim);
    add_output(elim, "text");

    auto* check = app.add_subcommand("check", "series/orbit consistency checks for one k");
    check->add_option("--k", k_text)->required();
    check->add_option("--i", i)->required();
    add_dynamics(check);
    add_output(check, "text");

    auto* sweep_cmd = app.add_subcommand("sweep", "per-k hitting-time table as CSV");
    sweep_cmd->add_option("--from", from_text)->required();
    sweep_cmd->add_option("--to", to_text)->required();
    sweep_cmd->add_option("--max-i", max_i)->capture_default_str();
    sweep_cmd->add_option("--threads", threads)->capture_default_str();
    sweep_cmd->add_option("--spot-check-every", spot_every, "0 disables")->capture_default_str();
    add_dynamics(sweep_cmd);
    add_output(sweep_cmd, "csv|text");

    auto* plot = app.add_subcommand("plotdata", "A_{k,i}(x) on a real or complex segment as CSV (x,re,im)");
    plot->add_option("--k", k_text)->required();
    plot->add_option("--i", i)->required();
    plot->add_option("--wb", wb_text)->required();
    plot->add_option("--wf", wf_text)->required();
    plot->add_option("--grid", grid, "x_min x_max points; endpoints may be complex, e.g. -0.2-0.2i")
        ->expected(3)
        ->allow_extra_args(false)
        ->required();
    add_dynamics(plot);
    add_output(plot, "csv|text");

    std::vector<const char*> argv;
    argv.push_back("arrival");
    for (const auto& a : args)
        argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return ok;
        }
        err << "error: " << e.what() << '\n';
        return usage;
    }

    auto require_format = [&](std::initializer_list<std::string_view> allowed) {
        if (format.empty())
            return;
        for (auto a : allowed)
            if (format == a)
                return;
        throw std::invalid_argument("unsupported --format '" + format + "' for this command");
    };

    try {
        const DynamicsSpec spec = parse_spec(h, sign);

        std::unique_ptr<std::ofstream> file;
        if (!out_path.empty()) {
            file = std::make_unique<std::ofstream>(out_path, std::ios::binary | std::ios::trunc);
            if (!*file)
                throw std::invalid_argument("cannot open output file '" + out_path + "'");
        }
        std::ostream& dst = file ? *file : out;

        if (*traj) {
            require_format({"csv", "text"});
            write_trajectory_csv(dst, departure(parse_positive(k_text, "--k"), spec, steps));
        } else if (*iter) {
            require_format({"json", "text"});
            SparseSeries s = iterate(parse_positive(k_text, "--k"), i, spec);
            if (format == "text")
                write_series_text(dst, s);
            else
                write_series_json(dst, s);
        } else if (*coeff) {
            require_format({"text"});
            SparseSeries s = iterate(parse_positive(k_text, "--k"), i, spec);
            WeightPoly c = coefficient(s, parse_positive(n_text, "--n"));
            dst << render(c) << '\n';
            if (!wb_text.empty() || !wf_text.empty()) {
                if (wb_text.empty() || wf_text.empty())
                    throw std::invalid_argument("--wb and --wf must be given together");
                dst << to_string(poly_eval(c, {parse_exact(wb_text), parse_exact(wf_text)})) << '\n';
            }
        } else if (*eqs) {
            require_format({"text", "csv"});
            BigInt k = parse_positive(k_text, "--k");
            write_equation_table(dst, generate_equations(k, m_max, spec), k, spec,
                                 format == "csv" ? TableFormat::csv : TableFormat::text);
        } else if (*elim) {
            require_format({"text"});
            BigInt k = parse_positive(k_text, "--k");
            if (depth == 0)
                throw std::invalid_argument("--depth must be at least 1");
            if (expand_from) {
                ChainExpansion e = expand_chain(parse_positive(*expand_from, "--from"), depth, k, spec);
                dst << "# chain expansion of a_" << e.start.get_str() << " for k=" << k.get_str() << ", dynamics "
                    << spec.label() << ", depth " << depth << '\n';
                for (const auto& eq : e.used)
                    dst << render(eq) << '\n';
                dst << "expansion: " << render(e) << '\n';
            } else {
                ChainRelation r = eliminate_chain(k, spec, depth);
                dst << "# chain elimination for k=" << k.get_str() << ", dynamics " << spec.label() << ", depth "
                    << depth << '\n';
                for (const auto& eq : r.used)
                    dst << render(eq) << '\n';
                if (r.continuation) {
                    std::uint64_t closing = depth - r.continuation->used.size();
                    dst << "closure: " << render(eliminate_chain(k, spec, closing)) << '\n';
                    dst << "substitution: " << render(*r.continuation) << '\n';
                }
                dst << "relation: " << render(r) << '\n';
                if (!r.closed)
                    dst << "# open: no forward term into a_1 and no constant within depth " << depth << '\n';
            }
        } else if (*check) {
            require_format({"text"});
            BigInt k = parse_positive(k_text, "--k");
            bool all = true;
            auto report = [&](std::string_view name, bool pass) {
                dst << name << ": " << (pass ? "pass" : "FAIL") << '\n';
                all = all && pass;
            };
            dst << "# k=" << k.get_str() << " i=" << i << " dynamics " << spec.label() << '\n';
            report("oracle_equivalence", oracle_equivalence(k, i, spec));
            report("implication_check", implication_check(k, i, spec));
            if (spec == DynamicsSpec{})
                report("odd_group_check", odd_group_check(k, i));
            else
                dst << "odd_group_check: skipped (defined for 3n+1 only)\n";
            auto min_i = min_nonzero_iteration(k, spec, i);
            auto hit = hitting_time(k, 1, spec, i);
            dst << "min_nonzero_iteration: " << (min_i ? std::to_string(*min_i) : "none") << '\n';
            dst << "hitting_time: " << (hit ? std::to_string(*hit) : "none") << '\n';
            report("min_nonzero_equals_hitting_time", min_i == hit);
            if (min_i)
                err << iteration_origin_note(k, *min_i) << '\n';
            return all ? ok : violation;
        } else if (*sweep_cmd) {
            require_format({"csv", "text"});
            SweepOptions opts;
            opts.threads = threads;
            opts.spot_check_every = spot_every;
            auto rows = sweep(parse_positive(from_text, "--from"), parse_positive(to_text, "--to"), spec, max_i, opts);
            write_sweep_csv(dst, rows);
            for (const auto& r : rows)
                if (!r.verified)
                    return violation;
        } else if (*plot) {
            require_format({"csv", "text"});
            const std::complex<double> a = parse_complex(grid.at(0)), b = parse_complex(grid.at(1));
            std::size_t points = 0;
            try {
                points = std::stoul(grid.at(2));
            } catch (const std::exception&) {
                throw std::invalid_argument("grid point count must be an integer, got '" + grid.at(2) + "'");
            }
            const bool real_line = a.imag() == 0.0 && b.imag() == 0.0;
            const WeightValues v{parse_exact(wb_text), parse_exact(wf_text)};
            const NumericSeries f(iterate(parse_positive(k_text, "--k"), i, spec), v);

            bool real_violation = false;
            dst << "x,re,im\n";
            for (auto x : segment_grid(a, b, points)) {
                auto y = f(x);
                if (!is_finite(y))
                    err << "warning: non-finite value at x=" << format_complex(x) << '\n';
                if (real_line && y.imag() != 0.0)
                    real_violation = true;
                dst << (real_line ? format_double(x.real()) : format_complex(x)) << ',' << format_double(y.real())
                    << ',' << format_double(y.imag()) << '\n';
            }
            if (real_violation) {
                err << "error: nonzero imaginary part on the real line\n";
                return violation;
            }
        }
        dst.flush();
        return ok;
    } catch (const ResourceError& e) {
        err << "resource limit: " << e.what() << '\n';
        return resource;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    }
}

} // namespace arrival::cli
