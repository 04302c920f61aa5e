#pragma once

// Gap functions, the McShane-type series and their verification reports.

#include "curves.hpp"

#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace schottky {

// ---------------------------------------------------------------------------
// Gap functions

/// G(x, y, z) = 2 atanh(sinh x / (cosh x + e^(y+z))).
template <class T>
Complex<T> gap_G(Complex<T> x, Complex<T> y, Complex<T> z)
{
    const Complex<T> s = y + z;
    Complex<T> num, den;
    if (s.real() > 0) {
        // divide through by e^(y+z) so large lengths do not overflow
        const Complex<T> e = std::exp(-s);
        num = std::sinh(x) * e;
        den = std::cosh(x) * e + T(1);
    } else {
        num = std::sinh(x);
        den = std::cosh(x) + std::exp(s);
    }
    if (std::abs(den) <= std::numeric_limits<T>::min())
        throw Error(ErrorKind::ZeroDenominator, "identities", "cosh x + e^(y+z) = 0");
    return T(2) * atanh_principal(num / den);
}

/// S(x, y, z) = atanh(sinh x sinh y / (cosh z + cosh x cosh y)).
template <class T>
Complex<T> gap_S(Complex<T> x, Complex<T> y, Complex<T> z)
{
    const Complex<T> den = std::cosh(z) + std::cosh(x) * std::cosh(y);
    if (std::abs(den) <= std::numeric_limits<T>::min())
        throw Error(ErrorKind::ZeroDenominator, "identities", "cosh z + cosh x cosh y = 0");
    return atanh_principal(std::sinh(x) * std::sinh(y) / den);
}

/// G = log((e^x + e^(y+z)) / (e^-x + e^(y+z))).
template <class T>
Complex<T> gap_G_log(Complex<T> x, Complex<T> y, Complex<T> z)
{
    const Complex<T> s = y + z;
    Complex<T> num, den;
    if (s.real() > 0) {
        num = std::exp(x - s) + T(1);
        den = std::exp(-x - s) + T(1);
    } else {
        num = std::exp(x) + std::exp(s);
        den = std::exp(-x) + std::exp(s);
    }
    if (std::abs(num) == T(0) || std::abs(den) == T(0))
        throw Error(ErrorKind::ZeroArgument, "identities", "log argument of G vanishes");
    return log_principal(num / den);
}

/// S = 1/2 log((cosh z + cosh(x+y)) / (cosh z + cosh(x-y))).
template <class T>
Complex<T> gap_S_log(Complex<T> x, Complex<T> y, Complex<T> z)
{
    const Complex<T> num = std::cosh(z) + std::cosh(x + y);
    const Complex<T> den = std::cosh(z) + std::cosh(x - y);
    if (std::abs(num) == T(0) || std::abs(den) == T(0))
        throw Error(ErrorKind::ZeroArgument, "identities", "log argument of S vanishes");
    return T(0.5) * log_principal(num / den);
}

// ---------------------------------------------------------------------------
// Moduli

enum class Modulus { None, PiI, TwoPiI, Pi };

inline const char* to_string(Modulus m)
{
    switch (m) {
    case Modulus::None: return "none";
    case Modulus::PiI: return "pi*i";
    case Modulus::TwoPiI: return "2*pi*i";
    case Modulus::Pi: return "pi";
    }
    return "?";
}

template <class T>
Complex<T> modulus_value(Modulus m)
{
    switch (m) {
    case Modulus::None: return 0;
    case Modulus::PiI: return {0, pi<T>};
    case Modulus::TwoPiI: return {0, 2 * pi<T>};
    case Modulus::Pi: return pi<T>;
    }
    return 0;
}

template <class T>
struct Defect {
    long long k = 0;
    T residual = 0;
};

/// Nearest lattice point: k minimizes |lhs - rhs - k m|.
template <class T>
Defect<T> mod_defect(Complex<T> lhs, Complex<T> rhs, Modulus modulus)
{
    const Complex<T> d = lhs - rhs;
    if (modulus == Modulus::None)
        return {0, std::abs(d)};
    const Complex<T> m = modulus_value<T>(modulus);
    const T proj = (d * std::conj(m)).real() / std::norm(m);
    const long long k = std::llround(proj);
    return {k, std::abs(d - T(k) * m)};
}

/// True iff G and S are unchanged mod 2 pi i when pi i is added to any two arguments.
template <class T>
bool shift_invariance_check(Complex<T> x, Complex<T> y, Complex<T> z, T eps = T(1e-9))
{
    const Complex<T> s(0, pi<T>);
    const Complex<T> g = gap_G(x, y, z), h = gap_S(x, y, z);
    const std::array<std::array<Complex<T>, 3>, 3> shifted {{{x + s, y + s, z}, {x + s, y, z + s}, {x, y + s, z + s}}};
    for (const auto& a : shifted) {
        if (mod_defect(gap_G(a[0], a[1], a[2]), g, Modulus::TwoPiI).residual > eps)
            return false;
        if (mod_defect(gap_S(a[0], a[1], a[2]), h, Modulus::TwoPiI).residual > eps)
            return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Reports

template <class T>
struct Term {
    std::string label;
    std::optional<Slope> slope;
    long long level = 0;
    Complex<T> value;
};

template <class T>
struct IdentityReport {
    std::string identity;
    Complex<T> lhs, rhs;
    Modulus modulus = Modulus::None;
    long long defect_k = 0;
    T residual = 0;
    std::size_t terms_used = 0;
    /// Infinite when no bound could be fitted.
    T truncation_bound = 0;
    T kappa = 0;
    std::string kappa_source;
    std::vector<Term<T>> per_term;
    std::vector<std::pair<std::string, std::string>> choices;

    bool passed(T tol) const { return residual <= tol; }
};

struct SumOptions {
    int threads = 1;
    bool keep_terms = true;
    /// Overrides the certificate or empirical kappa used by the tail bound.
    std::optional<double> kappa;
};

// ---------------------------------------------------------------------------
// Tail bound

/// c C sum_{n > start} n^2 e^(-kappa n / 2), in closed form.
template <class T>
T tail_estimate(T kappa, long long start, T C, T c)
{
    if (!(kappa > 0))
        throw Error(ErrorKind::InvalidArgument, "identities", "tail_estimate needs kappa > 0");
    if (start < 10)
        throw Error(ErrorKind::InsufficientPrefix, "identities", "tail fit needs at least 10 Farey levels");
    const T r = std::exp(-kappa / 2);
    const T m = T(start + 1);
    const T one_r = -std::expm1(-kappa / 2);
    const T series = m * m / one_r + 2 * m * r / (one_r * one_r) + r * (1 + r) / (one_r * one_r * one_r);
    return c * C * std::exp(-kappa * m / 2) * series;
}

namespace detail {

    // Chunked evaluation of f(i) for i in [0, n); worker w gets one contiguous block.
    template <class R, class F>
    std::vector<R> parallel_map(std::size_t n, int threads, F&& f)
    {
        std::vector<R> out(n);
        const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads < 1 ? 1 : threads, n));
        if (workers == 1) {
            for (std::size_t i = 0; i < n; ++i)
                out[i] = f(i);
            return out;
        }
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = n * w / workers; i < n * (w + 1) / workers; ++i)
                        out[i] = f(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool)
            t.join();
        for (auto& e : errors)
            if (e)
                std::rethrow_exception(e);
        return out;
    }

    // Sequential sums of contiguous chunks, then a pairwise tree over the chunk sums.
    template <class T>
    Complex<T> reduce_sum(const std::vector<Term<T>>& terms, int threads)
    {
        const std::size_t n = terms.size();
        const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(threads < 1 ? 1 : threads, n));
        std::vector<Complex<T>> partial(chunks);
        for (std::size_t w = 0; w < chunks; ++w)
            for (std::size_t i = n * w / chunks; i < n * (w + 1) / chunks; ++i)
                partial[w] += terms[i].value;
        while (partial.size() > 1) {
            std::vector<Complex<T>> next;
            for (std::size_t i = 0; i + 1 < partial.size(); i += 2)
                next.push_back(partial[i] + partial[i + 1]);
            if (partial.size() % 2)
                next.push_back(partial.back());
            partial = std::move(next);
        }
        return partial.empty() ? Complex<T>(0) : partial.front();
    }

    template <class T>
    void require_cauchy(const std::vector<Term<T>>& terms, long long max_level, T tol, const char* what)
    {
        T tail = 0;
        for (const auto& t : terms)
            if (t.level > max_level - 3)
                tail += std::abs(t.value);
        if (!(tail < tol / 10))
            throw Error(ErrorKind::NonConvergence, "identities",
                std::string(what) + ": last three levels contribute " + std::to_string(static_cast<double>(tail))
                    + ", not below tol/10");
    }

    // Fits |term| <= C e^(-rate n / 2) and count <= c n^2 over levels 1..max_level (2x safety).
    template <class T>
    T fitted_tail(const std::vector<Term<T>>& terms, long long max_level, T rate)
    {
        std::map<long long, std::pair<T, long long>> per_level;
        for (const auto& t : terms) {
            auto& slot = per_level[t.level];
            slot.first = std::max(slot.first, std::abs(t.value));
            ++slot.second;
        }
        T C = 0, c = 0;
        for (const auto& [n, v] : per_level) {
            if (n < 1)
                continue;
            C = std::max(C, v.first * std::exp(rate * T(n) / 2));
            c = std::max(c, T(v.second) / (T(n) * T(n)));
        }
        try {
            return tail_estimate(rate, max_level, T(2) * C, T(2) * c);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::InsufficientPrefix)
                return std::numeric_limits<T>::infinity();
            throw;
        }
    }

    // Smallest re(l(s)) / (|p| + q) over the prefix; a stand-in for kappa without a certificate.
    template <class T>
    T empirical_kappa(const std::vector<SlopeTrace<T>>& traces)
    {
        T k = std::numeric_limits<T>::infinity();
        for (const auto& st : traces)
            k = std::min(k, complex_length_from_trace(st.trace).value.real() / T(st.slope.level()));
        return k;
    }

    template <class T>
    std::pair<T, std::string> pick_kappa(const SumOptions& opt, const std::optional<T>& certified,
        const std::vector<SlopeTrace<T>>& traces)
    {
        if (opt.kappa)
            return {T(*opt.kappa), "override"};
        if (certified)
            return {*certified, "certificate"};
        return {empirical_kappa(traces), "empirical"};
    }

    template <class T>
    std::optional<T> certified_kappa(const MarkedSchottkyGroup<T>& g)
    {
        if (g.circles())
            return kappa(*g.circles());
        return std::nullopt;
    }

    template <class T>
    IdentityReport<T> finish(IdentityReport<T> r, std::vector<Term<T>> terms, const SumOptions& opt)
    {
        r.lhs = reduce_sum(terms, opt.threads);
        const auto d = mod_defect(r.lhs, r.rhs, r.modulus);
        r.defect_k = d.k;
        r.residual = d.residual;
        r.terms_used = terms.size();
        if (opt.keep_terms)
            r.per_term = std::move(terms);
        r.choices.emplace_back("threads", std::to_string(opt.threads));
        return r;
    }

} // namespace detail

// ---------------------------------------------------------------------------
// Pair of pants

template <class T>
IdentityReport<T> pants_trivial_identity(Complex<T> l0, Complex<T> l1, Complex<T> l2)
{
    const Complex<T> x = l0 / T(2), y = l1 / T(2), z = l2 / T(2);
    std::vector<Term<T>> terms {
        {"G(l0/2,l1/2,l2/2)", std::nullopt, 1, gap_G(x, y, z)},
        {"S(l0/2,l1/2,l2/2)", std::nullopt, 1, gap_S(x, y, z)},
        {"S(l0/2,l2/2,l1/2)", std::nullopt, 1, gap_S(x, z, y)},
    };
    IdentityReport<T> r;
    r.identity = "pants-trivial";
    r.rhs = x;
    r.modulus = Modulus::None;
    return detail::finish(std::move(r), std::move(terms), SumOptions {});
}

// ---------------------------------------------------------------------------
// One-holed torus series over all slopes in Q u {inf}

/// sum_s G(nu, h(s), h(s)) = nu mod 2 pi i, with nu the half length of [a, b] = b^-1 a^-1 b a.
template <class T>
IdentityReport<T> torus_mcshane_sum(const TraceTriple<T>& t, long long max_sum, T tol, const SumOptions& opt = {},
    std::optional<T> certified = std::nullopt)
{
    const Complex<T> comm = commutator_trace(t);
    require_loxodromic(comm, "identities");
    const Complex<T> nu = half_length_from_trace(comm).value;
    const auto traces = slope_traces(t, max_sum);
    auto terms = detail::parallel_map<Term<T>>(traces.size(), opt.threads, [&](std::size_t i) {
        const auto& st = traces[i];
        const Complex<T> h = half_length_from_trace(st.trace).value;
        return Term<T> {st.slope.to_string(), st.slope, st.slope.level(), gap_G(nu, h, h)};
    });
    detail::require_cauchy(terms, max_sum, tol, "torus sum");
    const auto [kap, source] = detail::pick_kappa(opt, certified, traces);

    IdentityReport<T> r;
    r.identity = "torus";
    r.rhs = nu;
    r.modulus = Modulus::TwoPiI;
    r.kappa = kap;
    r.kappa_source = source;
    // both slots carry the same word, so the proof bound decays like e^(-kappa n)
    r.truncation_bound = detail::fitted_tail(terms, max_sum, 2 * kap);
    r.choices = {{"half_length", "cosh(h) = -tr/2, re h > 0, im in (-pi, pi]"}, {"slopes", "|p| + q <= max_sum, signed"}};
    return detail::finish(std::move(r), std::move(terms), opt);
}

template <class T>
IdentityReport<T> torus_mcshane_sum(const MarkedSchottkyGroup<T>& g, long long max_sum, T tol, const SumOptions& opt = {})
{
    auto r = torus_mcshane_sum(trace_triple(g), max_sum, tol, opt, detail::certified_kappa(g));
    // rhs straight from the commutator matrix
    r.rhs = half_length(word_matrix(g, Word::parse("BAba"))).value;
    const auto d = mod_defect(r.lhs, r.rhs, r.modulus);
    r.defect_k = d.k;
    r.residual = d.residual;
    return r;
}

/// Summands atan(cosh(q) / sinh(h(s))) over one parity class; target pi/2 mod pi.
/// quarter 0 uses q = nu/2, quarter 1 uses q = nu/2 + pi i.
template <class T>
IdentityReport<T> weierstrass_sum(const TraceTriple<T>& t, WeierstrassClass cls, long long max_sum, T tol,
    int quarter = 0, const SumOptions& opt = {}, std::optional<T> certified = std::nullopt)
{
    if (quarter != 0 && quarter != 1)
        throw Error(ErrorKind::InvalidArgument, "identities", "quarter choice must be 0 or 1");
    const Complex<T> comm = commutator_trace(t);
    require_loxodromic(comm, "identities");
    const Complex<T> nu = half_length_from_trace(comm).value;
    const Complex<T> q = nu / T(2) + (quarter ? Complex<T>(0, pi<T>) : Complex<T>(0));
    const Complex<T> cq = std::cosh(q);

    std::vector<SlopeTrace<T>> traces;
    for (auto& st : slope_traces(t, max_sum))
        if (weierstrass_class(st.slope) == cls)
            traces.push_back(st);
    auto terms = detail::parallel_map<Term<T>>(traces.size(), opt.threads, [&](std::size_t i) {
        const auto& st = traces[i];
        const Complex<T> h = half_length_from_trace(st.trace).value;
        Complex<T> w;
        if (h.real() > 20) {
            const Complex<T> e = std::exp(-h);
            w = T(2) * cq * e / (T(1) - e * e);
        } else {
            w = cq / std::sinh(h);
        }
        return Term<T> {st.slope.to_string(), st.slope, st.slope.level(), atan_principal(w)};
    });
    detail::require_cauchy(terms, max_sum, tol, "weierstrass sum");
    const auto [kap, source] = detail::pick_kappa(opt, certified, traces);

    IdentityReport<T> r;
    r.identity = std::string("weierstrass-") + to_string(cls);
    r.rhs = pi<T> / 2;
    r.modulus = Modulus::Pi;
    r.kappa = kap;
    r.kappa_source = source;
    r.truncation_bound = detail::fitted_tail(terms, max_sum, kap);
    r.choices = {{"class", to_string(cls)}, {"quarter", quarter ? "nu/2 + pi*i" : "nu/2"},
        {"atan", "atanh(i w) / i, principal"}};
    return detail::finish(std::move(r), std::move(terms), opt);
}

template <class T>
IdentityReport<T> weierstrass_sum(const MarkedSchottkyGroup<T>& g, WeierstrassClass cls, long long max_sum, T tol,
    int quarter = 0, const SumOptions& opt = {})
{
    return weierstrass_sum(trace_triple(g), cls, max_sum, tol, quarter, opt, detail::certified_kappa(g));
}

/// h(x) = (1 - sqrt(1 - 4/x^2)) / 2, written as (2/x^2) / (1 + r) with re r >= 0.
template <class T>
Complex<T> h_function(Complex<T> x)
{
    if (std::abs(x) == T(0))
        throw Error(ErrorKind::BranchPole, "identities", "h(0) is undefined");
    const Complex<T> u = T(4) / (x * x);
    Complex<T> r = std::sqrt(T(1) - u);
    if (r.real() < 0)
        r = -r;
    return (u / T(2)) / (T(1) + r);
}

/// frak h(x) = log((1 + (e^nu - 1) h(x)) / (1 + (e^-nu - 1) h(x))).
template <class T>
Complex<T> frak_h(Complex<T> x, Complex<T> nu)
{
    const Complex<T> h = h_function(x);
    const Complex<T> num = T(1) + (std::exp(nu) - T(1)) * h;
    const Complex<T> den = T(1) + (std::exp(-nu) - T(1)) * h;
    if (std::abs(num) == T(0) || std::abs(den) == T(0))
        throw Error(ErrorKind::BranchPole, "identities", "frak h log argument vanishes");
    return log_principal(num / den);
}

/// sum_s frak h(tr s) = nu mod 2 pi i, nu = acosh(-tr[a,b] / 2).
template <class T>
IdentityReport<T> markoff_sum(const TraceTriple<T>& t, long long max_sum, T tol, const SumOptions& opt = {},
    std::optional<T> certified = std::nullopt)
{
    const Complex<T> comm = commutator_trace(t);
    require_loxodromic(comm, "identities");
    const Complex<T> nu = acosh_positive(-comm / T(2));
    const auto traces = slope_traces(t, max_sum);
    auto terms = detail::parallel_map<Term<T>>(traces.size(), opt.threads, [&](std::size_t i) {
        const auto& st = traces[i];
        return Term<T> {st.slope.to_string(), st.slope, st.slope.level(), frak_h(st.trace, nu)};
    });
    detail::require_cauchy(terms, max_sum, tol, "markoff sum");
    const auto [kap, source] = detail::pick_kappa(opt, certified, traces);

    IdentityReport<T> r;
    r.identity = "markoff";
    r.rhs = nu;
    r.modulus = Modulus::TwoPiI;
    r.kappa = kap;
    r.kappa_source = source;
    r.truncation_bound = detail::fitted_tail(terms, max_sum, 2 * kap);
    r.choices = {{"sqrt", "re sqrt(1 - 4/x^2) >= 0"}, {"log", "principal"}};
    return detail::finish(std::move(r), std::move(terms), opt);
}

// ---------------------------------------------------------------------------
// General series from a supplied decomposition

/// Boundary words d_0..d_m with level-indexed streams for P (pairs) and each B_j (j = 1..m).
/// Streams must be deterministic functions of the level (1, 2, ...). When last_level is set,
/// every stream is empty beyond it and the sum is finite.
template <class T>
struct PantsDecomposition {
    std::vector<Word> boundary;
    std::function<std::vector<std::pair<Word, Word>>(long long)> pairs;
    std::vector<std::function<std::vector<Word>(long long)>> bj;
    std::optional<long long> last_level;
};

/// d_0 = [a, b]; P = {{w, w} : w the Christoffel word of a slope with |p| + q = level}.
template <class T>
PantsDecomposition<T> torus_decomposition()
{
    PantsDecomposition<T> pd;
    pd.boundary = {Word::parse("BAba")};
    pd.pairs = [](long long level) {
        std::vector<std::pair<Word, Word>> out;
        for (const auto& s : signed_slopes_up_to(std::max<long long>(level, 1)))
            if (s.level() == level) {
                const Word w = christoffel_word(s);
                out.emplace_back(w, w);
            }
        return out;
    };
    return pd;
}

/// Boundaries (a, b, ab): P = {{b, ab}}, B_1 = {ab}, B_2 = {b}.
template <class T>
PantsDecomposition<T> pants_own_decomposition()
{
    PantsDecomposition<T> pd;
    pd.boundary = {Word::parse("a"), Word::parse("b"), Word::parse("ab")};
    pd.pairs = [](long long level) {
        std::vector<std::pair<Word, Word>> out;
        if (level == 1)
            out.emplace_back(Word::parse("b"), Word::parse("ab"));
        return out;
    };
    pd.bj = {
        [](long long level) { return level == 1 ? std::vector<Word> {Word::parse("ab")} : std::vector<Word> {}; },
        [](long long level) { return level == 1 ? std::vector<Word> {Word::parse("b")} : std::vector<Word> {}; },
    };
    pd.last_level = 1;
    return pd;
}

/// sum_P G(h(d0), h(g), h(h)) + sum_j sum_{B_j} S(h(d0), h(d_j), h(g)) = h(d0) mod pi i,
/// over stream levels 1..budget; h is the half length of the chosen lift.
template <class T>
IdentityReport<T> general_mcshane_sum(const MarkedSchottkyGroup<T>& g, const PantsDecomposition<T>& pd,
    long long budget, T tol, const SumOptions& opt = {})
{
    if (pd.boundary.empty())
        throw Error(ErrorKind::InvalidArgument, "identities", "decomposition needs d_0");
    if (pd.bj.size() + 1 > pd.boundary.size())
        throw Error(ErrorKind::InvalidArgument, "identities", "more B_j streams than boundary words");
    auto half = [&](const Word& w) { return half_length(word_matrix(g, w)).value; };
    const Complex<T> h0 = half(pd.boundary[0]);

    struct Job {
        long long level;
        int kind; // 0 pair, else j
        Word u, v;
    };
    std::vector<Job> jobs;
    const long long top = pd.last_level ? std::min(budget, *pd.last_level) : budget;
    for (long long level = 1; level <= top; ++level) {
        if (pd.pairs)
            for (auto& [u, v] : pd.pairs(level))
                jobs.push_back({level, 0, u, v});
        for (std::size_t j = 0; j < pd.bj.size(); ++j)
            if (pd.bj[j])
                for (auto& w : pd.bj[j](level))
                    jobs.push_back({level, static_cast<int>(j + 1), w, Word()});
    }
    auto terms = detail::parallel_map<Term<T>>(jobs.size(), opt.threads, [&](std::size_t i) {
        const Job& jb = jobs[i];
        if (jb.kind == 0)
            return Term<T> {"P{" + jb.u.to_string() + "," + jb.v.to_string() + "}", std::nullopt, jb.level,
                gap_G(h0, half(jb.u), half(jb.v))};
        return Term<T> {"B" + std::to_string(jb.kind) + "{" + jb.u.to_string() + "}", std::nullopt, jb.level,
            gap_S(h0, half(pd.boundary[static_cast<std::size_t>(jb.kind)]), half(jb.u))};
    });

    IdentityReport<T> r;
    r.identity = "general";
    r.rhs = h0;
    r.modulus = Modulus::PiI;
    r.choices = {{"d0", pd.boundary[0].to_string()}, {"budget", std::to_string(budget)}};
    const bool finite = pd.last_level && *pd.last_level <= budget;
    if (finite) {
        r.truncation_bound = 0;
        r.kappa_source = "finite";
    } else {
        detail::require_cauchy(terms, budget, tol, "general sum");
        const auto cert = detail::certified_kappa(g);
        if (opt.kappa || cert) {
            r.kappa = opt.kappa ? T(*opt.kappa) : *cert;
            r.kappa_source = opt.kappa ? "override" : "certificate";
            r.truncation_bound = detail::fitted_tail(terms, budget, r.kappa);
        } else {
            r.kappa_source = "none";
            r.truncation_bound = std::numeric_limits<T>::infinity();
        }
    }
    return detail::finish(std::move(r), std::move(terms), opt);
}

// ---------------------------------------------------------------------------
// Gap endpoints on the axis of d_0

template <class T>
struct GapEndpoints {
    ExtendedPoint<T> z1, z2;
    Complex<T> gap;
    Word g1, g2;

    /// Endpoints on different components of (R u inf) \ {0, inf}.
    bool opposite_sides() const
    {
        if (z1.is_infinity() || z2.is_infinity())
            return true;
        return z1.value().real() * z2.value().real() < 0;
    }
};

/// Factorization d_0 = g1 g2 with g1 ~ w^-1 and g2 ~ w for w the Christoffel word of s, in
/// coordinates where Fix-(d_0) = 0 and Fix+(d_0) = inf. Returns Fix+(g1), Fix-(g2) and the
/// torus summand of s.
template <class T>
GapEndpoints<T> gap_endpoints(const MarkedSchottkyGroup<T>& g, const Slope& s)
{
    const Word d0 = Word::parse("BAba");
    const Word u = christoffel_word(s);
    std::vector<Word> cands;
    if (s.p() == 0)
        cands = {Word::parse("b"), Word::parse("B")};
    else if (s.is_infinity())
        cands = {Word::parse("a"), Word::parse("A")};
    else {
        const auto [l, r] = farey_parents(s);
        cands = {christoffel_word(l), christoffel_word(r)};
        cands.push_back(cands[0].inverse());
        cands.push_back(cands[1].inverse());
    }
    std::optional<std::pair<Word, Word>> factor;
    for (const Word& v : cands) {
        const Word x = v.inverse() * u.inverse() * v * u;
        if (auto c = conjugator_to(x, d0)) {
            factor.emplace(*c * v.inverse() * u.inverse() * v * c->inverse(), *c * u * c->inverse());
            break;
        }
    }
    if (!factor || factor->first * factor->second != d0)
        throw Error(ErrorKind::DegenerateFixedPoints, "identities", "no factorization of d0 for slope " + s.to_string());

    const Mat2<T> md0 = word_matrix(g, d0);
    const auto fd = fixed_points(md0);
    const Mat2<T> norm = map_zero_infinity_to(fd.repelling, fd.attracting).inverse();
    const Mat2<T> m1 = conjugate(word_matrix(g, factor->first), norm);
    const Mat2<T> m2 = conjugate(word_matrix(g, factor->second), norm);
    const Complex<T> nu = half_length(md0).value;
    const Complex<T> h = half_length(word_matrix(g, u)).value;
    return {fixed_points(m1).attracting, fixed_points(m2).repelling, gap_G(nu, h, h), factor->first, factor->second};
}

} // namespace schottky
