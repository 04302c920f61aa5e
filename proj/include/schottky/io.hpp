#pragma once

// JSON for groups, paths, decompositions and reports; CSV helpers.

#include "continuation.hpp"
#include "identities.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace schottky::io {

using nlohmann::json;

[[noreturn]] inline void config_error(const std::string& what)
{
    throw Error(ErrorKind::ConfigError, "io", what);
}

// ---------------------------------------------------------------------------
// Scalars

template <class T>
json complex_json(Complex<T> z)
{
    return json::array({static_cast<double>(z.real()), static_cast<double>(z.imag())});
}

template <class T>
Complex<T> complex_from(const json& j)
{
    if (j.is_number())
        return {T(j.get<double>()), T(0)};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        config_error("expected a number or [re, im], got " + j.dump());
    return {T(j[0].get<double>()), T(j[1].get<double>())};
}

/// Non-finite reals (an unavailable bound) serialize as null.
template <class T>
json real_json(T x)
{
    if (!std::isfinite(static_cast<double>(x)))
        return nullptr;
    return static_cast<double>(x);
}

template <class T>
json point_json(const ExtendedPoint<T>& p)
{
    if (p.is_infinity())
        return "inf";
    return complex_json(p.value());
}

template <class T>
ExtendedPoint<T> point_from(const json& j)
{
    if (j.is_string()) {
        if (j.get<std::string>() != "inf")
            config_error("fixed point string must be \"inf\"");
        return ExtendedPoint<T>::infinity();
    }
    return ExtendedPoint<T>(complex_from<T>(j));
}

template <class T>
json matrix_json(const Mat2<T>& m)
{
    return json::array({complex_json(m.a()), complex_json(m.b()), complex_json(m.c()), complex_json(m.d())});
}

template <class T>
Mat2<T> matrix_from(const json& j)
{
    if (!j.is_array() || j.size() != 4)
        config_error("matrix must be four complex entries [a, b, c, d]");
    return Mat2<T>(complex_from<T>(j[0]), complex_from<T>(j[1]), complex_from<T>(j[2]), complex_from<T>(j[3]));
}

// ---------------------------------------------------------------------------
// Groups

template <class T>
json circle_json(const Circle<T>& c)
{
    return {{"center", complex_json(c.center)}, {"radius", static_cast<double>(c.radius)}};
}

template <class T>
Circle<T> circle_from(const json& j)
{
    if (!j.is_object() || !j.contains("center") || !j.contains("radius") || !j["radius"].is_number())
        config_error("circle needs center and radius");
    return Circle<T>(complex_from<T>(j["center"]), T(j["radius"].get<double>()));
}

template <class T>
json circles_json(const CircleSystem<T>& cs)
{
    json pairs = json::array();
    for (const auto& p : cs.pairs)
        pairs.push_back({{"inner", circle_json(p.inner)}, {"outer", circle_json(p.outer)}});
    return {{"frame", matrix_json(cs.frame)}, {"pairs", pairs}};
}

template <class T>
CircleSystem<T> circles_from(const json& j)
{
    if (!j.is_object() || !j.contains("pairs") || !j["pairs"].is_array())
        config_error("circles need a pairs array");
    CircleSystem<T> cs;
    if (j.contains("frame"))
        cs.frame = matrix_from<T>(j["frame"]);
    for (const auto& p : j["pairs"]) {
        if (!p.contains("inner") || !p.contains("outer"))
            config_error("circle pair needs inner and outer");
        cs.pairs.push_back({circle_from<T>(p["inner"]), circle_from<T>(p["outer"])});
    }
    return cs;
}

template <class T>
json parameters_json(const SchottkyParameters<T>& p)
{
    json fps = json::array(), ls = json::array();
    for (const auto& z : p.fixed_points)
        fps.push_back(point_json(z));
    for (const auto& l : p.lengths)
        ls.push_back(complex_json(l.value));
    return {{"fixed_points", fps}, {"lengths", ls}};
}

template <class T>
SchottkyParameters<T> parameters_from(const json& j)
{
    if (!j.is_object() || !j.contains("fixed_points") || !j.contains("lengths") || !j["fixed_points"].is_array()
        || !j["lengths"].is_array())
        config_error("parameters need fixed_points and lengths arrays");
    SchottkyParameters<T> p;
    for (const auto& z : j["fixed_points"])
        p.fixed_points.push_back(point_from<T>(z));
    for (const auto& l : j["lengths"]) {
        const Complex<T> v = complex_from<T>(l);
        if (!(v.real() > 0))
            config_error("lengths need positive real part");
        p.lengths.emplace_back(v);
    }
    if (p.lengths.size() < 2 || p.fixed_points.size() != 2 * p.lengths.size() - 3)
        config_error("parameters need n >= 2 lengths and 2n-3 fixed points");
    return p;
}

/// Group document. Exactly one source: "generators" (with "rank"), "parameters",
/// "torus" ([x, y, z] trace triple) or "pants" ([l0, l1, l2] boundary lengths).
/// Optional "circles" attaches a circle system, which must verify.
template <class T>
MarkedSchottkyGroup<T> group_from(const json& j)
{
    if (!j.is_object())
        config_error("group document must be an object");
    const int sources = int(j.contains("generators")) + int(j.contains("parameters")) + int(j.contains("torus"))
        + int(j.contains("pants"));
    if (sources != 1)
        config_error("group document needs exactly one of generators, parameters, torus, pants");
    auto triple = [&](const char* key) {
        const json& a = j[key];
        if (!a.is_array() || a.size() != 3 || !a[0].is_number() || !a[1].is_number() || !a[2].is_number())
            config_error(std::string(key) + " needs three real numbers");
        return std::array<T, 3> {T(a[0].get<double>()), T(a[1].get<double>()), T(a[2].get<double>())};
    };
    std::optional<MarkedSchottkyGroup<T>> g;
    if (j.contains("generators")) {
        const json& gs = j["generators"];
        if (!gs.is_array())
            config_error("generators must be an array");
        if (j.contains("rank") && (!j["rank"].is_number_integer() || j["rank"].get<std::size_t>() != gs.size()))
            config_error("rank does not match the number of generators");
        std::vector<Mat2<T>> mats;
        for (const auto& m : gs)
            mats.push_back(matrix_from<T>(m));
        g.emplace(std::move(mats));
    } else if (j.contains("parameters")) {
        g.emplace(from_parameters(parameters_from<T>(j["parameters"])));
    } else if (j.contains("torus")) {
        const auto t = triple("torus");
        g.emplace(torus_fuchsian_marking(t[0], t[1], t[2]).without_circles());
    } else {
        const auto t = triple("pants");
        if (!(t[0] > 0 && t[1] > 0 && t[2] > 0))
            config_error("pants lengths must be positive");
        g.emplace(pants_fuchsian_marking(t[0], t[1], t[2]).without_circles());
    }
    if (j.contains("circles")) {
        auto cs = circles_from<T>(j["circles"]);
        const auto cert = verify_circle_pairing(*g, cs, T(1e-9));
        if (!cert.pass)
            config_error(std::string("supplied circles fail the pairing check: ") + to_string(cert.failed));
        return g->with_circles(std::move(cs));
    }
    return *g;
}

template <class T>
json group_json(const MarkedSchottkyGroup<T>& g)
{
    json gens = json::array();
    for (const auto& m : g.generators())
        gens.push_back(matrix_json(m));
    json j {{"rank", g.rank()}, {"generators", gens}};
    if (g.circles())
        j["circles"] = circles_json(*g.circles());
    return j;
}

inline json parse_json_text(const std::string& text, const std::string& where)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        config_error("malformed JSON in " + where + ": " + e.what());
    }
}

/// Reads a file, or standard input for "-".
inline std::string read_source(const std::string& path)
{
    std::stringstream ss;
    if (path == "-") {
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path);
    if (!in)
        config_error("cannot open " + path);
    ss << in.rdbuf();
    return ss.str();
}

template <class T>
MarkedSchottkyGroup<T> load_group(const std::string& path)
{
    return group_from<T>(parse_json_text(read_source(path), path));
}

// ---------------------------------------------------------------------------
// Paths and decompositions

template <class T>
DeformationPath<T> path_from(const json& j)
{
    if (!j.is_array() || j.empty())
        config_error("path file must be a non-empty array of parameter objects");
    std::vector<SchottkyParameters<T>> pts;
    for (const auto& p : j)
        pts.push_back(parameters_from<T>(p));
    return DeformationPath<T>(std::move(pts));
}

template <class T>
json path_json(const DeformationPath<T>& p)
{
    json j = json::array();
    for (const auto& w : p.waypoints())
        j.push_back(parameters_json(w));
    return j;
}

inline Word word_from(const json& j)
{
    if (!j.is_string())
        config_error("word must be a string such as \"aB\"");
    try {
        return Word::parse(j.get<std::string>());
    } catch (const Error& e) {
        config_error(e.what());
    }
}

/// {"builtin": "torus" | "pants"} or explicit finite lists:
/// {"boundary": ["a", ...], "pairs": [[level, "u", "v"], ...], "bj": [[[level, "w"], ...], ...]}.
template <class T>
PantsDecomposition<T> decomposition_from(const json& j)
{
    if (!j.is_object())
        config_error("decomposition must be an object");
    if (j.contains("builtin")) {
        const std::string b = j["builtin"].is_string() ? j["builtin"].get<std::string>() : "";
        if (b == "torus")
            return torus_decomposition<T>();
        if (b == "pants")
            return pants_own_decomposition<T>();
        config_error("unknown builtin decomposition '" + b + "'");
    }
    if (!j.contains("boundary") || !j["boundary"].is_array() || j["boundary"].empty())
        config_error("decomposition needs a non-empty boundary array");
    auto level_of = [](const json& e) {
        if (!e.is_array() || e.empty() || !e[0].is_number_integer() || e[0].get<long long>() < 1)
            config_error("stream entries start with a level >= 1");
        return e[0].get<long long>();
    };
    PantsDecomposition<T> pd;
    long long last = 0;
    for (const auto& w : j["boundary"])
        pd.boundary.push_back(word_from(w));
    std::vector<std::pair<long long, std::pair<Word, Word>>> pairs;
    if (j.contains("pairs")) {
        for (const auto& e : j["pairs"]) {
            if (e.size() != 3)
                config_error("pair entries are [level, u, v]");
            pairs.push_back({level_of(e), {word_from(e[1]), word_from(e[2])}});
            last = std::max(last, pairs.back().first);
        }
    }
    pd.pairs = [pairs](long long level) {
        std::vector<std::pair<Word, Word>> out;
        for (const auto& [l, p] : pairs)
            if (l == level)
                out.push_back(p);
        return out;
    };
    if (j.contains("bj")) {
        for (const auto& stream : j["bj"]) {
            std::vector<std::pair<long long, Word>> items;
            for (const auto& e : stream) {
                if (e.size() != 2)
                    config_error("B_j entries are [level, w]");
                items.push_back({level_of(e), word_from(e[1])});
                last = std::max(last, items.back().first);
            }
            pd.bj.push_back([items](long long level) {
                std::vector<Word> out;
                for (const auto& [l, w] : items)
                    if (l == level)
                        out.push_back(w);
                return out;
            });
        }
    }
    if (pd.bj.size() + 1 > pd.boundary.size())
        config_error("more B_j streams than boundary words d_1..d_m");
    pd.last_level = last;
    return pd;
}

// ---------------------------------------------------------------------------
// Reports

template <class T>
json report_json(const IdentityReport<T>& r)
{
    json choices = json::object();
    for (const auto& [k, v] : r.choices)
        choices[k] = v;
    return {
        {"identity", r.identity},
        {"lhs", complex_json(r.lhs)},
        {"rhs", complex_json(r.rhs)},
        {"modulus", to_string(r.modulus)},
        {"defect_k", r.defect_k},
        {"residual", real_json(r.residual)},
        {"terms_used", r.terms_used},
        {"truncation_bound", real_json(r.truncation_bound)},
        {"kappa", real_json(r.kappa)},
        {"kappa_source", r.kappa_source},
        {"choices", choices},
    };
}

// ---------------------------------------------------------------------------
// CSV

template <class T>
std::string fmt17(T x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(x));
    return buf;
}

/// RFC 4180 quoting when the field needs it.
inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string csv_row(const std::vector<std::string>& fields)
{
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            line += ',';
        line += csv_field(fields[i]);
    }
    return line + "\r\n";
}

template <class T>
std::string terms_csv(const IdentityReport<T>& r)
{
    std::string out = csv_row({"p", "q", "class", "label", "term_re", "term_im"});
    for (const auto& t : r.per_term) {
        const bool s = t.slope.has_value();
        out += csv_row({s ? std::to_string(t.slope->p()) : "", s ? std::to_string(t.slope->q()) : "",
            s ? to_string(weierstrass_class(*t.slope)) : "", t.label, fmt17(t.value.real()), fmt17(t.value.imag())});
    }
    return out;
}

/// Columns p, q, class, trace and complex length (re, im).
template <class T>
std::string traces_csv(const TraceTriple<T>& t, long long max_sum)
{
    std::string out = csv_row({"p", "q", "class", "trace_re", "trace_im", "length_re", "length_im"});
    for (const auto& st : slope_traces(t, max_sum)) {
        const auto l = complex_length_from_trace(st.trace).value;
        out += csv_row({std::to_string(st.slope.p()), std::to_string(st.slope.q()),
            to_string(weierstrass_class(st.slope)), fmt17(st.trace.real()), fmt17(st.trace.imag()), fmt17(l.real()),
            fmt17(l.imag())});
    }
    return out;
}

} // namespace schottky::io
