#pragma once

// Command-line front end; run() is separate from main so tests can drive it.

#include "schottky/schottky.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace schottky::cli {

using io::json;

enum Exit : int { Pass = 0, IdentityFail = 1, ConfigFail = 2, EngineFail = 3 };

struct RunConfig {
    std::string command;
    std::string group = "-";
    std::string target;
    std::string decomposition;
    long long max_sum = 40;
    double tol = 0; // 0 picks the per-command default
    std::string lift;
    std::string cls = "all";
    int quarter = 0;
    int threads = 1;
    std::string out;
    std::string csv;
    std::string precision = "double";
    std::string strategy = "maskit";
    std::size_t samples = 200;
    std::size_t word_length = 6;
    std::uint64_t seed = 1;
    std::vector<double> lengths;
};

/// Files are written only after a command has finished computing.
struct Artifacts {
    json report;
    std::string csv;
    int status = Pass;
};

inline double default_tol(const std::string& command)
{
    if (command == "verify-pants-trivial")
        return 1e-10;
    if (command == "verify-weierstrass" || command == "deform")
        return 1e-6;
    return 1e-8;
}

inline std::vector<bool> parse_lift(const std::string& s, int rank)
{
    std::vector<bool> signs;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok == "+" || tok == "0")
            signs.push_back(false);
        else if (tok == "-" || tok == "1")
            signs.push_back(true);
        else
            io::config_error("lift signs are +, -, 0 or 1; got '" + tok + "'");
    }
    if (static_cast<int>(signs.size()) != rank)
        io::config_error("--lift needs " + std::to_string(rank) + " signs");
    return signs;
}

inline std::string lift_string(const std::vector<bool>& signs)
{
    std::string s;
    for (std::size_t i = 0; i < signs.size(); ++i)
        s += std::string(i ? "," : "") + (signs[i] ? "-" : "+");
    return s;
}

template <class T>
struct Loaded {
    MarkedSchottkyGroup<T> group;
    std::vector<bool> lift;
};

// Reads the group, applies the lift and attaches a certificate when none was supplied.
template <class T>
Loaded<T> load(const RunConfig& c, bool certify = true)
{
    auto g = io::load_group<T>(c.group);
    std::vector<bool> signs(static_cast<std::size_t>(g.rank()), false);
    if (!c.lift.empty())
        signs = parse_lift(c.lift, g.rank());
    g = change_lift(g, signs);
    if (certify && !g.circles())
        if (auto cs = attempt_classical_certificate(g))
            g = g.with_circles(*cs);
    return {g, signs};
}

template <class T>
json with_header(const RunConfig& c, json body)
{
    body["schema"] = 1;
    body["command"] = c.command;
    body["precision"] = c.precision;
    body["threads"] = c.threads;
    return body;
}

template <class T>
json run_summary(const IdentityReport<T>& r, double tol)
{
    json j = io::report_json(r);
    j["tol"] = tol;
    j["pass"] = r.passed(T(tol));
    return j;
}

inline std::vector<WeierstrassClass> parse_classes(const std::string& s)
{
    if (s == "all")
        return {WeierstrassClass::OddOdd, WeierstrassClass::OddEven, WeierstrassClass::EvenOdd};
    if (s == "oddodd")
        return {WeierstrassClass::OddOdd};
    if (s == "oddeven")
        return {WeierstrassClass::OddEven};
    if (s == "evenodd")
        return {WeierstrassClass::EvenOdd};
    io::config_error("--class must be oddodd, oddeven, evenodd or all");
}

template <class T>
Artifacts cmd_verify_torus(const RunConfig& c, double tol)
{
    const auto l = load<T>(c);
    SumOptions opt;
    opt.threads = c.threads;
    auto r = torus_mcshane_sum(l.group, c.max_sum, T(tol), opt);
    r.choices.emplace_back("lift", lift_string(l.lift));
    json body {{"report", run_summary(r, tol)}};
    json imag = json::array();
    for (const auto& t : r.per_term)
        if (std::abs(t.value.imag()) > 1e-9)
            imag.push_back({{"slope", t.label}, {"term", io::complex_json(t.value)}});
    body["imaginary_terms"] = imag;
    return {body, io::terms_csv(r), r.passed(T(tol)) ? Pass : IdentityFail};
}

template <class T>
Artifacts cmd_verify_weierstrass(const RunConfig& c, double tol)
{
    const auto classes = parse_classes(c.cls);
    if (c.quarter != 0 && c.quarter != 1)
        io::config_error("--quarter must be 0 or 1");
    const auto l = load<T>(c);
    SumOptions opt;
    opt.threads = c.threads;
    json reports = json::array();
    std::string csv;
    bool pass = true;
    for (auto cls : classes) {
        auto r = weierstrass_sum(l.group, cls, c.max_sum, T(tol), c.quarter, opt);
        r.choices.emplace_back("lift", lift_string(l.lift));
        reports.push_back(run_summary(r, tol));
        pass = pass && r.passed(T(tol));
        const std::string part = io::terms_csv(r);
        csv += csv.empty() ? part : part.substr(part.find('\n') + 1);
    }
    return {{{"reports", reports}}, csv, pass ? Pass : IdentityFail};
}

template <class T>
Artifacts cmd_verify_markoff(const RunConfig& c, double tol)
{
    const auto l = load<T>(c);
    SumOptions opt;
    opt.threads = c.threads;
    auto r = markoff_sum(trace_triple(l.group), c.max_sum, T(tol), opt, detail::certified_kappa(l.group));
    r.choices.emplace_back("lift", lift_string(l.lift));
    return {{{"report", run_summary(r, tol)}}, io::terms_csv(r), r.passed(T(tol)) ? Pass : IdentityFail};
}

template <class T>
Artifacts cmd_verify_pants_trivial(const RunConfig& c, double tol)
{
    std::vector<std::array<Complex<T>, 3>> triples;
    if (!c.lengths.empty()) {
        if (c.lengths.size() != 3)
            io::config_error("--lengths takes three values");
        triples.push_back({Complex<T>(T(c.lengths[0])), Complex<T>(T(c.lengths[1])), Complex<T>(T(c.lengths[2]))});
    } else {
        std::mt19937_64 rng(c.seed);
        std::uniform_real_distribution<double> len(0.1, 8.0), theta(0.0, 1.0);
        for (int i = 0; i < 100; ++i)
            triples.push_back({Complex<T>(T(len(rng))), Complex<T>(T(len(rng))), Complex<T>(T(len(rng)))});
        for (int i = 0; i < 20; ++i) {
            // theta in (0, pi]
            const T th = pi<T> * T(1.0 - theta(rng));
            std::array<Complex<T>, 3> t {Complex<T>(T(len(rng))), Complex<T>(T(len(rng))), Complex<T>(T(len(rng)))};
            t[static_cast<std::size_t>(i % 3)] = Complex<T>(0, th);
            triples.push_back(t);
        }
    }
    std::string csv = io::csv_row({"l0_re", "l0_im", "l1_re", "l1_im", "l2_re", "l2_im", "residual"});
    T worst = 0;
    for (const auto& t : triples) {
        const auto r = pants_trivial_identity(t[0], t[1], t[2]);
        worst = std::max(worst, r.residual);
        csv += io::csv_row({io::fmt17(t[0].real()), io::fmt17(t[0].imag()), io::fmt17(t[1].real()),
            io::fmt17(t[1].imag()), io::fmt17(t[2].real()), io::fmt17(t[2].imag()), io::fmt17(r.residual)});
    }
    json body {{"triples", triples.size()}, {"max_residual", static_cast<double>(worst)}, {"tol", tol},
        {"pass", worst <= T(tol)}, {"seed", c.seed}};
    return {body, csv, worst <= T(tol) ? Pass : IdentityFail};
}

template <class T>
Artifacts cmd_verify_general(const RunConfig& c, double tol)
{
    if (c.decomposition.empty())
        io::config_error("verify-general needs --decomposition FILE");
    const auto pd = io::decomposition_from<T>(io::parse_json_text(io::read_source(c.decomposition), c.decomposition));
    const auto l = load<T>(c);
    SumOptions opt;
    opt.threads = c.threads;
    auto r = general_mcshane_sum(l.group, pd, c.max_sum, T(tol), opt);
    r.choices.emplace_back("lift", lift_string(l.lift));
    return {{{"report", run_summary(r, tol)}}, io::terms_csv(r), r.passed(T(tol)) ? Pass : IdentityFail};
}

template <class T>
Artifacts cmd_certify(const RunConfig& c, double)
{
    const auto l = load<T>(c, false);
    const auto cs = l.group.circles() ? l.group.circles() : attempt_classical_certificate(l.group);
    json body {{"certified", cs.has_value()}};
    if (cs) {
        body["kappa"] = static_cast<double>(kappa(*cs));
        body["group"] = io::group_json(l.group.with_circles(*cs));
    } else {
        body["note"] = "no circle system found; this does not show the group is non-classical";
    }
    return {body, "", cs ? Pass : IdentityFail};
}

template <class T>
Artifacts cmd_deform(const RunConfig& c, double tol)
{
    if (c.target.empty())
        io::config_error("deform needs --target FILE");
    PathStrategy strategy = PathStrategy::Maskit;
    if (c.strategy == "direct")
        strategy = PathStrategy::Direct;
    else if (c.strategy != "maskit")
        io::config_error("--strategy must be maskit or direct");
    const auto g0 = load<T>(c, false).group;
    RunConfig ct = c;
    ct.group = c.target;
    ct.lift.clear();
    const auto g1 = load<T>(ct, false).group;

    const auto path = path_between(g0, g1, strategy, c.samples);
    const auto words = tracked_words(g0.rank(), c.word_length);
    const auto fwd = continue_half_lengths(path, words, c.samples, static_cast<const BranchState<T>*>(nullptr), !c.csv.empty());
    const auto back = continue_half_lengths(path.reversed(), words, c.samples, &fwd.state);
    const auto base = continue_half_lengths(DeformationPath<T>({path.waypoints().front()}), words, 1);
    T round_trip = 0;
    for (const auto& w : words)
        round_trip = std::max(round_trip, std::abs(back.state.at(w).continued() - base.state.at(w).continued()));

    json kappas = json::array();
    for (const auto& k : certify_waypoints(path))
        kappas.push_back(k ? json(static_cast<double>(*k)) : json(nullptr));
    json positivity = json::object();
    positivity["min_re"] = static_cast<double>(fwd.min_re);
    positivity["word"] = fwd.min_word.to_string();
    positivity["sample"] = fwd.min_sample;
    positivity["steps"] = fwd.steps;
    positivity["words"] = words.size();
    json body = json::object();
    body["path"] = io::path_json(path);
    body["waypoint_kappa"] = kappas;
    body["positivity"] = positivity;
    body["round_trip_error"] = static_cast<double>(round_trip);
    bool pass = fwd.min_re > 0 && round_trip < T(1e-9);
    if (g1.rank() == 2) {
        auto end = path.group_at(T(1));
        if (auto cs = attempt_classical_certificate(end))
            end = end.with_circles(*cs);
        SumOptions opt;
        opt.threads = c.threads;
        const auto r = torus_mcshane_sum(end, c.max_sum, T(tol), opt);
        body["endpoint"] = run_summary(r, tol);
        pass = pass && r.passed(T(tol));
    }
    std::string csv;
    if (!c.csv.empty()) {
        csv = io::csv_row({"t", "word", "re", "im"});
        for (const auto& [t, vals] : fwd.samples)
            for (std::size_t i = 0; i < words.size(); ++i)
                csv += io::csv_row(std::vector<std::string> {
                    io::fmt17(t), words[i].to_string(), io::fmt17(vals[i].real()), io::fmt17(vals[i].imag())});
    }
    return {body, csv, pass ? Pass : IdentityFail};
}

template <class T>
Artifacts cmd_emit_gaps(const RunConfig& c, double)
{
    const auto l = load<T>(c, false);
    std::string csv = io::csv_row({"p", "q", "class", "g1", "g2", "z1_re", "z1_im", "z2_re", "z2_im", "center",
        "radius", "gap_re", "gap_im", "side"});
    std::size_t opposite = 0, rows = 0;
    for (const auto& s : signed_slopes_up_to(c.max_sum)) {
        const auto e = gap_endpoints(l.group, s);
        auto part = [](const ExtendedPoint<T>& z, bool im) {
            return z.is_infinity() ? std::string("inf") : io::fmt17(im ? z.value().imag() : z.value().real());
        };
        std::string center, radius;
        if (!e.z1.is_infinity() && !e.z2.is_infinity()) {
            center = io::fmt17((e.z1.value().real() + e.z2.value().real()) / 2);
            radius = io::fmt17(std::abs(e.z1.value().real() - e.z2.value().real()) / 2);
        }
        opposite += e.opposite_sides();
        ++rows;
        csv += io::csv_row({std::to_string(s.p()), std::to_string(s.q()), to_string(weierstrass_class(s)),
            e.g1.to_string(), e.g2.to_string(), part(e.z1, false), part(e.z1, true), part(e.z2, false),
            part(e.z2, true), center, radius, io::fmt17(e.gap.real()), io::fmt17(e.gap.imag()),
            e.opposite_sides() ? "opposite" : "same"});
    }
    return {{{"slopes", rows}, {"opposite_side", opposite}}, csv, Pass};
}

template <class T>
Artifacts cmd_emit_traces(const RunConfig& c, double)
{
    const auto l = load<T>(c, false);
    const auto t = trace_triple(l.group);
    return {{{"triple", {io::complex_json(t.x), io::complex_json(t.y), io::complex_json(t.z)}},
                {"commutator_trace", io::complex_json(commutator_trace(t))}},
        io::traces_csv(t, c.max_sum), Pass};
}

template <class T>
Artifacts dispatch(const RunConfig& c, double tol)
{
    if (c.command == "verify-torus")
        return cmd_verify_torus<T>(c, tol);
    if (c.command == "verify-weierstrass")
        return cmd_verify_weierstrass<T>(c, tol);
    if (c.command == "verify-markoff")
        return cmd_verify_markoff<T>(c, tol);
    if (c.command == "verify-pants-trivial")
        return cmd_verify_pants_trivial<T>(c, tol);
    if (c.command == "verify-general")
        return cmd_verify_general<T>(c, tol);
    if (c.command == "certify")
        return cmd_certify<T>(c, tol);
    if (c.command == "deform")
        return cmd_deform<T>(c, tol);
    if (c.command == "emit-gaps")
        return cmd_emit_gaps<T>(c, tol);
    if (c.command == "emit-traces")
        return cmd_emit_traces<T>(c, tol);
    io::config_error("unknown command " + c.command);
}

inline json error_json(const std::string& kind, const std::string& module, const std::string& message)
{
    return {{"schema", 1}, {"error", {{"kind", kind}, {"module", module}, {"message", message}}}};
}

inline void write_file(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error(ErrorKind::ConfigError, "cli", "cannot write " + path);
    f << text;
}

inline int execute(const RunConfig& c, std::ostream& out, std::ostream& err)
{
    try {
        if (c.max_sum < 2)
            io::config_error("--max-sum must be >= 2");
        if (c.tol < 0)
            io::config_error("--tol must be > 0");
        if (c.threads < 1)
            io::config_error("--threads must be >= 1");
        if (c.precision != "double" && c.precision != "extended")
            io::config_error("--precision must be double or extended");
        const double tol = c.tol > 0 ? c.tol : default_tol(c.command);
        Artifacts a = c.precision == "extended" ? dispatch<long double>(c, tol) : dispatch<double>(c, tol);
        const bool emits = c.command.rfind("emit-", 0) == 0;
        const std::string report = with_header<double>(c, a.report).dump(2) + "\n";
        if (!c.csv.empty())
            write_file(c.csv, a.csv);
        else if (emits)
            out << a.csv;
        if (!c.out.empty())
            write_file(c.out, report);
        else if (!emits)
            out << report;
        return a.status;
    } catch (const Error& e) {
        err << error_json(std::string(to_string(e.kind())), std::string(e.module()), e.what()).dump() << "\n";
        return e.kind() == ErrorKind::ConfigError ? ConfigFail : EngineFail;
    } catch (const std::exception& e) {
        err << error_json("InternalError", "cli", e.what()).dump() << "\n";
        return EngineFail;
    }
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app {"Schottky groups, circle certificates and McShane-type identities"};
    app.require_subcommand(1);
    RunConfig c;

    struct Spec {
        const char* name;
        const char* help;
    };
    const Spec specs[] = {
        {"verify-torus", "one-holed torus series over all slopes, mod 2 pi i"},
        {"verify-weierstrass", "Weierstrass class sums, pi/2 mod pi"},
        {"verify-pants-trivial", "three-term pair of pants identity (random sweep or --lengths)"},
        {"verify-markoff", "trace form of the torus series"},
        {"verify-general", "series from a decomposition file, mod pi i"},
        {"certify", "search for a pairing circle system and report kappa"},
        {"deform", "path to --target, positivity of continued lengths, endpoint identity"},
        {"emit-gaps", "gap endpoints on the axis of the commutator (CSV)"},
        {"emit-traces", "slope traces and lengths (CSV)"},
    };
    for (const auto& s : specs) {
        auto* sub = app.add_subcommand(s.name, s.help);
        sub->add_option("--group", c.group, "group JSON file, - for stdin");
        sub->add_option("--max-sum", c.max_sum, "largest |p| + q, or the stream budget");
        sub->add_option("--tol", c.tol, "pass threshold on the residual");
        sub->add_option("--lift", c.lift, "sign per generator, e.g. +,-");
        sub->add_option("--threads", c.threads, "summation workers");
        sub->add_option("--out", c.out, "report JSON file");
        sub->add_option("--csv", c.csv, "CSV file");
        sub->add_option("--precision", c.precision, "double or extended");
        const std::string name = s.name;
        if (name == "verify-weierstrass") {
            sub->add_option("--class", c.cls, "oddodd, oddeven, evenodd or all");
            sub->add_option("--quarter", c.quarter, "quarter length choice 0 or 1");
        }
        if (name == "verify-pants-trivial") {
            sub->add_option("--lengths", c.lengths, "l0 l1 l2")->expected(3);
            sub->add_option("--seed", c.seed, "sweep seed");
        }
        if (name == "verify-general")
            sub->add_option("--decomposition", c.decomposition, "decomposition JSON file");
        if (name == "deform") {
            sub->add_option("--target", c.target, "target group JSON file");
            sub->add_option("--strategy", c.strategy, "maskit or direct");
            sub->add_option("--samples", c.samples, "path samples");
            sub->add_option("--word-length", c.word_length, "track cyclically reduced words up to this length");
        }
        sub->callback([&c, name] { c.command = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Pass;
    } catch (const CLI::ParseError& e) {
        err << error_json("ConfigError", "cli", e.what()).dump() << "\n";
        return ConfigFail;
    }
    return execute(c, out, err);
}

} // namespace schottky::cli
