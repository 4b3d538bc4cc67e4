#include "polymax/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <regex>
#include <sstream>

#include "polymax/corpus.hpp"
#include "polymax/cz.hpp"
#include "polymax/maximal.hpp"
#include "polymax/newton.hpp"
#include "polymax/oscillatory.hpp"
#include "polymax/svg.hpp"

namespace polymax {

namespace fs = std::filesystem;

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys{
        {"poly", "", "polynomial text in t1..tn"},
        {"n", "0", "number of variables; 0 takes the largest index in poly"},
        {"suite", "all", "comma separated suites or all"},
        {"qmax", "16", "largest index component for the partition suite"},
        {"seed", "1", "seed for random corpora"},
        {"out", "out", "output directory"},
        {"grid.lo", "-8", "left end of the x grid"},
        {"grid.hi", "8", "right end of the x grid"},
        {"grid.dx", "0.0009765625", "grid step"},
        {"quadrature.min_nodes", "16", "least nodes per axis of t quadratures"},
        {"quadrature.max_nodes", "1024", "most nodes per axis of t quadratures"},
        {"alpha.points", "64", "points of the alpha grid"},
        {"alpha.lo", "0.001", "smallest alpha as a fraction of sup Op f"},
        {"alpha.hi", "1.5", "largest alpha as a fraction of sup Op f"},
        {"maximal.h_grid", "6", "continuous radii 2^{-i/2}, i = 0..2 h_grid; dyadic q_max"},
        {"maximal.functions", "4", "corpus functions for the maximal suite"},
        {"monomial.h_grid", "6", "continuous radii for the monomial suite"},
        {"monomial.functions", "10", "corpus functions for the monomial suite"},
        {"monomial.tolerance", "0.05", "relative tolerance of the domination check"},
        {"cz.cases", "200", "random (f, lambda) cases"},
        {"oscillatory.n_min", "2", "first slice depth"},
        {"oscillatory.n_max", "8", "last slice depth"},
        {"oscillatory.theta", "0.25", "exponent of the gradient level of zero-coordinate families"},
        {"oscillatory.kbar_max", "4", "largest diagonal offset searched for k0"},
        {"weaktype.corpus", "20", "functions in the weak-type corpus"},
        {"weaktype.qmax", "0", "largest index component of slice pieces; 0 picks by dimension"},
        {"weaktype.h_grid", "4", "continuous radii for the weak-type sweep"},
        {"weaktype.stability", "0.2", "relative stability margin"},
    };
    return keys;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"diagram", "partition", "monomial", "maximal", "cz", "oscillatory", "weaktype"};
    return names;
}

namespace {

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool known_key(const std::string& k) {
    const auto& keys = config_keys();
    return std::any_of(keys.begin(), keys.end(), [&](const ConfigKey& c) { return c.name == k; });
}

template <typename T>
T parse_number(const std::map<std::string, std::string>& v, const std::string& key) {
    const std::string& text = v.at(key);
    std::istringstream is(text);
    T x{};
    is >> x;
    if (is.fail() || !(is >> std::ws).eof()) throw ConfigError("key " + key + ": not a number: '" + text + "'");
    return x;
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

}  // namespace

std::map<std::string, std::string> read_config(std::istream& in) {
    std::map<std::string, std::string> out;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            require(line.back() == ']' && line.size() > 2, "line " + std::to_string(lineno) + ": bad section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        require(eq != std::string::npos, "line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        if (!section.empty()) key = section + "." + key;
        require(known_key(key), "line " + std::to_string(lineno) + ": unknown key " + key);
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path);
    return read_config(in);
}

GridSpec ExperimentConfig::grid() const { return make_grid(grid_lo, grid_hi, dx); }

NodePolicy ExperimentConfig::policy() const {
    NodePolicy p;
    p.min_nodes = min_nodes;
    p.max_nodes = max_nodes;
    return p;
}

ExperimentConfig make_config(const std::map<std::string, std::string>& given) {
    std::map<std::string, std::string> v;
    for (const auto& k : config_keys()) v[k.name] = k.default_value;
    for (const auto& [k, x] : given) {
        require(known_key(k), "unknown key " + k);
        v[k] = x;
    }
    ExperimentConfig c;
    c.poly = v["poly"];
    require(!trim(c.poly).empty(), "poly is required");
    c.n = parse_number<int>(v, "n");
    if (c.n == 0) {
        std::regex var("t([0-9]+)");
        for (auto it = std::sregex_iterator(c.poly.begin(), c.poly.end(), var); it != std::sregex_iterator(); ++it)
            c.n = std::max(c.n, std::stoi((*it)[1]));
    }
    require(c.n >= 1 && c.n <= 4, "n must be between 1 and 4");
    v["n"] = std::to_string(c.n);
    try {
        parse_polynomial(c.poly, c.n);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("poly: ") + e.what());
    }

    std::string list = v["suite"];
    std::stringstream ss(list);
    std::string item;
    std::vector<std::string> wanted;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) wanted.push_back(item);
    }
    require(!wanted.empty(), "no suite given");
    for (const auto& w : wanted) {
        if (w == "all") {
            c.all = true;
            continue;
        }
        require(std::find(suite_names().begin(), suite_names().end(), w) != suite_names().end(), "unknown suite " + w);
    }
    for (const auto& s : suite_names())
        if (c.all || std::find(wanted.begin(), wanted.end(), s) != wanted.end()) c.suites.push_back(s);

    c.q_max = parse_number<int>(v, "qmax");
    c.seed = parse_number<std::uint64_t>(v, "seed");
    c.out = v["out"];
    c.grid_lo = parse_number<double>(v, "grid.lo");
    c.grid_hi = parse_number<double>(v, "grid.hi");
    c.dx = parse_number<double>(v, "grid.dx");
    c.min_nodes = parse_number<int>(v, "quadrature.min_nodes");
    c.max_nodes = parse_number<int>(v, "quadrature.max_nodes");
    c.alpha.points = parse_number<int>(v, "alpha.points");
    c.alpha.lo = parse_number<double>(v, "alpha.lo");
    c.alpha.hi = parse_number<double>(v, "alpha.hi");
    c.maximal_h_grid = parse_number<int>(v, "maximal.h_grid");
    c.maximal_functions = parse_number<int>(v, "maximal.functions");
    c.monomial_h_grid = parse_number<int>(v, "monomial.h_grid");
    c.monomial_functions = parse_number<int>(v, "monomial.functions");
    c.monomial_tolerance = parse_number<double>(v, "monomial.tolerance");
    c.cz_cases = parse_number<int>(v, "cz.cases");
    c.n_min = parse_number<std::int64_t>(v, "oscillatory.n_min");
    c.n_max = parse_number<std::int64_t>(v, "oscillatory.n_max");
    c.theta = parse_number<double>(v, "oscillatory.theta");
    c.kbar_max = parse_number<int>(v, "oscillatory.kbar_max");
    c.weak_corpus = parse_number<int>(v, "weaktype.corpus");
    c.weak_q_max = parse_number<int>(v, "weaktype.qmax");
    c.weak_h_grid = parse_number<int>(v, "weaktype.h_grid");
    c.weak_stability = parse_number<double>(v, "weaktype.stability");

    require(!c.out.empty(), "out must be nonempty");
    require(c.q_max >= 1, "qmax must be positive");
    require(c.grid_hi > c.grid_lo, "grid.hi must exceed grid.lo");
    require(c.dx > 0 && (c.grid_hi - c.grid_lo) / c.dx <= double(1 << 24), "grid.dx must be positive with at most 2^24 cells");
    require(c.min_nodes >= 1 && c.max_nodes >= c.min_nodes, "quadrature node counts must be positive and ordered");
    require(c.alpha.points >= 2 && c.alpha.lo > 0 && c.alpha.hi > c.alpha.lo, "alpha grid must have two points and 0 < lo < hi");
    require(c.maximal_h_grid >= 1 && c.maximal_functions >= 1, "maximal keys must be positive");
    require(c.monomial_h_grid >= 1 && c.monomial_functions >= 1 && c.monomial_tolerance > 0, "monomial keys must be positive");
    require(c.cz_cases >= 1, "cz.cases must be positive");
    require(c.n_min >= 1 && c.n_max >= c.n_min, "oscillatory depths must satisfy 1 <= n_min <= n_max");
    require(c.n_max - c.n_min >= 2, "oscillatory depth range needs three depths");
    require(c.theta > 0 && c.kbar_max >= 0, "theta must be positive");
    require(c.weak_corpus >= 2 && c.weak_q_max >= 0 && c.weak_h_grid >= 1 && c.weak_stability > 0, "weaktype keys must be positive");
    if (std::find(c.suites.begin(), c.suites.end(), "cz") != c.suites.end()) {
        int e = 0;
        require(std::frexp(c.dx, &e) == 0.5 && std::fmod(c.grid_lo / c.dx, 1.0) == 0.0,
                "the cz suite needs grid.dx a power of two and grid.lo a multiple of it");
    }
    c.values = v;
    return c;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Writer {
    std::string dir;
    SuiteOutcome* outcome;

    std::ofstream open(const std::string& name) {
        std::ofstream os(fs::path(dir) / name);
        if (!os) throw ConfigError("cannot write " + (fs::path(dir) / name).string());
        os << std::setprecision(12);
        outcome->files.push_back(name);
        return os;
    }
    void svg(const std::string& name, const PlotSpec& spec, const std::vector<PlotSeries>& series) {
        auto os = open(name);
        os << line_plot(spec, series);
    }
};

void violation(SuiteOutcome& o, const std::string& msg) {
    o.passed = false;
    o.violations.push_back(msg);
}

std::string normals_text(const std::vector<IntVec>& normals) {
    std::string s;
    for (std::size_t i = 0; i < normals.size(); ++i) {
        if (i) s += '|';
        for (std::size_t k = 0; k < normals[i].size(); ++k) s += (k ? " " : "") + std::to_string(normals[i][k]);
    }
    return s;
}

void diagram_suite(const ExperimentConfig& cfg, SuiteOutcome& o, Writer& w) {
    auto p = parse_polynomial(cfg.poly, cfg.n);
    auto d = build_diagram(p);
    o.measured = to_json(d);
    if (d.vertices.empty()) violation(o, "no vertices");
    auto csv = w.open("diagram.csv");
    csv << "vertex,exponent,d,beta,zero_coordinates,degenerate,normals\n";
    for (std::size_t j = 0; j < d.vertices.size(); ++j) {
        const auto& v = d.vertices[j];
        const std::string tag = "vertex " + std::to_string(j) + " " + exponent_string(v.vertex);
        if (v.d <= 0) violation(o, tag + ": nonpositive lattice denominator");
        if (static_cast<int>(v.normals.size()) != d.n) violation(o, tag + ": normal count differs from n");
        if (v.beta && !(*v.beta > 0)) violation(o, tag + ": beta not positive");
        bool positive = std::all_of(v.witness.begin(), v.witness.end(), [](std::int64_t x) { return x > 0; });
        if (!positive) violation(o, tag + ": witness not strictly positive");
        auto dot = [&](const Exponent& e) {
            std::int64_t s = 0;
            for (std::size_t i = 0; i < e.size(); ++i) s += v.witness[i] * e[i];
            return s;
        };
        for (const auto& e : d.support)
            if (e != v.vertex && dot(e) <= dot(v.vertex)) violation(o, tag + ": witness does not separate " + exponent_string(e));
        csv << j << ',' << exponent_string(v.vertex) << ',' << v.d << ',' << (v.beta ? rational_string(*v.beta) : "") << ','
            << v.zero_coords.size() << ',' << (v.degenerate ? 1 : 0) << ',' << normals_text(v.normals) << '\n';
    }
}

void partition_suite(const ExperimentConfig& cfg, SuiteOutcome& o, Writer& w) {
    auto d = build_diagram(parse_polynomial(cfg.poly, cfg.n));
    auto rep = verify_partition(d, cfg.q_max);
    o.measured = {{"q_max", rep.q_max},
                  {"checked", rep.checked},
                  {"coverage_violations", rep.coverage_violations},
                  {"disjointness_violations", rep.disjointness_violations},
                  {"lemma_violations", rep.lemma_violations},
                  {"reconstruction_violations", rep.reconstruction_violations},
                  {"violations", rep.total()}};
    for (const auto& m : rep.messages) violation(o, m);
    if (rep.total() > 0 && rep.messages.empty()) violation(o, std::to_string(rep.total()) + " violations");
    auto csv = w.open("partition.csv");
    csv << "check,count\n";
    csv << "checked," << rep.checked << "\ncoverage," << rep.coverage_violations << "\ndisjointness,"
        << rep.disjointness_violations << "\nlemma," << rep.lemma_violations << "\nreconstruction,"
        << rep.reconstruction_violations << '\n';
}

bool positive_monomial(const Polynomial& p) { return p.size() == 1 && p.terms()[0].coeff > 0; }

void monomial_suite(const ExperimentConfig& cfg, SuiteOutcome& o, Writer& w) {
    auto p = parse_polynomial(cfg.poly, cfg.n);
    auto g = cfg.grid();
    auto corpus = standard_corpus(g, cfg.seed, cfg.monomial_functions);
    FunctionBatch fs;
    for (const auto& t : corpus) fs.push_back(&t.f);
    auto cont = maximal_continuous(fs, p, cfg.monomial_h_grid, cfg.policy());
    auto csv = w.open("monomial.csv");
    csv << "function,kind,max_ratio,max_excess,pointwise_violations,W,W_hardy_littlewood\n";
    double worst = 0.0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        auto hl = hardy_littlewood(corpus[i].f);
        auto rep = domination_report(cont[i], hl, cfg.monomial_tolerance);
        double W = weak_type_functional(cont[i], corpus[i].mass, cfg.alpha).W;
        double Whl = weak_type_functional(hl, corpus[i].mass, cfg.alpha).W;
        worst = std::max(worst, rep.max_ratio);
        if (!rep.passed) violation(o, corpus[i].name + ": " + std::to_string(rep.violations) + " points above 2 M_H f");
        if (W > 2.0 * Whl * (1 + cfg.monomial_tolerance)) violation(o, corpus[i].name + ": W above twice the Hardy-Littlewood W");
        csv << corpus[i].name << ',' << kind_name(corpus[i].kind) << ',' << rep.max_ratio << ',' << rep.max_excess << ','
            << rep.violations << ',' << W << ',' << Whl << '\n';
    }
    o.measured = {{"functions", corpus.size()}, {"max_ratio", worst}, {"tolerance", cfg.monomial_tolerance}};
}

void maximal_suite(const ExperimentConfig& cfg, SuiteOutcome& o, Writer& w) {
    auto p = parse_polynomial(cfg.poly, cfg.n);
    auto d = build_diagram(p);
    auto g = cfg.grid();
    auto corpus = standard_corpus(g, cfg.seed, cfg.maximal_functions);
    FunctionBatch fs;
    for (const auto& t : corpus) fs.push_back(&t.f);
    const int K = cfg.maximal_h_grid;
    const auto policy = cfg.policy();
    auto cont = maximal_continuous(fs, p, K, policy);
    auto box = maximal_dyadic(fs, p, K, DyadicForm::Box, policy);
    auto eta = maximal_dyadic(fs, p, K + 4, DyadicForm::Eta, policy);
    auto cones = maximal_cone_restricted_all(fs, p, d, K + 4, policy);
    const double two_n = std::pow(2.0, cfg.n), four_n = std::pow(4.0, cfg.n);
    nlohmann::json per = nlohmann::json::array();
    std::vector<double> cone_sum0;
    for (std::size_t f = 0; f < corpus.size(); ++f) {
        const double tol = 2e-2 * corpus[f].f.sup();
        std::vector<double> cone_sum(g.cells, 0.0);
        for (const auto& c : cones[f])
            for (std::size_t i = 0; i < g.cells; ++i) cone_sum[i] += c.restricted.values[i];
        std::size_t bad_box = 0, bad_eta = 0, bad_split = 0;
        for (std::size_t i = 0; i < g.cells; ++i) {
            if (box[f].values[i] > two_n * cont[f].values[i] + tol) ++bad_box;
            if (cont[f].values[i] > four_n * eta[f].values[i] + tol) ++bad_eta;
            if (eta[f].values[i] > cone_sum[i] * (1 + 1e-12) + 1e-300) ++bad_split;
        }
        const std::string& name = corpus[f].name;
        if (bad_box) violation(o, name + ": dyadic box form above 2^n continuous at " + std::to_string(bad_box) + " points");
        if (bad_eta) violation(o, name + ": continuous above 4^n eta form at " + std::to_string(bad_eta) + " points");
        if (bad_split) violation(o, name + ": eta form above the sum over vertices at " + std::to_string(bad_split) + " points");
        const double mass = corpus[f].mass;
        per.push_back({{"function", name},
                       {"sup_continuous", cont[f].sup()},
                       {"sup_dyadic_box", box[f].sup()},
                       {"sup_dyadic_eta", eta[f].sup()},
                       {"W_continuous", weak_type_functional(cont[f], mass, cfg.alpha).W},
                       {"W_dyadic_eta", weak_type_functional(eta[f], mass, cfg.alpha).W},
                       {"W_vertex_sum", weak_type_functional(g, cone_sum, mass, cfg.alpha).W}});
        if (f == 0) cone_sum0 = cone_sum;
    }
    o.measured = {{"h_grid", K}, {"eta_q_max", K + 4}, {"functions", per}};

    const std::size_t stride = std::max<std::size_t>(1, g.cells / 4096);
    auto csv = w.open("maximal.csv");
    csv << "x,f,continuous,dyadic_box,dyadic_eta,vertex_sum\n";
    PlotSeries sf{"f", {}, {}}, sc{"continuous", {}, {}}, se{"dyadic eta", {}, {}};
    for (std::size_t i = 0; i < g.cells; i += stride) {
        csv << g.x(i) << ',' << corpus[0].f[i] << ',' << cont[0].values[i] << ',' << box[0].values[i] << ','
            << eta[0].values[i] << ',' << cone_sum0[i] << '\n';
        sf.x.push_back(g.x(i));
        sf.y.push_back(corpus[0].f[i]);
        sc.x.push_back(g.x(i));
        sc.y.push_back(cont[0].values[i]);
        se.x.push_back(g.x(i));
        se.y.push_back(eta[0].values[i]);
    }
    w.svg("maximal.svg", {"maximal functions of " + corpus[0].name, "x", "value"}, {sf, sc, se});
}

void cz_suite(const ExperimentConfig& cfg, SuiteOutcome& o, Writer& w) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> level(-6, 4);
    auto g = cfg.grid();
    auto csv = w.open("cz.csv");
    csv << "case,lambda,amplification,cubes,omega_measure,passed\n";
    std::map<std::string, std::size_t> failures;
    std::map<std::string, double> worst;
    for (int k = 0; k < cfg.cz_cases; ++k) {
        auto f = random_step_function(rng, g);
        const double lambda = std::exp2(level(rng));
        const double amp = (k % 2) * 1.5;
        auto r = cz_decompose(f, lambda, amp);
        auto rep = cz_verify(r, f);
        for (const auto& c : rep.checks) {
            if (!c.passed) ++failures[c.name];
            worst[c.name] = std::max(worst[c.name], c.bound != 0.0 ? c.measured / c.bound : c.measured);
        }
        if (!rep.passed()) violation(o, "case " + std::to_string(k) + ": " + std::to_string(rep.violations()) + " checks failed");
        csv << k << ',' << lambda << ',' << amp << ',' << r.cubes.size() << ',' << r.omega_measure << ','
            << (rep.passed() ? 1 : 0) << '\n';
    }
    o.measured = {{"cases", cfg.cz_cases}, {"failures", failures}, {"worst_ratio", worst}};
}

void oscillatory_suite(const ExperimentConfig& cfg, SuiteOutcome& o, Writer& w) {
    auto p = parse_polynomial(cfg.poly, cfg.n);
    auto d = build_diagram(p);
    nlohmann::json vertices = nlohmann::json::array();
    auto csv = w.open("oscillatory.csv");
    csv << "vertex,N,radius,gradient_floor,mass,small_slope,small_r2,small_constant,large_slope,large_r2\n";
    auto sub = w.open("sublevel.csv");
    sub << "vertex,level,grid_measure,sample_measure\n";
    std::vector<PlotSeries> constants, sublevels;
    for (std::size_t j = 0; j < d.vertices.size(); ++j) {
        const auto& v = d.vertices[j];
        const std::string tag = "vertex " + std::to_string(j) + " " + exponent_string(v.vertex);
        if (!v.has_zero_coords()) {
            if (!v.beta) {
                vertices.push_back({{"vertex", j}, {"vanishing", true}});
                continue;
            }
            auto fd = vertex_fourier_decay(p, d, j, cfg.n_min, cfg.n_max);
            PlotSeries s{tag, {}, {}, true};
            for (const auto& pt : fd.points) {
                const std::string at = tag + " N=" + std::to_string(pt.N);
                if (std::abs(pt.mass) > 1e-10) violation(o, at + ": measure mass not cancelled");
                if (pt.vanishing) {
                    violation(o, at + ": slice measure vanishes");
                    continue;
                }
                if (pt.small.vanishing || pt.small.line.slope < 0.9 || pt.small.line.slope > 1.1 || pt.small.line.r2 < 0.95)
                    violation(o, at + ": small-band slope " + std::to_string(pt.small.line.slope) + " r2 " + std::to_string(pt.small.line.r2));
                if (pt.large.vanishing || pt.large.line.slope > -0.4 || pt.large.line.r2 < 0.95)
                    violation(o, at + ": large-band slope " + std::to_string(pt.large.line.slope) + " r2 " + std::to_string(pt.large.line.r2));
                csv << j << ',' << pt.N << ',' << pt.radius << ',' << pt.gradient_floor << ',' << pt.mass << ','
                    << pt.small.line.slope << ',' << pt.small.line.r2 << ',' << pt.small.origin_constant << ','
                    << pt.large.line.slope << ',' << pt.large.line.r2 << '\n';
                s.x.push_back(static_cast<double>(pt.N));
                s.y.push_back(pt.small.origin_constant);
            }
            if (!fd.fitted) violation(o, tag + ": small-band constants cannot be fitted");
            else if (fd.delta < 0.5 * fd.beta)
                violation(o, tag + ": constant decay rate " + std::to_string(fd.delta) + " below beta/2");
            constants.push_back(s);
            vertices.push_back(to_json(fd));
        } else {
            auto part = lambda0_split(p, v.vertex, v.zero_coords).lambda0;
            nlohmann::json x{{"vertex", j}, {"zero_coordinates", true}, {"lambda0", part.to_string()}};
            if (part.degree() >= 2) {
                SublevelOptions so;
                so.seed = cfg.seed;
                auto c = sublevel_measure(part, so);
                x["sublevel"] = to_json(c);
                if (!c.fitted) violation(o, tag + ": sublevel curve has too few levels in range");
                else if (!(c.fit.slope > 0) || c.fit.r2 < 0.9)
                    violation(o, tag + ": sublevel exponent " + std::to_string(c.fit.slope) + " r2 " + std::to_string(c.fit.r2));
                PlotSeries s{tag, {}, {}, true};
                for (std::size_t i = 0; i < c.level.size(); ++i) {
                    sub << j << ',' << c.level[i] << ',' << c.grid_measure[i] << ',' << c.sample_measure[i] << '\n';
                    s.x.push_back(std::log2(c.level[i]));
                    s.y.push_back(c.grid_measure[i]);
                }
                sublevels.push_back(s);
            }
            if (!v.gamma_infinite && !v.gamma.empty()) {
                auto k0 = empirical_k0(p, d, j, cfg.theta, cfg.kbar_max);
                x["k0"] = k0 ? nlohmann::json(*k0) : nlohmann::json(nullptr);
            }
            vertices.push_back(x);
        }
    }
    o.measured = {{"n_min", cfg.n_min}, {"n_max", cfg.n_max}, {"vertices", vertices}};
    w.svg("oscillatory_constants.svg", {"small-band constant against depth", "N", "C(N)", true}, constants);
    w.svg("sublevel.svg", {"sublevel measure of the zero-coordinate parts", "log2 level", "measure", true}, sublevels);
}

void weaktype_suite(const ExperimentConfig& cfg, SuiteOutcome& o, Writer& w) {
    auto p = parse_polynomial(cfg.poly, cfg.n);
    auto corpus = standard_corpus(cfg.grid(), cfg.seed, cfg.weak_corpus);
    SweepOptions so;
    so.h_grid = cfg.weak_h_grid;
    so.q_max = cfg.weak_q_max;
    so.policy = cfg.policy();
    so.alpha = cfg.alpha;
    so.stability = cfg.weak_stability;
    auto r = stability_sweep(p, corpus, so);
    o.measured = to_json(r);
    if (!r.scale_invariant()) violation(o, "W changes under f -> c f by " + std::to_string(r.max_scale_deviation));
    if (r.corpus_deviation > cfg.weak_stability) violation(o, "corpus maxima differ by " + std::to_string(r.corpus_deviation));
    if (r.max_translate_deviation > cfg.weak_stability)
        violation(o, "W changes under translation by " + std::to_string(r.max_translate_deviation));
    if (r.width_blowup) violation(o, "W grows monotonically as the delta-like width shrinks");
    for (const auto& s : r.slices)
        if (std::any_of(s.W.begin(), s.W.end(), [](double x) { return x > 0; }) && !(s.fitted && s.delta > 0))
            violation(o, "vertex " + std::to_string(s.vertex) + ": no positive depth decay rate");
    for (const auto& s : r.axis_slices)
        if (std::any_of(s.W.begin(), s.W.end(), [](double x) { return x > 0; }) && !(s.fitted && s.delta > 0))
            violation(o, "vertex " + std::to_string(s.vertex) + " axis " + std::to_string(s.axis) + ": no positive decay rate");

    {
        auto csv = w.open("weaktype.csv");
        r.write_slice_csv(csv);
    }
    {
        auto csv = w.open("weaktype_axis.csv");
        csv << "vertex,axis,k,W,fit_gamma\n";
        for (const auto& s : r.axis_slices)
            for (std::size_t i = 0; i < s.N.size(); ++i) {
                csv << s.vertex << ',' << s.axis << ',' << s.N[i] << ',' << s.W[i] << ',';
                if (s.fitted) csv << s.delta;
                csv << '\n';
            }
    }
    {
        auto csv = w.open("weaktype_corpus.csv");
        csv << "function,kind,W,scale_deviation,translate_deviation\n";
        for (const auto& e : r.corpus)
            csv << e.name << ',' << kind_name(e.kind) << ',' << e.W << ',' << e.scale_deviation << ',' << e.translate_deviation << '\n';
        csv << "# width sweep\n";
        for (std::size_t k = 0; k < r.width_cells.size(); ++k)
            csv << "delta-width-" << r.width_cells[k] << ",delta-like," << r.width_W[k] << ",,\n";
    }
    std::vector<PlotSeries> depth, axis;
    for (const auto& s : r.slices) {
        PlotSeries x{"vertex " + std::to_string(s.vertex), {}, s.W, true};
        for (auto N : s.N) x.x.push_back(static_cast<double>(N));
        depth.push_back(x);
    }
    for (const auto& s : r.axis_slices) {
        PlotSeries x{"vertex " + std::to_string(s.vertex) + " axis " + std::to_string(s.axis), {}, s.W, true};
        for (auto N : s.N) x.x.push_back(static_cast<double>(N));
        axis.push_back(x);
    }
    w.svg("weaktype_N.svg", {"weak functional of the depth pieces", "N", "W", true}, depth);
    w.svg("weaktype_kbar.svg", {"weak functional of the axis pieces", "k", "W", true}, axis);
}

}  // namespace

SuiteOutcome run_suite(const std::string& name, const ExperimentConfig& cfg, const std::string& dir) {
    SuiteOutcome o;
    o.name = name;
    Writer w{dir, &o};
    const auto t0 = Clock::now();
    try {
        if (name == "diagram") diagram_suite(cfg, o, w);
        else if (name == "partition") partition_suite(cfg, o, w);
        else if (name == "monomial") {
            if (!positive_monomial(parse_polynomial(cfg.poly, cfg.n))) {
                if (!cfg.all) throw ConfigError("the monomial suite needs a monomial with positive coefficient");
                o.skipped = true;
                o.measured = {{"reason", "not a monomial with positive coefficient"}};
            } else {
                monomial_suite(cfg, o, w);
            }
        } else if (name == "maximal") maximal_suite(cfg, o, w);
        else if (name == "cz") cz_suite(cfg, o, w);
        else if (name == "oscillatory") oscillatory_suite(cfg, o, w);
        else if (name == "weaktype") weaktype_suite(cfg, o, w);
        else throw ConfigError("unknown suite " + name);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        violation(o, std::string("error: ") + e.what());
    }
    o.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return o;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
    if (cfg.suites.empty()) throw ConfigError("no suite given");
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec || !fs::is_directory(cfg.out)) throw ConfigError("cannot create output directory " + cfg.out);
    ExperimentResult res;
    nlohmann::json report;
    report["polynomial"] = cfg.poly;
    report["n"] = cfg.n;
    auto echoed = cfg.values;
    echoed.erase("out");
    report["config"] = echoed;
    report["suites"] = nlohmann::json::array();
    bool passed = true;
    for (const auto& name : cfg.suites) {
        auto o = run_suite(name, cfg, cfg.out);
        if (log)
            *log << (o.skipped ? "SKIP " : o.passed ? "PASS " : "FAIL ") << name << " (" << std::fixed << std::setprecision(1)
                 << o.seconds << " s)" << std::defaultfloat << '\n';
        passed = passed && o.passed;
        report["suites"].push_back({{"name", o.name},
                                    {"passed", o.passed},
                                    {"skipped", o.skipped},
                                    {"violations", o.violations},
                                    {"measured", o.measured},
                                    {"files", o.files}});
        for (const auto& f : o.files) res.files.push_back(f);
        res.suites.push_back(std::move(o));
    }
    report["passed"] = passed;
    res.files.push_back("report.json");
    res.files.push_back("index.json");
    std::sort(res.files.begin(), res.files.end());
    {
        std::ofstream os(fs::path(cfg.out) / "report.json");
        if (!os) throw ConfigError("cannot write report.json");
        os << report.dump(2) << '\n';
    }
    {
        std::ofstream os(fs::path(cfg.out) / "index.json");
        if (!os) throw ConfigError("cannot write index.json");
        nlohmann::json index{{"files", res.files}, {"suites", cfg.suites}};
        os << index.dump(2) << '\n';
    }
    res.status = passed ? 0 : 1;
    return res;
}

}  // namespace polymax
