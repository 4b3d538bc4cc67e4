#include "polymax/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

namespace polymax {

ParseError::ParseError(const std::string& msg, std::size_t pos)
    : std::runtime_error(msg + " at position " + std::to_string(pos)), pos_(pos) {}

double ipow(double x, int e) {
    double r = 1.0;
    double b = x;
    while (e > 0) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

std::string exponent_string(const Exponent& e) {
    std::string s = "(";
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(e[i]);
    }
    return s + ")";
}

Polynomial::Polynomial(int n, const std::map<Exponent, double>& terms) : n_(n) {
    if (n < 1) throw std::invalid_argument("polynomial dimension must be >= 1");
    for (const auto& [e, c] : terms) {
        if (static_cast<int>(e.size()) != n)
            throw std::invalid_argument("exponent " + exponent_string(e) + " has wrong dimension");
        for (int x : e)
            if (x < 0) throw std::invalid_argument("negative exponent in " + exponent_string(e));
        if (!std::isfinite(c)) throw std::invalid_argument("non-finite coefficient");
        if (c != 0.0) terms_.push_back({e, c});
    }
    if (terms_.empty()) throw std::invalid_argument("empty support");
}

std::vector<Exponent> Polynomial::support() const {
    std::vector<Exponent> s;
    for (const auto& t : terms_) s.push_back(t.exponent);
    return s;
}

bool Polynomial::contains(const Exponent& e) const {
    return std::any_of(terms_.begin(), terms_.end(), [&](const Term& t) { return t.exponent == e; });
}

double Polynomial::coeff(const Exponent& e) const {
    for (const auto& t : terms_)
        if (t.exponent == e) return t.coeff;
    return 0.0;
}

int Polynomial::degree() const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, std::accumulate(t.exponent.begin(), t.exponent.end(), 0));
    return d;
}

namespace {

double monomial(const Exponent& e, const std::vector<double>& t) {
    double v = 1.0;
    for (std::size_t i = 0; i < e.size(); ++i) v *= ipow(t[i], e[i]);
    return v;
}

void monomial_gradient(const Exponent& e, double c, const std::vector<double>& t, std::vector<double>& g) {
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        double v = c * e[i] * ipow(t[i], e[i] - 1);
        for (std::size_t k = 0; k < e.size(); ++k)
            if (k != i) v *= ipow(t[k], e[k]);
        g[i] += v;
    }
}

void check_point(const std::vector<double>& t, int n) {
    if (static_cast<int>(t.size()) != n) throw std::invalid_argument("point has wrong dimension");
}

}  // namespace

double Polynomial::evaluate(const std::vector<double>& t) const {
    check_point(t, n_);
    double s = 0.0;
    for (const auto& term : terms_) s += term.coeff * monomial(term.exponent, t);
    return s;
}

std::vector<double> Polynomial::gradient(const std::vector<double>& t) const {
    check_point(t, n_);
    std::vector<double> g(n_, 0.0);
    for (const auto& term : terms_) monomial_gradient(term.exponent, term.coeff, t, g);
    return g;
}

Polynomial Polynomial::dilate(const IntVec& q) const {
    if (static_cast<int>(q.size()) != n_) throw std::invalid_argument("index has wrong dimension");
    std::map<Exponent, double> m;
    for (const auto& t : terms_) {
        std::int64_t e = 0;
        for (int i = 0; i < n_; ++i) e += q[i] * t.exponent[i];
        m[t.exponent] = std::ldexp(t.coeff, static_cast<int>(-e));
    }
    return Polynomial(n_, m);
}

Polynomial Polynomial::scaled(double c) const {
    std::map<Exponent, double> m;
    for (const auto& t : terms_) m[t.exponent] = c * t.coeff;
    return Polynomial(n_, m);
}

std::map<Exponent, double> Polynomial::as_map() const {
    std::map<Exponent, double> m;
    for (const auto& t : terms_) m[t.exponent] = t.coeff;
    return m;
}

std::string Polynomial::to_string() const {
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& [e, c] : as_map()) {
        double a = c;
        if (!first) {
            os << (a < 0 ? " - " : " + ");
            a = std::abs(a);
        }
        first = false;
        os << a;
        for (int i = 0; i < n_; ++i) {
            if (e[i] == 0) continue;
            os << "*t" << (i + 1);
            if (e[i] != 1) os << "^" << e[i];
        }
    }
    return os.str();
}

std::optional<Polynomial> add(const Polynomial& a, const Polynomial& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch in add");
    auto m = a.as_map();
    for (const auto& t : b.terms()) m[t.exponent] += t.coeff;
    bool any = std::any_of(m.begin(), m.end(), [](const auto& kv) { return kv.second != 0.0; });
    if (!any) return std::nullopt;
    return Polynomial(a.dim(), m);
}

namespace {

class Parser {
public:
    Parser(const std::string& text, int n) : s_(text), n_(n) {}

    Polynomial run() {
        if (n_ < 1) throw std::invalid_argument("dimension must be >= 1");
        std::map<Exponent, double> acc;
        double sign = 1.0;
        skip();
        if (peek() == '+' || peek() == '-') {
            sign = peek() == '-' ? -1.0 : 1.0;
            ++pos_;
        }
        while (true) {
            auto [e, c] = term();
            acc[e] += sign * c;
            skip();
            if (pos_ >= s_.size()) break;
            char op = s_[pos_];
            if (op != '+' && op != '-') fail("expected '+' or '-'");
            sign = op == '-' ? -1.0 : 1.0;
            ++pos_;
        }
        std::map<Exponent, double> kept;
        for (const auto& [e, c] : acc)
            if (c != 0.0) kept[e] = c;
        if (kept.empty()) throw ParseError("empty support after collection", s_.size());
        return Polynomial(n_, kept);
    }

private:
    const std::string& s_;
    int n_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    char peek() {
        skip();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    std::pair<Exponent, double> term() {
        Exponent e(n_, 0);
        double c = 1.0;
        char ch = peek();
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
            c = number();
            if (peek() != '*') return {e, c};
            ++pos_;
        } else if (ch != 't') {
            fail("expected coefficient or variable");
        }
        while (true) {
            factor(e);
            if (peek() != '*') break;
            ++pos_;
        }
        return {e, c};
    }

    double number() {
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        return v;
    }

    void factor(Exponent& e) {
        if (peek() != 't') fail("expected variable");
        ++pos_;
        std::size_t start = pos_;
        long idx = 0;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            idx = idx * 10 + (s_[pos_] - '0');
            if (idx > 1000000) fail("variable index too large");
            ++pos_;
        }
        if (pos_ == start) fail("expected variable index");
        if (idx < 1 || idx > n_) {
            pos_ = start;
            fail("variable index t" + std::to_string(idx) + " out of range 1.." + std::to_string(n_));
        }
        long ex = 1;
        if (peek() == '^') {
            ++pos_;
            skip();
            if (peek() == '-') fail("negative exponent");
            if (peek() == '+') ++pos_;
            skip();
            std::size_t ds = pos_;
            ex = 0;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                ex = ex * 10 + (s_[pos_] - '0');
                if (ex > 10000) fail("exponent too large");
                ++pos_;
            }
            if (pos_ == ds) fail("expected exponent");
        }
        e[idx - 1] += static_cast<int>(ex);
    }
};

}  // namespace

Polynomial parse_polynomial(const std::string& text, int n) { return Parser(text, n).run(); }

ScaledPolynomial::ScaledPolynomial(const Polynomial& base, Exponent vertex, IntVec q)
    : base_(base), vertex_(std::move(vertex)), q_(std::move(q)) {
    const int n = base_.dim();
    if (static_cast<int>(vertex_.size()) != n || static_cast<int>(q_.size()) != n)
        throw std::invalid_argument("vertex or index has wrong dimension");
    if (!base_.contains(vertex_)) throw std::invalid_argument("vertex " + exponent_string(vertex_) + " not in support");
    for (const auto& t : base_.terms()) {
        std::int64_t e = 0;
        for (int i = 0; i < n; ++i) e += q_[i] * (t.exponent[i] - vertex_[i]);
        terms_.push_back({t.exponent, t.coeff, e, std::ldexp(t.coeff, static_cast<int>(-e))});
    }
}

std::int64_t ScaledPolynomial::shift(const Exponent& e) const {
    for (const auto& t : terms_)
        if (t.exponent == e) return t.shift;
    throw std::invalid_argument("exponent " + exponent_string(e) + " not in support");
}

double ScaledPolynomial::multiplier(const Exponent& e) const { return std::ldexp(1.0, static_cast<int>(-shift(e))); }

std::int64_t ScaledPolynomial::vertex_shift() const {
    std::int64_t e = 0;
    for (std::size_t i = 0; i < q_.size(); ++i) e += q_[i] * vertex_[i];
    return e;
}

double ScaledPolynomial::evaluate(const std::vector<double>& t) const {
    check_point(t, dim());
    double s = 0.0;
    for (const auto& term : terms_) s += term.effective * monomial(term.exponent, t);
    return s;
}

std::vector<double> ScaledPolynomial::gradient(const std::vector<double>& t) const {
    check_point(t, dim());
    std::vector<double> g(dim(), 0.0);
    for (const auto& term : terms_) monomial_gradient(term.exponent, term.effective, t, g);
    return g;
}

Polynomial ScaledPolynomial::as_polynomial() const {
    std::map<Exponent, double> m;
    for (const auto& t : terms_) m[t.exponent] = t.effective;
    return Polynomial(dim(), m);
}

ScaledPolynomial tilde_rescale(const Polynomial& p, const Exponent& vertex, const IntVec& q) {
    return ScaledPolynomial(p, vertex, q);
}

Lambda0Split lambda0_split(const Polynomial& p, const Exponent& vertex, const std::vector<int>& zero_set) {
    const int n = p.dim();
    if (static_cast<int>(vertex.size()) != n) throw std::invalid_argument("vertex has wrong dimension");
    if (!p.contains(vertex)) throw std::invalid_argument("vertex " + exponent_string(vertex) + " not in support");
    std::vector<int> expected;
    for (int i = 0; i < n; ++i)
        if (vertex[i] == 0) expected.push_back(i);
    std::vector<int> given = zero_set;
    std::sort(given.begin(), given.end());
    given.erase(std::unique(given.begin(), given.end()), given.end());
    if (given != expected) throw std::invalid_argument("zero set inconsistent with vertex " + exponent_string(vertex));
    std::map<Exponent, double> zero_part, rest;
    for (const auto& t : p.terms()) {
        bool in = std::all_of(given.begin(), given.end(), [&](int i) { return t.exponent[i] == 0; });
        (in ? zero_part : rest)[t.exponent] = t.coeff;
    }
    Lambda0Split out{Polynomial(n, zero_part), std::nullopt};
    if (!rest.empty()) out.rest = Polynomial(n, rest);
    return out;
}

}  // namespace polymax
