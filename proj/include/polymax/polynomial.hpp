#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace polymax {

using Exponent = std::vector<int>;
using IntVec = std::vector<std::int64_t>;

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t pos);
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

double ipow(double x, int e);

class Polynomial {
public:
    struct Term {
        Exponent exponent;
        double coeff;
    };

    // Zero coefficients are dropped; throws if nothing remains or dimensions disagree.
    Polynomial(int n, const std::map<Exponent, double>& terms);

    int dim() const { return n_; }
    const std::vector<Term>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    std::vector<Exponent> support() const;
    bool contains(const Exponent& e) const;
    double coeff(const Exponent& e) const;
    int degree() const;

    double evaluate(const std::vector<double>& t) const;
    std::vector<double> gradient(const std::vector<double>& t) const;

    // Coefficient of t^m becomes a_m * 2^{-q.m}.
    Polynomial dilate(const IntVec& q) const;
    Polynomial scaled(double c) const;

    std::map<Exponent, double> as_map() const;
    std::string to_string() const;

private:
    int n_;
    std::vector<Term> terms_;
};

// Returns nullopt when the sum cancels to nothing.
std::optional<Polynomial> add(const Polynomial& a, const Polynomial& b);

Polynomial parse_polynomial(const std::string& text, int n);

// P(2^{-q} t) = 2^{-q.vertex} * P~(t); each term keeps its exact shift e = q.(m - vertex).
class ScaledPolynomial {
public:
    struct Term {
        Exponent exponent;
        double coeff;
        std::int64_t shift;
        double effective;
    };

    ScaledPolynomial(const Polynomial& base, Exponent vertex, IntVec q);

    int dim() const { return base_.dim(); }
    const Polynomial& base() const { return base_; }
    const Exponent& vertex() const { return vertex_; }
    const IntVec& index() const { return q_; }
    const std::vector<Term>& terms() const { return terms_; }

    double multiplier(const Exponent& e) const;
    std::int64_t shift(const Exponent& e) const;
    std::int64_t vertex_shift() const;

    double evaluate(const std::vector<double>& t) const;
    std::vector<double> gradient(const std::vector<double>& t) const;
    Polynomial as_polynomial() const;

private:
    Polynomial base_;
    Exponent vertex_;
    IntVec q_;
    std::vector<Term> terms_;
};

ScaledPolynomial tilde_rescale(const Polynomial& p, const Exponent& vertex, const IntVec& q);

struct Lambda0Split {
    Polynomial lambda0;
    std::optional<Polynomial> rest;
};

// zero_set holds 0-based coordinates and must equal {i : vertex_i == 0}.
Lambda0Split lambda0_split(const Polynomial& p, const Exponent& vertex, const std::vector<int>& zero_set);

std::string exponent_string(const Exponent& e);

}  // namespace polymax
