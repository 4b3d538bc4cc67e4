#include "polymax/corpus.hpp"

#include "polymax/newton.hpp"

namespace polymax {

const std::vector<CorpusPolynomial>& polynomial_corpus() {
    static const std::vector<CorpusPolynomial> corpus{
        {"t1^2*t2 + t1*t2^3", 2},
        {"t1^2 + t2^3", 2},
        {"t1*t2", 2},
        {"t1^2 + t1*t2", 2},
        {"t1^3 - 2*t1*t2 + t2^2", 2},
        {"t1^4 + t1^2*t2 + t2^2 + t1*t2^3", 2},
        {"t1^5 + 3*t1^2*t2^2 + t2^4 - t1*t2^3", 2},
        {"t1*t2^2 + t1^3*t2 + t1^2*t2^2", 2},
        {"t1*t2*t3", 3},
        {"t1^2*t2 + t2*t3^2 + t1*t3", 3},
        {"t1^2 + t2^2 + t3^2", 3},
        {"t2*t3^2 + t1*t3 + t1*t2 + t1^3*t2^2", 3},
    };
    return corpus;
}

const std::vector<CorpusPolynomial>& monomial_corpus() {
    static const std::vector<CorpusPolynomial> corpus{
        {"t1", 1}, {"t1^3", 1}, {"t1*t2", 2}, {"t1^2*t2", 2}, {"t1*t2^3", 2}, {"t1*t2*t3", 3},
    };
    return corpus;
}

std::vector<Lambda0Part> lambda0_parts(const std::vector<CorpusPolynomial>& corpus) {
    std::vector<Lambda0Part> out;
    for (std::size_t c = 0; c < corpus.size(); ++c) {
        auto p = corpus[c].parse();
        auto d = build_diagram(p);
        for (std::size_t j = 0; j < d.vertices.size(); ++j) {
            const auto& v = d.vertices[j];
            if (!v.has_zero_coords()) continue;
            auto part = lambda0_split(p, v.vertex, v.zero_coords).lambda0;
            if (part.degree() < 2) continue;
            bool seen = false;
            for (const auto& o : out) seen = seen || (o.part.dim() == part.dim() && o.part.as_map() == part.as_map());
            if (!seen) out.push_back({c, j, part});
        }
    }
    return out;
}

GridFunction random_step_function(std::mt19937_64& rng, const GridSpec& g) {
    std::uniform_int_distribution<int> count(1, 6);
    std::uniform_real_distribution<double> pos(g.x_lo, g.x_hi()), width(0.01, 2.0), height(0.1, 10.0);
    std::vector<double> v(g.cells, 0.0);
    const int k = count(rng);
    for (int i = 0; i < k; ++i) {
        double a = pos(rng), w = width(rng), h = height(rng);
        for (std::size_t c = 0; c < g.cells; ++c)
            if (g.x(c) >= a && g.x(c) < a + w) v[c] += h;
    }
    v[g.cells / 2] += 1.0;
    return GridFunction(g, v);
}

}  // namespace polymax
