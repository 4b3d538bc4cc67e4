#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "polymax/grid.hpp"
#include "polymax/pushforward.hpp"

namespace polymax {

// Applies lattice kernels (lattice step = grid step) to a fixed set of grid functions:
// out_f[i] = sum_k w_k f[i - (first + k)], with f = 0 outside the grid.
class ConvolutionBank {
public:
    explicit ConvolutionBank(const std::vector<const GridFunction*>& fs);
    ~ConvolutionBank();
    ConvolutionBank(const ConvolutionBank&) = delete;
    ConvolutionBank& operator=(const ConvolutionBank&) = delete;

    std::size_t count() const { return inputs_.size(); }
    std::size_t cells() const { return n_; }
    // Writes one output row per bank function into out (resized as needed).
    void apply(const LatticeMeasure& kernel, std::vector<std::vector<double>>& out);

private:
    void direct(const LatticeMeasure& kernel, std::int64_t lo, std::int64_t hi, std::vector<std::vector<double>>& out);

    std::size_t n_, m_;
    std::vector<std::vector<double>> inputs_;
    std::vector<std::vector<std::complex<double>>> spectra_;
    double* real_buf_ = nullptr;
    void* complex_buf_ = nullptr;
    void* forward_ = nullptr;
    void* backward_ = nullptr;
};

}  // namespace polymax
