#include "polymax/convolution.hpp"

#include <fftw3.h>

#include <algorithm>
#include <stdexcept>

namespace polymax {

namespace {

constexpr std::int64_t kDirectLimit = 48;

std::size_t next_pow2(std::size_t x) {
    std::size_t p = 1;
    while (p < x) p <<= 1;
    return p;
}

}  // namespace

ConvolutionBank::ConvolutionBank(const std::vector<const GridFunction*>& fs) {
    if (fs.empty()) throw std::invalid_argument("empty convolution bank");
    const GridSpec& g = fs[0]->grid();
    n_ = g.cells;
    for (const auto* f : fs) {
        if (!(f->grid() == g)) throw std::invalid_argument("bank functions must share a grid");
        inputs_.push_back(f->values());
    }
    m_ = next_pow2(2 * n_);
    real_buf_ = fftw_alloc_real(m_);
    auto* cbuf = fftw_alloc_complex(m_ / 2 + 1);
    complex_buf_ = cbuf;
    forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(m_), real_buf_, cbuf, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r_1d(static_cast<int>(m_), cbuf, real_buf_, FFTW_ESTIMATE);
    for (const auto& v : inputs_) {
        std::fill(real_buf_, real_buf_ + m_, 0.0);
        std::copy(v.begin(), v.end(), real_buf_);
        fftw_execute(static_cast<fftw_plan>(forward_));
        std::vector<std::complex<double>> s(m_ / 2 + 1);
        const auto* z = reinterpret_cast<const std::complex<double>*>(cbuf);
        std::copy(z, z + s.size(), s.begin());
        spectra_.push_back(std::move(s));
    }
}

ConvolutionBank::~ConvolutionBank() {
    fftw_destroy_plan(static_cast<fftw_plan>(forward_));
    fftw_destroy_plan(static_cast<fftw_plan>(backward_));
    fftw_free(real_buf_);
    fftw_free(complex_buf_);
}

void ConvolutionBank::direct(const LatticeMeasure& kernel, std::int64_t lo, std::int64_t hi,
                             std::vector<std::vector<double>>& out) {
    const auto n = static_cast<std::int64_t>(n_);
    for (std::size_t f = 0; f < inputs_.size(); ++f) {
        auto& o = out[f];
        const auto& in = inputs_[f];
        for (std::int64_t s = lo; s <= hi; ++s) {
            double w = kernel.w[static_cast<std::size_t>(s - kernel.first)];
            if (w == 0.0) continue;
            std::int64_t i0 = std::max<std::int64_t>(0, s), i1 = std::min<std::int64_t>(n, n + s);
            for (std::int64_t i = i0; i < i1; ++i) o[i] += w * in[i - s];
        }
    }
}

void ConvolutionBank::apply(const LatticeMeasure& kernel, std::vector<std::vector<double>>& out) {
    out.resize(inputs_.size());
    for (auto& o : out) o.assign(n_, 0.0);
    const auto n = static_cast<std::int64_t>(n_);
    std::int64_t lo = std::max<std::int64_t>(kernel.first, -(n - 1));
    std::int64_t hi = std::min<std::int64_t>(kernel.last(), n - 1);
    if (kernel.w.empty() || lo > hi) return;
    if (hi - lo + 1 <= kDirectLimit) {
        direct(kernel, lo, hi, out);
        return;
    }
    auto* cbuf = static_cast<fftw_complex*>(complex_buf_);
    std::fill(real_buf_, real_buf_ + m_, 0.0);
    const auto m = static_cast<std::int64_t>(m_);
    for (std::int64_t s = lo; s <= hi; ++s) real_buf_[(s % m + m) % m] = kernel.w[static_cast<std::size_t>(s - kernel.first)];
    fftw_execute(static_cast<fftw_plan>(forward_));
    std::vector<std::complex<double>> ks(m_ / 2 + 1);
    const auto* z = reinterpret_cast<const std::complex<double>*>(cbuf);
    std::copy(z, z + ks.size(), ks.begin());
    const double norm = 1.0 / static_cast<double>(m_);
    for (std::size_t f = 0; f < inputs_.size(); ++f) {
        const auto& sp = spectra_[f];
        for (std::size_t k = 0; k < ks.size(); ++k) {
            std::complex<double> z = ks[k] * sp[k];
            cbuf[k][0] = z.real();
            cbuf[k][1] = z.imag();
        }
        fftw_execute(static_cast<fftw_plan>(backward_));
        auto& o = out[f];
        for (std::size_t i = 0; i < n_; ++i) o[i] = real_buf_[i] * norm;
    }
}

}  // namespace polymax
