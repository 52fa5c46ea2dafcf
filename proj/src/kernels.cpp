#include "icg/kernels.hpp"

#include <algorithm>
#include <cstddef>

namespace icg::kernels {

namespace {

// Below this many samples the thread start-up cost dominates.
constexpr std::ptrdiff_t kParallelThreshold = 4096;

double edge_value(std::span<const double> x, const SgKernel& k, int p, bool right) {
    const auto n = x.size();
    const auto& w = k.edge_weights[static_cast<std::size_t>(p)];
    double acc = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * (right ? x[n - 1 - j] : x[j]);
    return acc;
}

void fill_edges(std::span<const double> x, const SgKernel& k, std::vector<double>& y) {
    const auto n = x.size();
    for (int p = 0; p < k.half(); ++p) {
        y[static_cast<std::size_t>(p)] = edge_value(x, k, p, false);
        y[n - 1 - static_cast<std::size_t>(p)] = edge_value(x, k, p, true);
    }
}

inline double centred_dot(std::span<const double> x, const SgKernel& k, std::ptrdiff_t i) {
    const double* src = x.data() + i - k.half();
    const double* w = k.coeffs.data();
    double acc = 0.0;
    for (int j = 0; j < k.length; ++j) acc += w[j] * src[j];
    return acc;
}

inline double ratio(double short_sum, int short_cnt, double long_sum, int long_cnt) {
    if (long_sum <= 0.0) return 0.0;
    return (short_sum / short_cnt) / (long_sum / long_cnt);
}

}  // namespace

namespace serial {

std::vector<double> sg_convolve(std::span<const double> x, const SgKernel& kernel) {
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    std::vector<double> y(x.size());
    for (std::ptrdiff_t i = kernel.half(); i < n - kernel.half(); ++i) y[static_cast<std::size_t>(i)] = centred_dot(x, kernel, i);
    fill_edges(x, kernel, y);
    return y;
}

EnergyRatio relative_energy(std::span<const double> x, int short_len, int long_len) {
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    const auto sw = centred(short_len);
    const auto lw = centred(long_len);
    EnergyRatio out{std::vector<double>(x.size()), std::vector<double>(x.size())};
    auto window_energy = [&](std::ptrdiff_t i, CentredWindow w, int& count) {
        const auto lo = std::max<std::ptrdiff_t>(0, i - w.left);
        const auto hi = std::min<std::ptrdiff_t>(n - 1, i + w.right);
        double e = 0.0;
        for (auto j = lo; j <= hi; ++j) e += x[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
        count = static_cast<int>(hi - lo + 1);
        return e;
    };
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        int cs = 0, cl = 0;
        const double es = window_energy(i, sw, cs);
        const double el = window_energy(i, lw, cl);
        const auto u = static_cast<std::size_t>(i);
        out.coeff[u] = ratio(es, cs, el, cl);
        out.enhanced[u] = out.coeff[u] * x[u];
    }
    return out;
}

}  // namespace serial

namespace omp {

std::vector<double> sg_convolve(std::span<const double> x, const SgKernel& kernel) {
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    const std::ptrdiff_t h = kernel.half();
    std::vector<double> y(x.size());
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
    for (std::ptrdiff_t i = h; i < n - h; ++i) y[static_cast<std::size_t>(i)] = centred_dot(x, kernel, i);
    fill_edges(x, kernel, y);
    return y;
}

EnergyRatio relative_energy(std::span<const double> x, int short_len, int long_len) {
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    std::vector<double> prefix(x.size() + 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) prefix[i + 1] = prefix[i] + x[i] * x[i];

    const auto sw = centred(short_len);
    const auto lw = centred(long_len);
    EnergyRatio out{std::vector<double>(x.size()), std::vector<double>(x.size())};
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto s_lo = std::max<std::ptrdiff_t>(0, i - sw.left);
        const auto s_hi = std::min<std::ptrdiff_t>(n - 1, i + sw.right);
        const auto l_lo = std::max<std::ptrdiff_t>(0, i - lw.left);
        const auto l_hi = std::min<std::ptrdiff_t>(n - 1, i + lw.right);
        // differences of prefix sums can round slightly below zero
        const double es = std::max(0.0, prefix[static_cast<std::size_t>(s_hi + 1)] - prefix[static_cast<std::size_t>(s_lo)]);
        const double el = std::max(0.0, prefix[static_cast<std::size_t>(l_hi + 1)] - prefix[static_cast<std::size_t>(l_lo)]);
        const auto u = static_cast<std::size_t>(i);
        out.coeff[u] = ratio(es, static_cast<int>(s_hi - s_lo + 1), el, static_cast<int>(l_hi - l_lo + 1));
        out.enhanced[u] = out.coeff[u] * x[u];
    }
    return out;
}

}  // namespace omp

}  // namespace icg::kernels
