#include "icg/sgfilter.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

#include "icg/kernels.hpp"

namespace icg {

namespace {

// Pseudo-inverse of the centred Vandermonde design matrix: row j maps window
// samples to the j-th polynomial coefficient.
Eigen::MatrixXd fit_operator(int length, int order) {
    const int h = length / 2;
    Eigen::MatrixXd a(length, order + 1);
    for (int i = 0; i < length; ++i) {
        double v = 1.0;
        for (int j = 0; j <= order; ++j) {
            a(i, j) = v;
            v *= static_cast<double>(i - h);
        }
    }
    return a.colPivHouseholderQr().solve(Eigen::MatrixXd::Identity(length, length));
}

std::vector<double> weights_at(const Eigen::MatrixXd& fit, double t) {
    Eigen::RowVectorXd powers(fit.rows());
    double v = 1.0;
    for (Eigen::Index j = 0; j < fit.rows(); ++j) {
        powers(j) = v;
        v *= t;
    }
    const Eigen::RowVectorXd w = powers * fit;
    return {w.data(), w.data() + w.size()};
}

}  // namespace

SgKernel sg_coefficients(int length, int order) {
    if (order < 0) throw InvalidGeometry("SG order must be >= 0");
    if (length % 2 == 0 || length <= order) {
        throw InvalidGeometry("SG length " + std::to_string(length) + " must be odd and greater than order " +
                              std::to_string(order));
    }
    const auto fit = fit_operator(length, order);
    SgKernel k;
    k.length = length;
    k.order = order;
    k.coeffs = weights_at(fit, 0.0);
    // symmetrise away the QR round-off so the invariant holds bit-for-bit
    for (int i = 0; i < length / 2; ++i) {
        const double m = 0.5 * (k.coeffs[static_cast<std::size_t>(i)] + k.coeffs[static_cast<std::size_t>(length - 1 - i)]);
        k.coeffs[static_cast<std::size_t>(i)] = k.coeffs[static_cast<std::size_t>(length - 1 - i)] = m;
    }
    for (int p = 0; p < k.half(); ++p) k.edge_weights.push_back(weights_at(fit, static_cast<double>(p - k.half())));
    return k;
}

const SgKernel& cached_sg_kernel(int length, int order) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<SgKernel>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[{length, order}];
    if (!slot) slot = std::make_unique<SgKernel>(sg_coefficients(length, order));
    return *slot;
}

Signal sg_apply(const Signal& signal, const SgKernel& kernel) {
    if (signal.size() < kernel.length) {
        throw SignalTooShort("signal of " + std::to_string(signal.size()) + " samples is shorter than SG length " +
                             std::to_string(kernel.length));
    }
    return Signal{kernels::omp::sg_convolve(signal.view(), kernel), signal.fs};
}

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
class R2cPlans {
public:
    fftw_plan plan_for(int n) {
        std::lock_guard lock(mu_);
        auto it = plans_.find(n);
        if (it != plans_.end()) return it->second;
        double* in = fftw_alloc_real(static_cast<std::size_t>(n));
        fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
        fftw_plan p = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
        fftw_free(in);
        fftw_free(out);
        plans_.emplace(n, p);
        return p;
    }

    ~R2cPlans() {
        for (auto& [_, p] : plans_) fftw_destroy_plan(p);
    }

private:
    std::mutex mu_;
    std::map<int, fftw_plan> plans_;
};

R2cPlans& plans() {
    static R2cPlans instance;
    return instance;
}

struct FftwDeleter {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

}  // namespace

double estimate_snr(const Signal& signal, double cutoff_hz) {
    require_valid(signal);
    if (signal.size() < 8) throw SignalTooShort("SNR estimation needs at least 8 samples");
    if (!(cutoff_hz < signal.fs / 2.0)) throw CutoffAboveNyquist("SNR cutoff must lie below fs/2");

    const int n = static_cast<int>(signal.size());
    const int bins = n / 2 + 1;
    std::unique_ptr<double, FftwDeleter> in(fftw_alloc_real(static_cast<std::size_t>(n)));
    std::unique_ptr<fftw_complex, FftwDeleter> out(fftw_alloc_complex(static_cast<std::size_t>(bins)));
    std::copy(signal.samples.begin(), signal.samples.end(), in.get());
    fftw_execute_dft_r2c(plans().plan_for(n), in.get(), out.get());

    // Parseval over the one-sided spectrum; interior bins stand for their
    // negative-frequency mirror as well.
    double low = 0.0, high = 0.0;
    for (int k = 1; k < bins; ++k) {
        const double re = out.get()[k][0], im = out.get()[k][1];
        const bool mirrored = !(n % 2 == 0 && k == n / 2);
        const double e = (re * re + im * im) * (mirrored ? 2.0 : 1.0);
        const double f = static_cast<double>(k) * signal.fs / n;
        (f < cutoff_hz ? low : high) += e;
    }
    // FFT round-off leaves ~1e-30 relative energy in empty bins
    if (high <= 1e-20 * (low + high) || high == 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(low / high);
}

const char* stop_reason_name(StopReason r) noexcept {
    switch (r) {
        case StopReason::TargetReached: return "target";
        case StopReason::NoImprovement: return "no_improvement";
        case StopReason::MaxLength: return "max_length";
        case StopReason::Fixed: return "fixed";
    }
    return "?";
}

int effective_sg_order(int length, int order) noexcept { return std::min(order, length - 1); }

AdaptiveFilterResult adaptive_filter(const Signal& signal, const DelineationParams& params) {
    require_valid(signal);
    auto filter_at = [&](int len) { return sg_apply(signal, cached_sg_kernel(len, effective_sg_order(len, params.sg_order))); };

    AdaptiveFilterResult res;
    if (params.fixed_sg_len > 0) {
        res.filtered = filter_at(params.fixed_sg_len);
        res.length = params.fixed_sg_len;
        res.reason = StopReason::Fixed;
        res.trace.push_back({res.length, estimate_snr(res.filtered, params.snr_cutoff_hz)});
        return res;
    }

    for (int len = params.sg_len_start;; len += params.sg_len_step) {
        Signal candidate = filter_at(len);
        const double snr = estimate_snr(candidate, params.snr_cutoff_hz);
        const bool has_prev = !res.trace.empty();
        const double prev = has_prev ? res.trace.back().snr : 0.0;
        res.trace.push_back({len, snr});
        res.filtered = std::move(candidate);
        res.length = len;
        if (snr >= params.snr_thr) {
            res.reason = StopReason::TargetReached;
            break;
        }
        if (has_prev && prev > 0.0 && (snr - prev) / prev < params.snr_impr_thr) {
            res.reason = StopReason::NoImprovement;
            break;
        }
        if (len + params.sg_len_step > params.sg_len_max) {
            res.reason = StopReason::MaxLength;
            break;
        }
    }
    return res;
}

}  // namespace icg
