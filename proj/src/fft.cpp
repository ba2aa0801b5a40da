#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace pba::detail {
namespace {

// FFTW's planner is not thread-safe; execution of an existing plan on new
// arrays is.
std::mutex g_plan_mutex;

struct PlanCache {
    std::map<std::tuple<std::vector<int>, bool>, fftw_plan> plans;
    ~PlanCache() {
        for (auto& [key, plan] : plans)
            fftw_destroy_plan(plan);
    }
};

fftw_plan plan_for(const std::vector<int>& dims, bool inverse) {
    static PlanCache cache;
    std::lock_guard lock(g_plan_mutex);
    const auto key = std::make_tuple(dims, inverse);
    if (auto it = cache.plans.find(key); it != cache.plans.end())
        return it->second;
    std::size_t total = 1;
    for (int d : dims)
        total *= static_cast<std::size_t>(d);
    cvec a(total), b(total);
    fftw_plan p = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(),
                                reinterpret_cast<fftw_complex*>(a.data()),
                                reinterpret_cast<fftw_complex*>(b.data()),
                                inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (p == nullptr)
        throw std::runtime_error("fftw: failed to create plan");
    cache.plans.emplace(key, p);
    return p;
}

cvec execute(std::span<const std::complex<double>> in, const std::vector<int>& dims, bool inverse) {
    cvec src(in.begin(), in.end());
    cvec out(in.size());
    if (in.empty()) return out;
    fftw_execute_dft(plan_for(dims, inverse), reinterpret_cast<fftw_complex*>(src.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

}  // namespace

cvec fft(std::span<const std::complex<double>> in, bool inverse) {
    return execute(in, {static_cast<int>(in.size())}, inverse);
}

cvec fft_real(std::span<const double> in) {
    const cvec c(in.begin(), in.end());
    return fft(c, false);
}

cvec fftn(std::span<const std::complex<double>> in, std::span<const int> dims, bool inverse) {
    std::size_t total = 1;
    for (int d : dims)
        total *= static_cast<std::size_t>(d);
    if (total != in.size())
        throw std::invalid_argument("fftn: dims do not match input size");
    return execute(in, std::vector<int>(dims.begin(), dims.end()), inverse);
}

}  // namespace pba::detail
