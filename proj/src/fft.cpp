#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

namespace phasepath::detail {
namespace {

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_plan plan_for(std::size_t n, FftDirection direction) {
    static std::map<std::pair<std::size_t, int>, PlanHandle> cache;
    const int sign = direction == FftDirection::forward ? FFTW_FORWARD : FFTW_BACKWARD;
    std::lock_guard lock(planner_mutex());
    auto& slot = cache[{n, sign}];
    if (!slot) {
        std::vector<std::complex<double>> scratch(n);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        slot.reset(fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED));
    }
    return slot.get();
}

}  // namespace

void fft_inplace(std::span<std::complex<double>> data, FftDirection direction) {
    if (data.empty()) return;
    fftw_plan plan = plan_for(data.size(), direction);
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, buf, buf);
}

}  // namespace phasepath::detail
