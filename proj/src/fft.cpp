#include "agile_afdm/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace agile_afdm::fft {
namespace {

struct PlanCache {
    std::mutex mu;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans;

    ~PlanCache() {
        for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t n, int sign) {
        std::lock_guard lock(mu);
        auto it = plans.find({n, sign});
        if (it != plans.end()) return it->second;
        // In-place plan; the scratch buffer only exists for planning.
        fftw_complex* buf = fftw_alloc_complex(n);
        fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buf);
        plans.emplace(std::make_pair(n, sign), p);
        return p;
    }
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

void run(CVec& data, int sign) {
    if (data.empty()) return;
    fftw_plan p = cache().get(data.size(), sign);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(p, ptr, ptr);
}

}  // namespace

CVec forward(std::span<const cplx> x) {
    CVec out(x.begin(), x.end());
    run(out, FFTW_FORWARD);
    return out;
}

CVec inverse(std::span<const cplx> X) {
    CVec out(X.begin(), X.end());
    run(out, FFTW_BACKWARD);
    return out;
}

void forward_inplace(CVec& x) { run(x, FFTW_FORWARD); }
void inverse_inplace(CVec& x) { run(x, FFTW_BACKWARD); }

}  // namespace agile_afdm::fft
