#include "pphi2/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace pphi2::fft {

namespace {

// Plans are created unaligned + in-place so they can execute on any buffer of
// the right length via fftw_execute_dft.
class PlanCache {
  public:
    fftw_plan get(int n, int howmany, int stride, int dist, int sign) {
        std::lock_guard<std::mutex> lock(mu_);
        auto key = std::make_tuple(n, howmany, stride, dist, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<fftw_complex> buf(static_cast<size_t>(n) * howmany * stride);
        int nn[1] = {n};
        fftw_plan p = fftw_plan_many_dft(1, nn, howmany, buf.data(), nullptr, stride, dist,
                                         buf.data(), nullptr, stride, dist, sign,
                                         FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, p);
        return p;
    }

  private:
    std::mutex mu_;
    std::map<std::tuple<int, int, int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

void run(fftw_plan p, std::complex<double>* data) {
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data), reinterpret_cast<fftw_complex*>(data));
}

}  // namespace

void transform_rows(std::complex<double>* data, int rows, int cols, int sign) {
    // each row: length cols, stride 1, consecutive rows cols apart
    fftw_plan p = cache().get(cols, rows, 1, cols, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
    run(p, data);
}

void transform_cols(std::complex<double>* data, int rows, int cols, int sign) {
    // each column: length rows, stride cols, consecutive columns 1 apart
    fftw_plan p = cache().get(rows, cols, cols, 1, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
    run(p, data);
}

void transform(std::complex<double>* data, int n, int sign) {
    fftw_plan p = cache().get(n, 1, 1, 1, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
    run(p, data);
}

}  // namespace pphi2::fft
