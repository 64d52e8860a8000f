// Compares the serial reference kernels against their OpenMP counterparts on
// sized-up workloads, verifying bitwise-identical results while timing both.
// Usage: bench_kernels [scale]   (scale >= 1 multiplies the workload sizes)

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "topsim/kernels.hpp"
#include "topsim/ultra.hpp"

using namespace topsim;

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename F>
double best_of_ms(F&& fn, int reps = 3) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        fn();
        double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
        best = std::min(best, ms);
    }
    return best;
}

bool same_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            bool na = std::isnan(a(i, j)), nb = std::isnan(b(i, j));
            if (na != nb) return false;
            if (!na && a(i, j) != b(i, j)) return false;
        }
    return true;
}

bool same_ultras(const std::vector<Ultrametric>& a,
                 const std::vector<Ultrametric>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!same_matrix(a[i].d, b[i].d) ||
            a[i].spectrum_values != b[i].spectrum_values ||
            a[i].provenance != b[i].provenance)
            return false;
    return true;
}

void report(const std::string& name, double serial_ms, double parallel_ms,
            bool identical) {
    std::cout << std::left << std::setw(26) << name << std::right
              << std::fixed << std::setprecision(1) << std::setw(10)
              << serial_ms << " ms" << std::setw(10) << parallel_ms << " ms"
              << std::setw(8) << std::setprecision(2)
              << serial_ms / std::max(parallel_ms, 1e-9) << "x   "
              << (identical ? "identical" : "MISMATCH") << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    int scale = argc > 1 ? std::max(1, std::atoi(argv[1])) : 1;
#ifdef _OPENMP
    std::cout << "OpenMP threads: " << omp_get_max_threads() << "\n";
#else
    std::cout << "OpenMP not enabled; both variants run serially\n";
#endif
    std::cout << std::left << std::setw(26) << "kernel" << std::right
              << std::setw(13) << "serial" << std::setw(13) << "parallel"
              << std::setw(9) << "speedup" << "   result\n";
    bool all_ok = true;
    std::mt19937_64 rng(2024);

    // 1. Per-structure harmonic-ultrametric extraction on random clouds.
    {
        std::vector<PointCloud> clouds;
        const int n_clouds = 48 * scale;
        for (int c = 0; c < n_clouds; ++c) {
            PointCloud cloud;
            int n = 24 + static_cast<int>(rng() % 6);
            for (int i = 0; i < n; ++i)
                cloud.points.emplace_back(3.0 * uniform01(rng),
                                          3.0 * uniform01(rng),
                                          3.0 * uniform01(rng));
            clouds.push_back(std::move(cloud));
        }
        StageParams params;
        params.kind = ComplexKind::VR;
        params.threshold = 1.25;
        params.p = 1;
        params.metric = MetricKind::L1;
        params.kmax_dim = 2;
        std::vector<Ultrametric> serial, parallel;
        double s_ms = best_of_ms(
            [&] { serial = structure_ultrametrics_serial(clouds, params); });
        double p_ms = best_of_ms([&] {
            parallel = structure_ultrametrics_parallel(clouds, params);
        });
        bool ok = same_ultras(serial, parallel);
        all_ok = all_ok && ok;
        report("structure_ultrametrics", s_ms, p_ms, ok);
    }

    // 2. Pairwise u_GH matrix over moderately sized ultrametric spaces.
    {
        std::vector<Ultrametric> spaces;
        const int n_spaces = 40 * scale;
        for (int s = 0; s < n_spaces; ++s) {
            int n = 20 + static_cast<int>(rng() % 21);
            Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    D(i, j) = D(j, i) = 0.1 + uniform01(rng);
            spaces.push_back(subdominant_ultrametric(D, "bench"));
        }
        Eigen::MatrixXd serial, parallel;
        double s_ms = best_of_ms([&] { serial = cross_ugh_serial(spaces); });
        double p_ms =
            best_of_ms([&] { parallel = cross_ugh_parallel(spaces); });
        bool ok = same_matrix(serial, parallel);
        all_ok = all_ok && ok;
        report("cross_ugh", s_ms, p_ms, ok);
    }

    // 3. Nearest-centroid assignment on a large feature matrix.
    {
        const int n = 300000 * scale, dim = 8, k = 24;
        Eigen::MatrixXd X(n, dim), C(k, dim);
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            for (int d = 0; d < dim; ++d) X(i, d) = uniform01(rng);
        for (int c = 0; c < k; ++c)
            for (int d = 0; d < dim; ++d) C(c, d) = uniform01(rng);
        std::vector<int> serial, parallel;
        double s_ms =
            best_of_ms([&] { serial = assign_clusters_serial(X, C); });
        double p_ms =
            best_of_ms([&] { parallel = assign_clusters_parallel(X, C); });
        bool ok = serial == parallel;
        all_ok = all_ok && ok;
        report("assign_clusters", s_ms, p_ms, ok);
    }

    if (!all_ok) {
        std::cout << "FAILURE: serial and parallel kernels disagree\n";
        return 1;
    }
    return 0;
}
