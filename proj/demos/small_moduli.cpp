// Prints exact and heuristic Delta(N) for small moduli next to the
// Rademacher-Menshov ceiling, then the first few scanned prime pairs.

#include <cstdio>

#include "charmax/charmax.hpp"

int main() {
    using namespace charmax;
    std::printf("%4s %12s %12s %6s\n", "N", "exact", "heuristic", "ceil");
    for (u64 N = 3; N <= 8; ++N) {
        double exact = delta_exact_small(N).value;
        double heur = delta_heuristic(N).value;
        std::printf("%4llu %12.6f %12.6f %6.0f\n", static_cast<unsigned long long>(N), exact, heur,
                    rm_upper_bound(N).value);
    }
    std::printf("\nprime pairs p <= 200:\n");
    for (const auto& pp : scan_fouvry_primes(200, 1.0, 0.6687))
        std::printf("  p=%llu q=%llu exponent=%.4f\n", static_cast<unsigned long long>(pp.p),
                    static_cast<unsigned long long>(pp.q), pp.ratio_exponent);
}
