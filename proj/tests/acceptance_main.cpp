#include <cstdio>

#include "mindet/acceptance.hpp"

int main() {
    int failures = 0;
    for (const auto& r : mindet::run_acceptance()) {
        if (!r.pass) ++failures;
        std::printf("criterion %2d %-4s %-66s [%6.1fs] %s\n", r.number,
                    r.pass ? "PASS" : "FAIL", r.title.c_str(), r.seconds,
                    r.detail.c_str());
    }
    if (failures > 0) std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
