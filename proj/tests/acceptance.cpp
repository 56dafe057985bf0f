#include <cstdio>

#include "fermi/verification.hpp"

int main() {
    int failed = 0;
    for (const auto& r : fermi::verify::acceptance_suite()) {
        std::printf("%s criterion %2d (%s): %s [%.2f s]\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                    r.detail.c_str(), r.seconds);
        if (!r.passed) ++failed;
    }
    std::printf("%d of 12 criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
