// Acceptance runner: prints one PASS/FAIL line per criterion and exits
// nonzero on any failure. `acceptance N` runs a single criterion.

#include <restproj/acceptance.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>

int main(int argc, char** argv) {
    std::optional<int> only;
    if (argc > 1) {
        const int id = std::atoi(argv[1]);
        if (id < 1 || id > 10) {
            std::cerr << "usage: acceptance [criterion 1..10]\n";
            return 2;
        }
        only = id;
    }
    return restproj::acceptance::run_acceptance(std::cout, only) ? 0 : 1;
}
