#include <cstdio>

#include "cejulia/version.hpp"

int main() {
    std::printf("cejulia %s\n", cejulia::kVersion);
    return 0;
}
