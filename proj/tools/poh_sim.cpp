#include <cstdio>

int main() {
    std::puts("poh-sim placeholder");
    return 0;
}
