#include "poh/clock.hpp"

#include <chrono>

namespace poh {

Micros WallClock::now() const {
    return static_cast<Micros>(
        std::chrono::duration_cast<std::chrono::microseconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count());
}

}  // namespace poh
