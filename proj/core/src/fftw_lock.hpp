// FFTW's planner is not thread-safe; every plan create/destroy in this
// library goes through this one mutex.
#pragma once

#include <mutex>

namespace phi4::detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace phi4::detail
