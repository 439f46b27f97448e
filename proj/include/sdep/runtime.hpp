#pragma once

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace sdep {

/// Matching allocates and frees several sample-sized buffers per benchmark
/// replication. With glibc defaults each of those round-trips through mmap
/// or heap trimming, and page faults then cost about a third of the run time.
/// Executables call this once at startup; it is a no-op elsewhere.
inline void keep_freed_memory() {
#if defined(__GLIBC__)
    mallopt(M_MMAP_THRESHOLD, 256 << 20);
    mallopt(M_TRIM_THRESHOLD, 512 << 20);
#endif
}

}  // namespace sdep
