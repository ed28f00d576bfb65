#include <benchmark/benchmark.h>

// The distro's benchmark_main archive is LTO-only, so provide main here.
BENCHMARK_MAIN();
