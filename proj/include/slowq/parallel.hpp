#pragma once

#include <functional>

namespace slowq {

/// Worker cap: SLOWDOWN_THREADS when set, otherwise all hardware threads.
int thread_budget();

/// Runs body(0..n-1) on up to thread_budget() workers. The body must write
/// only to per-index slots so results stay deterministic.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace slowq
