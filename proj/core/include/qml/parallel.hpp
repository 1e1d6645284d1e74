#pragma once

#include <functional>

namespace qml {

/// Worker count: QML_THREADS when set to a positive integer, else the
/// hardware concurrency (at least 1).
int worker_count();

/// Runs body(i) for i in [begin, end) on up to worker_count() threads.
/// The first exception thrown by any call is rethrown after all workers stop.
void parallel_for(int begin, int end, const std::function<void(int)>& body);

}  // namespace qml
