#pragma once
#include <functional>

namespace mtype {

// Worker budget shared by verification loops; 0 or less means hardware concurrency.
void set_jobs(int jobs);
int jobs();
// Runs body(i) for i in [0, n) on up to jobs() threads. Bodies must not share mutable state.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace mtype
