// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <functional>

namespace asearch {

/// Runs fn(0..count-1) across up to `jobs` worker threads. jobs <= 0 means
/// hardware concurrency. Workers pull indices from a shared counter; callers
/// that need deterministic output must write results into per-index slots.
/// The first exception thrown by any worker is rethrown on the calling
/// thread after all workers join.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

/// Resolved worker count for a `--jobs` style argument.
int effective_jobs(int jobs);

}  // namespace asearch
