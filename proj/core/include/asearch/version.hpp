// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

namespace asearch {

inline constexpr const char* kToolVersion = "0.1.0";

// Bumped whenever any on-disk format changes incompatibly. Readers reject
// files whose schema version does not match.
inline constexpr int kSchemaVersion = 1;

}  // namespace asearch
