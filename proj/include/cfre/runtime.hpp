// Copyright 2026 The CFRE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

namespace cfre {

// Keeps freed heap memory in the process instead of returning it to the OS
// after every large temporary. Batch evaluations allocate and free
// multi-megabyte arrays per RK4 stage; without this, glibc trims and the
// kernel re-zeroes those pages on every stage. No-op on other C libraries.
void tune_allocator();

}  // namespace cfre
