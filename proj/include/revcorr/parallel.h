// Copyright 2026 The revcorr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef REVCORR_PARALLEL_H_
#define REVCORR_PARALLEL_H_

#include <functional>

namespace revcorr {

// Worker count set by SetDefaultWorkers, else REVCORR_WORKERS, else the
// hardware concurrency.
int DefaultWorkers();
// Process-wide override; 0 clears it.
void SetDefaultWorkers(int workers);

// Calls fn(i) for i in [0, n) on up to `workers` threads. Work items must
// write to disjoint outputs; the first exception thrown is rethrown after
// all threads have joined.
void ParallelFor(int n, int workers, const std::function<void(int)>& fn);

}  // namespace revcorr

#endif  // REVCORR_PARALLEL_H_
