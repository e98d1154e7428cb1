/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The vssa-elastography Authors. All rights reserved.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef VSSA_PARALLEL_HPP
#define VSSA_PARALLEL_HPP

#include <functional>

namespace vssa {

/// Worker count: VSSA_THREADS if set and positive, else hardware concurrency.
int thread_count();
/// Overrides the worker count for this process (0 restores the default).
void set_thread_count(int n);

/// Runs fn(i) for i in [0, n) over contiguous static blocks. Each index is
/// visited exactly once, so results that are written per index are identical
/// for any worker count.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace vssa

#endif  // VSSA_PARALLEL_HPP
