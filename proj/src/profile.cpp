// Copyright 2026 The mixsolve Authors
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

#include "mixsolve/profile.hpp"

namespace mixsolve {

namespace {
thread_local Profiler* t_profiler = nullptr;
}

Profiler* current_profiler() { return t_profiler; }
void set_current_profiler(Profiler* p) { t_profiler = p; }

void Profiler::charge(Clock::time_point now) {
  const double dt = std::chrono::duration<double>(now - last_).count();
  StageTimes& s = stages_[current_];
  switch (bucket_) {
    case Bucket::Compute: s.compute_s += dt; break;
    case Bucket::Overlap: s.overlap_s += dt; break;
    case Bucket::Comm: s.comm_s += dt; break;
  }
  last_ = now;
}

void Profiler::begin_stage(const std::string& name, Bucket b) {
  if (active_) end_stage();
  current_ = name;
  active_ = true;
  bucket_ = b;
  stage_start_ = last_ = Clock::now();
}

void Profiler::bucket(Bucket b) {
  if (!active_) return;
  charge(Clock::now());
  bucket_ = b;
}

void Profiler::add_bytes(std::size_t n) {
  if (active_) stages_[current_].bytes += n;
}

void Profiler::end_stage() {
  if (!active_) return;
  const auto now = Clock::now();
  charge(now);
  stages_[current_].wall_s += std::chrono::duration<double>(now - stage_start_).count();
  active_ = false;
}

}  // namespace mixsolve
