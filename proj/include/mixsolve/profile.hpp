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

#pragma once

#include <chrono>
#include <map>
#include <string>

namespace mixsolve {

enum class Bucket { Compute, Overlap, Comm };

struct StageTimes {
  double compute_s = 0.0;
  double overlap_s = 0.0;
  double comm_s = 0.0;
  double wall_s = 0.0;
  std::size_t bytes = 0;
};

/// Per-rank stage timer. Time between two bucket changes is charged to the
/// bucket that was active, so the buckets of a stage add up to its wall time.
class Profiler {
 public:
  void begin_stage(const std::string& name, Bucket b = Bucket::Compute);
  void bucket(Bucket b);
  void add_bytes(std::size_t n);
  void end_stage();
  const std::map<std::string, StageTimes>& stages() const { return stages_; }

 private:
  using Clock = std::chrono::steady_clock;
  void charge(Clock::time_point now);

  std::map<std::string, StageTimes> stages_;
  std::string current_;
  bool active_ = false;
  Bucket bucket_ = Bucket::Compute;
  Clock::time_point stage_start_, last_;
};

/// Profiler of the calling rank context, or null.
Profiler* current_profiler();
void set_current_profiler(Profiler* p);

inline void profile_bucket(Bucket b) {
  if (Profiler* p = current_profiler()) p->bucket(b);
}
inline void profile_bytes(std::size_t n) {
  if (Profiler* p = current_profiler()) p->add_bytes(n);
}

}  // namespace mixsolve
