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

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace mixsolve {

struct TransportError : std::runtime_error {
  TransportError(const std::string& what, int peer) : std::runtime_error(what), peer(peer) {}
  int peer;
};

struct StallError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class EventKind { Pack, Send, Recv, Reset, Shuffle, Unpack };
const char* to_string(EventKind k);

struct Event {
  int rank;
  EventKind kind;
  int block;
  std::size_t bytes;
  std::uint64_t seq;
};

class EventLog {
 public:
  void record(int rank, EventKind kind, int block, std::size_t bytes);
  std::vector<Event> events() const;
  void clear();

 private:
  mutable std::mutex mutex_;
  std::vector<Event> events_;
  std::uint64_t seq_ = 0;
};

/// A strided 3D region of doubles: `run` contiguous doubles, repeated
/// count[0] times `stride[0]` apart, the whole repeated count[1] times `stride[1]` apart.
struct StridedBlock {
  const double* base = nullptr;
  std::size_t run = 0;
  std::array<std::size_t, 2> count{};
  std::array<std::size_t, 2> stride{};
  std::size_t doubles() const { return run * count[0] * count[1]; }
};

/// Point-to-point message passing between rank contexts.
class Transport {
 public:
  using Request = int;
  virtual ~Transport() = default;

  virtual int rank() const = 0;
  virtual int size() const = 0;
  virtual Request post_send(int dst, int tag, const double* data, std::size_t n) = 0;
  /// Send described by a stride pattern; the transport gathers from the source directly.
  virtual Request post_send(int dst, int tag, const StridedBlock& block) = 0;
  virtual Request post_recv(int src, int tag, double* buffer, std::size_t n) = 0;
  /// Completes what can be completed among `pending`, returns the completed subset.
  virtual std::vector<Request> test_some(const std::vector<Request>& pending) = 0;
  virtual void wait_all(const std::vector<Request>& pending) = 0;
  virtual void barrier() = 0;
  virtual int locality_hint(int rank) const = 0;
  /// Blocks until a message may have arrived for this rank, or the timeout expires.
  virtual void wait_for_activity(std::chrono::microseconds timeout) = 0;

  virtual void record(EventKind kind, int block, std::size_t bytes) = 0;
  /// Bytes handed to post_send from caller-owned contiguous buffers.
  virtual std::size_t staged_send_bytes() const = 0;
  virtual std::size_t peak_staged_send_bytes() const = 0;
};

struct TransportOptions {
  bool adversarial = false;  // randomly withhold deliveries and delay send completion
  std::uint64_t seed = 0;
  EventLog* log = nullptr;
  long stall_bound = 1'000'000;  // progress-free iterations tolerated by wait_all
};

class InProcessHub;

/// Runs `fn` on `nranks` simulated ranks, each on its own thread with its own
/// endpoint of a shared in-process transport. Rethrows the first failure.
void run_ranks(int nranks, const TransportOptions& options,
               const std::function<void(Transport&)>& fn);

/// Collective max over all ranks.
double allreduce_max(Transport& t, double value, int tag = 1 << 30);

}  // namespace mixsolve
