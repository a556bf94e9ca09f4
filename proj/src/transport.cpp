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

#include "mixsolve/transport.hpp"

#include <algorithm>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <exception>
#include <map>
#include <random>
#include <thread>
#include <tuple>

namespace mixsolve {

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::Pack: return "pack";
    case EventKind::Send: return "send";
    case EventKind::Recv: return "recv";
    case EventKind::Reset: return "reset";
    case EventKind::Shuffle: return "shuffle";
    case EventKind::Unpack: return "unpack";
  }
  return "?";
}

void EventLog::record(int rank, EventKind kind, int block, std::size_t bytes) {
  std::lock_guard<std::mutex> lock(mutex_);
  events_.push_back({rank, kind, block, bytes, seq_++});
}

std::vector<Event> EventLog::events() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return events_;
}

void EventLog::clear() {
  std::lock_guard<std::mutex> lock(mutex_);
  events_.clear();
  seq_ = 0;
}

struct AbortError : std::runtime_error {
  AbortError() : std::runtime_error("another rank failed") {}
};

class InProcessHub {
 public:
  InProcessHub(int n, const TransportOptions& opt) : n_(n), opt_(opt), arrivals_(n, 0) {}

  using Key = std::tuple<int, int, int>;  // src, dst, tag

  void push(int src, int dst, int tag, std::vector<double>&& payload) {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      queues_[{src, dst, tag}].push_back(std::move(payload));
      ++arrivals_[dst];
    }
    cv_.notify_all();
  }

  // Pops the oldest message on the key into `out`; returns false if none.
  bool pop(int src, int dst, int tag, std::vector<double>& out) {
    std::lock_guard<std::mutex> lock(mutex_);
    check_abort();
    auto it = queues_.find({src, dst, tag});
    if (it == queues_.end() || it->second.empty()) return false;
    out = std::move(it->second.front());
    it->second.pop_front();
    return true;
  }

  void wait_arrival(int rank, std::uint64_t& seen, std::chrono::microseconds timeout) {
    std::unique_lock<std::mutex> lock(mutex_);
    cv_.wait_for(lock, timeout, [&] { return aborted_ || arrivals_[rank] != seen; });
    check_abort();
    seen = arrivals_[rank];
  }

  void barrier() {
    std::unique_lock<std::mutex> lock(mutex_);
    check_abort();
    const std::uint64_t gen = barrier_gen_;
    if (++barrier_count_ == n_) {
      barrier_count_ = 0;
      ++barrier_gen_;
      cv_.notify_all();
      return;
    }
    cv_.wait(lock, [&] { return aborted_ || barrier_gen_ != gen; });
    check_abort();
  }

  void abort() {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      aborted_ = true;
    }
    cv_.notify_all();
  }

  int size() const { return n_; }
  const TransportOptions& options() const { return opt_; }

 private:
  void check_abort() const {
    if (aborted_) throw AbortError();
  }

  int n_;
  TransportOptions opt_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::map<Key, std::deque<std::vector<double>>> queues_;
  std::vector<std::uint64_t> arrivals_;
  int barrier_count_ = 0;
  std::uint64_t barrier_gen_ = 0;
  bool aborted_ = false;
};

namespace {

class InProcessTransport final : public Transport {
 public:
  InProcessTransport(InProcessHub& hub, int rank)
      : hub_(hub), rank_(rank), rng_(hub.options().seed * 1000003ULL + rank + 1) {}

  int rank() const override { return rank_; }
  int size() const override { return hub_.size(); }

  Request post_send(int dst, int tag, const double* data, std::size_t n) override {
    check_peer(dst);
    staged_ += n * sizeof(double);
    outstanding_staged_ += n * sizeof(double);
    peak_staged_ = std::max(peak_staged_, outstanding_staged_);
    hub_.push(rank_, dst, tag, std::vector<double>(data, data + n));
    return new_request(Req::Kind::Send, dst, tag, nullptr, n, n * sizeof(double));
  }

  Request post_send(int dst, int tag, const StridedBlock& b) override {
    check_peer(dst);
    std::vector<double> payload(b.doubles());
    double* out = payload.data();
    for (std::size_t j = 0; j < b.count[1]; ++j)
      for (std::size_t i = 0; i < b.count[0]; ++i) {
        const double* src = b.base + j * b.stride[1] + i * b.stride[0];
        std::memcpy(out, src, b.run * sizeof(double));
        out += b.run;
      }
    const std::size_t n = payload.size();
    hub_.push(rank_, dst, tag, std::move(payload));
    return new_request(Req::Kind::Send, dst, tag, nullptr, n, 0);
  }

  Request post_recv(int src, int tag, double* buffer, std::size_t n) override {
    check_peer(src);
    const Request id = new_request(Req::Kind::Recv, src, tag, buffer, n, 0);
    pending_recv_[{src, tag}].push_back(id);
    return id;
  }

  std::vector<Request> test_some(const std::vector<Request>& pending) override {
    std::vector<Request> done;
    const bool adv = hub_.options().adversarial;
    for (Request id : pending) {
      Req& r = reqs_.at(id);
      if (r.done) {
        done.push_back(id);
        continue;
      }
      if (r.kind == Req::Kind::Send) {
        if (adv && r.delay > 0) {
          --r.delay;
          continue;
        }
        r.done = true;
        outstanding_staged_ -= r.staged;
        done.push_back(id);
        continue;
      }
      auto& order = pending_recv_[{r.peer, r.tag}];
      if (order.empty() || order.front() != id) continue;  // older receive on the same pair first
      if (adv && coin_(rng_) < 0.5) continue;
      if (!hub_.pop(r.peer, rank_, r.tag, scratch_)) continue;
      if (scratch_.size() != r.n)
        throw TransportError("message from rank " + std::to_string(r.peer) + " has " +
                                 std::to_string(scratch_.size()) + " doubles, expected " +
                                 std::to_string(r.n),
                             r.peer);
      std::copy(scratch_.begin(), scratch_.end(), r.buffer);
      order.pop_front();
      r.done = true;
      done.push_back(id);
    }
    return done;
  }

  void wait_all(const std::vector<Request>& pending) override {
    std::vector<Request> left = pending;
    long idle = 0;
    while (!left.empty()) {
      const auto done = test_some(left);
      std::vector<Request> next;
      for (Request id : left)
        if (!reqs_.at(id).done) next.push_back(id);
      if (next.size() == left.size()) {
        if (++idle > hub_.options().stall_bound)
          throw StallError("rank " + std::to_string(rank_) + ": wait_all made no progress");
        wait_for_activity(std::chrono::microseconds(200));
      } else {
        idle = 0;
      }
      left.swap(next);
    }
  }

  void barrier() override { hub_.barrier(); }
  int locality_hint(int) const override { return 0; }

  void wait_for_activity(std::chrono::microseconds timeout) override {
    // in adversarial mode withheld messages are already queued, so do not sleep on them
    if (hub_.options().adversarial) {
      std::this_thread::yield();
      return;
    }
    hub_.wait_arrival(rank_, seen_arrivals_, timeout);
  }

  void record(EventKind kind, int block, std::size_t bytes) override {
    if (hub_.options().log) hub_.options().log->record(rank_, kind, block, bytes);
  }

  std::size_t staged_send_bytes() const override { return staged_; }
  std::size_t peak_staged_send_bytes() const override { return peak_staged_; }

 private:
  struct Req {
    enum class Kind { Send, Recv } kind;
    int peer;
    int tag;
    double* buffer;
    std::size_t n;
    std::size_t staged;
    int delay = 0;
    bool done = false;
  };

  Request new_request(Req::Kind kind, int peer, int tag, double* buffer, std::size_t n,
                      std::size_t staged) {
    Req r{kind, peer, tag, buffer, n, staged};
    if (hub_.options().adversarial && kind == Req::Kind::Send) r.delay = int(rng_() % 4);
    reqs_.push_back(r);
    return Request(reqs_.size() - 1);
  }

  void check_peer(int peer) const {
    if (peer < 0 || peer >= size())
      throw TransportError("invalid peer rank " + std::to_string(peer), peer);
  }

  InProcessHub& hub_;
  int rank_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> coin_{0.0, 1.0};
  std::deque<Req> reqs_;
  std::map<std::pair<int, int>, std::deque<Request>> pending_recv_;
  std::vector<double> scratch_;
  std::uint64_t seen_arrivals_ = 0;
  std::size_t staged_ = 0, outstanding_staged_ = 0, peak_staged_ = 0;
};

}  // namespace

void run_ranks(int nranks, const TransportOptions& options,
               const std::function<void(Transport&)>& fn) {
  if (nranks < 1) throw std::invalid_argument("run_ranks: need at least one rank");
  InProcessHub hub(nranks, options);
  if (nranks == 1) {
    InProcessTransport t(hub, 0);
    fn(t);
    return;
  }
  std::vector<std::exception_ptr> errors(nranks);
  std::vector<std::thread> threads;
  threads.reserve(nranks);
  for (int r = 0; r < nranks; ++r)
    threads.emplace_back([&, r] {
      try {
        InProcessTransport t(hub, r);
        fn(t);
      } catch (...) {
        errors[r] = std::current_exception();
        hub.abort();
      }
    });
  for (auto& th : threads) th.join();
  // report the original failure rather than the aborts it caused
  std::exception_ptr first_abort;
  for (auto& e : errors) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const AbortError&) {
      if (!first_abort) first_abort = e;
    } catch (...) {
      throw;
    }
  }
  if (first_abort) std::rethrow_exception(first_abort);
}

double allreduce_max(Transport& t, double value, int tag) {
  const int n = t.size(), me = t.rank();
  if (n == 1) return value;
  if (me == 0) {
    double v = value;
    for (int src = 1; src < n; ++src) {
      double x = 0;
      t.wait_all({t.post_recv(src, tag, &x, 1)});
      v = std::max(v, x);
    }
    std::vector<Transport::Request> reqs;
    for (int dst = 1; dst < n; ++dst) reqs.push_back(t.post_send(dst, tag + 1, &v, 1));
    t.wait_all(reqs);
    return v;
  }
  t.wait_all({t.post_send(0, tag, &value, 1)});
  double v = 0;
  t.wait_all({t.post_recv(0, tag + 1, &v, 1)});
  return v;
}

}  // namespace mixsolve
