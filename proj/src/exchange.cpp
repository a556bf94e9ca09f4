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

#include "mixsolve/exchange.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

#include "mixsolve/profile.hpp"

namespace mixsolve {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::A2A: return "a2a";
    case Strategy::NB: return "nb";
    case Strategy::ISR: return "isr";
  }
  return "?";
}

Strategy parse_strategy(const std::string& s) {
  if (s == "a2a") return Strategy::A2A;
  if (s == "nb") return Strategy::NB;
  if (s == "isr") return Strategy::ISR;
  throw std::invalid_argument("unknown strategy: " + s);
}

FieldBuffer::FieldBuffer(const Topology& t, int r, std::size_t capacity)
    : topo(t), rank(r), data(std::max(capacity, t.local_doubles(r)), 0.0) {}

std::size_t FieldBuffer::offset(int i0, int i1, int i2) const {
  const Box b = box();
  const int a = topo.axis, bb = (a + 1) % 3, c = (a + 2) % 3;
  const std::array<int, 3> i{i0, i1, i2};
  return (std::size_t(i[c]) * b.count[bb] + i[bb]) * line_stride() + std::size_t(i[a]) * topo.nf;
}

SwitchPlan plan_switch(const Topology& src, const Topology& dst, int rank, const SwitchKnobs& knobs,
                       int tag, std::optional<std::array<int, 3>> common) {
  if (knobs.n_send_batch < 1 || knobs.n_send_pending < 1)
    throw std::invalid_argument("plan_switch: batch and pending bounds must be positive");
  SwitchPlan p;
  p.src = src;
  p.dst = dst;
  p.rank = rank;
  p.tag = tag;
  p.knobs = knobs;
  p.common = common.value_or(src.n);
  const auto blocks = common ? intersect_blocks(src, dst, *common) : intersect_blocks(src, dst);
  const int np = src.nranks();
  if (rank < 0 || rank >= np) throw std::out_of_range("plan_switch: rank out of range");
  for (int i = 1; i < np; ++i) p.send_order.push_back((rank + i) % np);

  std::vector<int> pos(np, 0);
  for (std::size_t i = 0; i < p.send_order.size(); ++i) pos[p.send_order[i]] = int(i);
  for (std::size_t id = 0; id < blocks.size(); ++id) {
    const BlockTransfer& b = blocks[id];
    BlockSlot s{int(id), b, 0, 0, b.doubles()};
    if (b.src_rank == rank && b.dst_rank == rank) {
      s.peer = rank;
      p.locals.push_back(s);
    } else if (b.src_rank == rank) {
      s.peer = b.dst_rank;
      p.sends.push_back(s);
    } else if (b.dst_rank == rank) {
      s.peer = b.src_rank;
      p.recvs.push_back(s);
    }
  }
  auto by_order = [&](const BlockSlot& x, const BlockSlot& y) {
    if (pos[x.peer] != pos[y.peer]) return pos[x.peer] < pos[y.peer];
    return x.id < y.id;
  };
  std::stable_sort(p.sends.begin(), p.sends.end(), by_order);
  std::stable_sort(p.recvs.begin(), p.recvs.end(), by_order);
  for (auto& s : p.sends) {
    s.offset = p.send_doubles;
    p.send_doubles += s.doubles;
  }
  for (auto& s : p.recvs) {
    s.offset = p.recv_doubles;
    p.recv_doubles += s.doubles;
  }
  for (auto& s : p.locals) {
    s.offset = p.recv_doubles;
    p.recv_doubles += s.doubles;
  }
  return p;
}

// ---------------------------------------------------------------------------

namespace {

struct LocalFrame {
  int a, b, c;
  std::array<int, 3> lo;  // block origin relative to the local box
  std::size_t stride;     // doubles between lines
  std::size_t plane;      // doubles between planes
  std::size_t run;        // contiguous doubles per line of the block
};

LocalFrame frame(const Topology& topo, int rank, const BlockTransfer& bt) {
  const Box box = topo.local_box(rank);
  LocalFrame f;
  f.a = topo.axis;
  f.b = (f.a + 1) % 3;
  f.c = (f.a + 2) % 3;
  for (int d = 0; d < 3; ++d) {
    f.lo[d] = bt.origin[d] - box.start[d];
    if (f.lo[d] < 0 || f.lo[d] + bt.shape[d] > box.count[d])
      throw std::logic_error("block does not lie inside the local box");
  }
  f.stride = topo.line_stride(rank);
  f.plane = f.stride * box.count[f.b];
  f.run = std::size_t(bt.shape[f.a]) * topo.nf;
  return f;
}

}  // namespace

void pack(const double* field, const Topology& topo, int rank, const BlockTransfer& bt, double* out) {
  const LocalFrame f = frame(topo, rank, bt);
  for (int ic = 0; ic < bt.shape[f.c]; ++ic)
    for (int ib = 0; ib < bt.shape[f.b]; ++ib) {
      const double* src = field + std::size_t(f.lo[f.c] + ic) * f.plane +
                          std::size_t(f.lo[f.b] + ib) * f.stride + std::size_t(f.lo[f.a]) * topo.nf;
      std::memcpy(out, src, f.run * sizeof(double));
      out += f.run;
    }
}

void unpack(const double* seg, double* field, const Topology& topo, int rank, const BlockTransfer& bt) {
  const LocalFrame f = frame(topo, rank, bt);
  for (int ic = 0; ic < bt.shape[f.c]; ++ic)
    for (int ib = 0; ib < bt.shape[f.b]; ++ib) {
      double* dst = field + std::size_t(f.lo[f.c] + ic) * f.plane +
                    std::size_t(f.lo[f.b] + ib) * f.stride + std::size_t(f.lo[f.a]) * topo.nf;
      std::memcpy(dst, seg, f.run * sizeof(double));
      seg += f.run;
    }
}

StridedBlock block_descriptor(const double* field, const Topology& topo, int rank,
                              const BlockTransfer& bt) {
  const LocalFrame f = frame(topo, rank, bt);
  StridedBlock s;
  s.base = field + std::size_t(f.lo[f.c]) * f.plane + std::size_t(f.lo[f.b]) * f.stride +
           std::size_t(f.lo[f.a]) * topo.nf;
  s.run = f.run;
  s.count = {std::size_t(bt.shape[f.b]), std::size_t(bt.shape[f.c])};
  s.stride = {f.stride, f.plane};
  return s;
}

void shuffle(double* seg, const BlockTransfer& bt, int from, int to, std::vector<double>& scratch) {
  if (from == to) return;
  const int nf = bt.nf;
  const std::size_t n = bt.doubles();
  if (scratch.size() < n) scratch.resize(n);
  std::array<std::size_t, 3> sstride{};
  sstride[from] = nf;
  sstride[(from + 1) % 3] = std::size_t(nf) * bt.shape[from];
  sstride[(from + 2) % 3] = sstride[(from + 1) % 3] * bt.shape[(from + 1) % 3];
  const int t0 = to, t1 = (to + 1) % 3, t2 = (to + 2) % 3;
  double* out = scratch.data();
  for (int k = 0; k < bt.shape[t2]; ++k)
    for (int j = 0; j < bt.shape[t1]; ++j) {
      const double* base = seg + k * sstride[t2] + j * sstride[t1];
      for (int i = 0; i < bt.shape[t0]; ++i)
        for (int q = 0; q < nf; ++q) *out++ = base[i * sstride[t0] + q];
    }
  std::memcpy(seg, scratch.data(), n * sizeof(double));
}

// ---------------------------------------------------------------------------

namespace {

void check_field(const SwitchPlan& plan, FieldBuffer& field) {
  if (!same_layout(field.topo, plan.src) || field.rank != plan.rank)
    throw std::invalid_argument("switch: field is not in the plan's source topology");
  const std::size_t need = plan.dst.local_doubles(plan.rank);
  if (field.data.size() < need) field.data.resize(need, 0.0);
}

void reset_field(const SwitchPlan& plan, FieldBuffer& field, Transport& t) {
  const std::size_t n = plan.dst.local_doubles(plan.rank);
  std::fill(field.data.begin(), field.data.begin() + n, 0.0);
  t.record(EventKind::Reset, -1, n * sizeof(double));
}

void stage_locals(const SwitchPlan& plan, const FieldBuffer& field, std::vector<double>& recv_buf,
                  Transport& t) {
  for (const BlockSlot& s : plan.locals) {
    pack(field.data.data(), plan.src, plan.rank, s.block, recv_buf.data() + s.offset);
    t.record(EventKind::Pack, s.id, s.doubles * sizeof(double));
    t.record(EventKind::Recv, s.id, s.doubles * sizeof(double));
  }
}

void shuffle_slot(const SwitchPlan& plan, const BlockSlot& s, std::vector<double>& recv_buf,
                  std::vector<double>& scratch, Transport& t) {
  shuffle(recv_buf.data() + s.offset, s.block, plan.src.axis, plan.dst.axis, scratch);
  t.record(EventKind::Shuffle, s.id, s.doubles * sizeof(double));
}

void unpack_slot(const SwitchPlan& plan, const BlockSlot& s, const std::vector<double>& recv_buf,
                 FieldBuffer& field, Transport& t) {
  unpack(recv_buf.data() + s.offset, field.data.data(), plan.dst, plan.rank, s.block);
  t.record(EventKind::Unpack, s.id, s.doubles * sizeof(double));
}

std::size_t payload_bytes(const SwitchPlan& plan) {
  std::size_t n = 0;
  for (const auto& s : plan.sends) n += s.doubles;
  return n * sizeof(double);
}

// Shared loop of the non-blocking strategies.
void run_nonblocking(const SwitchPlan& plan, FieldBuffer& field, Transport& t, bool strided) {
  check_field(plan, field);
  profile_bucket(Bucket::Overlap);
  std::vector<double> send_buf(strided ? 0 : plan.send_doubles);
  std::vector<double> recv_buf(plan.recv_doubles);
  std::vector<double> scratch;
  std::vector<const BlockSlot*> to_unpack;

  stage_locals(plan, field, recv_buf, t);
  for (const BlockSlot& s : plan.locals) {
    shuffle_slot(plan, s, recv_buf, scratch, t);
    to_unpack.push_back(&s);
  }

  profile_bucket(Bucket::Comm);
  std::vector<Transport::Request> recv_reqs;
  std::vector<const BlockSlot*> recv_of;
  for (const BlockSlot& s : plan.recvs) {
    recv_reqs.push_back(t.post_recv(s.peer, plan.tag, recv_buf.data() + s.offset, s.doubles));
    recv_of.push_back(&s);
  }

  std::vector<Transport::Request> send_reqs;  // posted and not yet complete
  std::size_t next_send = 0;
  bool reset = false;
  long idle = 0;
  const std::size_t batch = std::size_t(plan.knobs.n_send_batch);
  const std::size_t pending_max = std::size_t(plan.knobs.n_send_pending);

  auto post_batch = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && next_send < plan.sends.size(); ++k, ++next_send) {
      const BlockSlot& s = plan.sends[next_send];
      Transport::Request r;
      if (strided) {
        r = t.post_send(s.peer, plan.tag, block_descriptor(field.data.data(), plan.src, plan.rank, s.block));
      } else {
        profile_bucket(Bucket::Overlap);
        pack(field.data.data(), plan.src, plan.rank, s.block, send_buf.data() + s.offset);
        t.record(EventKind::Pack, s.id, s.doubles * sizeof(double));
        profile_bucket(Bucket::Comm);
        r = t.post_send(s.peer, plan.tag, send_buf.data() + s.offset, s.doubles);
      }
      t.record(EventKind::Send, s.id, s.doubles * sizeof(double));
      send_reqs.push_back(r);
    }
  };
  auto retire_sends = [&]() {
    if (send_reqs.empty()) return false;
    const auto done = t.test_some(send_reqs);
    if (done.empty()) return false;
    std::vector<Transport::Request> left;
    for (auto r : send_reqs)
      if (std::find(done.begin(), done.end(), r) == done.end()) left.push_back(r);
    send_reqs.swap(left);
    return true;
  };

  post_batch(std::min(batch, pending_max));
  while (next_send < plan.sends.size() || !recv_reqs.empty() || !to_unpack.empty() || !reset) {
    bool progress = false;
    if (next_send < plan.sends.size()) {
      progress |= retire_sends();
      const std::size_t ongoing = send_reqs.size();
      const std::size_t room = pending_max > ongoing ? pending_max - ongoing : 0;
      const std::size_t n = std::min(room, batch);
      if (n > 0) {
        post_batch(n);
        progress = true;
      }
    }
    if (next_send == plan.sends.size() && !reset) {
      // strided sends read the field, so they must have completed before it is cleared
      if (strided) progress |= retire_sends();
      if (!strided || send_reqs.empty()) {
        profile_bucket(Bucket::Overlap);
        reset_field(plan, field, t);
        profile_bucket(Bucket::Comm);
        reset = true;
        progress = true;
      }
    }
    if (!recv_reqs.empty()) {
      const auto done = t.test_some(recv_reqs);
      if (!done.empty()) {
        progress = true;
        profile_bucket(Bucket::Overlap);
        std::vector<Transport::Request> left;
        std::vector<const BlockSlot*> left_of;
        for (std::size_t i = 0; i < recv_reqs.size(); ++i) {
          if (std::find(done.begin(), done.end(), recv_reqs[i]) == done.end()) {
            left.push_back(recv_reqs[i]);
            left_of.push_back(recv_of[i]);
            continue;
          }
          const BlockSlot& s = *recv_of[i];
          t.record(EventKind::Recv, s.id, s.doubles * sizeof(double));
          shuffle_slot(plan, s, recv_buf, scratch, t);
          to_unpack.push_back(&s);
        }
        recv_reqs.swap(left);
        recv_of.swap(left_of);
        profile_bucket(Bucket::Comm);
      }
    }
    if (reset && !to_unpack.empty()) {
      profile_bucket(Bucket::Overlap);
      for (const BlockSlot* s : to_unpack) unpack_slot(plan, *s, recv_buf, field, t);
      to_unpack.clear();
      profile_bucket(Bucket::Comm);
      progress = true;
    }
    if (progress) {
      idle = 0;
    } else {
      if (++idle > plan.knobs.stall_bound)
        throw StallError("rank " + std::to_string(plan.rank) + ": switch made no progress for " +
                         std::to_string(idle - 1) + " iterations");
      t.wait_for_activity(std::chrono::microseconds(200));
    }
  }
  t.wait_all(send_reqs);
  field.topo = plan.dst;
  profile_bytes(payload_bytes(plan));
}

}  // namespace

void execute_switch_a2a(const SwitchPlan& plan, FieldBuffer& field, Transport& t) {
  check_field(plan, field);
  profile_bucket(Bucket::Overlap);
  std::vector<double> send_buf(plan.send_doubles);
  std::vector<double> recv_buf(plan.recv_doubles);
  std::vector<double> scratch;
  for (const BlockSlot& s : plan.sends) {
    pack(field.data.data(), plan.src, plan.rank, s.block, send_buf.data() + s.offset);
    t.record(EventKind::Pack, s.id, s.doubles * sizeof(double));
  }
  stage_locals(plan, field, recv_buf, t);

  // emulated all-to-all: a full pairwise round closed by a barrier
  profile_bucket(Bucket::Comm);
  std::vector<Transport::Request> reqs;
  for (const BlockSlot& s : plan.recvs)
    reqs.push_back(t.post_recv(s.peer, plan.tag, recv_buf.data() + s.offset, s.doubles));
  for (const BlockSlot& s : plan.sends) {
    reqs.push_back(t.post_send(s.peer, plan.tag, send_buf.data() + s.offset, s.doubles));
    t.record(EventKind::Send, s.id, s.doubles * sizeof(double));
  }
  if (t.size() > 1) t.barrier();

  profile_bucket(Bucket::Overlap);
  reset_field(plan, field, t);

  profile_bucket(Bucket::Comm);
  t.wait_all(reqs);
  for (const BlockSlot& s : plan.recvs) t.record(EventKind::Recv, s.id, s.doubles * sizeof(double));

  profile_bucket(Bucket::Overlap);
  for (const auto* list : {&plan.recvs, &plan.locals})
    for (const BlockSlot& s : *list) {
      shuffle_slot(plan, s, recv_buf, scratch, t);
      unpack_slot(plan, s, recv_buf, field, t);
    }
  field.topo = plan.dst;
  profile_bytes(payload_bytes(plan));
}

void execute_switch_nb(const SwitchPlan& plan, FieldBuffer& field, Transport& t) {
  run_nonblocking(plan, field, t, false);
}

void execute_switch_isr(const SwitchPlan& plan, FieldBuffer& field, Transport& t) {
  run_nonblocking(plan, field, t, true);
}

void execute_switch(Strategy s, const SwitchPlan& plan, FieldBuffer& field, Transport& t) {
  switch (s) {
    case Strategy::A2A: return execute_switch_a2a(plan, field, t);
    case Strategy::NB: return execute_switch_nb(plan, field, t);
    case Strategy::ISR: return execute_switch_isr(plan, field, t);
  }
}

}  // namespace mixsolve
