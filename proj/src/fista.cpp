#include "margin/fista.hpp"

#include <cmath>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>

#include "margin/errors.hpp"
#include "margin/overlap.hpp"

namespace margin {

const char* agent_name(AgentId id) {
  return id == AgentId::chaser ? "chaser" : "target";
}

namespace {

// Shared state of an in-memory transport pair: one queue per direction and
// message kind, guarded by a single lock. Sends never block.
struct Mailbox {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<AgentMessage> round_to_a, round_to_b;
  std::deque<FinalMessage> final_to_a, final_to_b;
};

class MemoryEndpoint final : public Transport {
 public:
  MemoryEndpoint(std::shared_ptr<Mailbox> box, bool side_a) : box_(std::move(box)), side_a_(side_a) {}

  void send(const AgentMessage& m) override {
    std::lock_guard<std::mutex> lock(box_->mu);
    (side_a_ ? box_->round_to_b : box_->round_to_a).push_back(m);
    box_->cv.notify_all();
  }

  AgentMessage recv() override {
    std::unique_lock<std::mutex> lock(box_->mu);
    auto& queue = side_a_ ? box_->round_to_a : box_->round_to_b;
    box_->cv.wait(lock, [&] { return !queue.empty(); });
    AgentMessage m = queue.front();
    queue.pop_front();
    return m;
  }

  void send_final(const FinalMessage& m) override {
    std::lock_guard<std::mutex> lock(box_->mu);
    (side_a_ ? box_->final_to_b : box_->final_to_a).push_back(m);
    box_->cv.notify_all();
  }

  FinalMessage recv_final() override {
    std::unique_lock<std::mutex> lock(box_->mu);
    auto& queue = side_a_ ? box_->final_to_a : box_->final_to_b;
    box_->cv.wait(lock, [&] { return !queue.empty(); });
    FinalMessage m = queue.front();
    queue.pop_front();
    return m;
  }

 private:
  std::shared_ptr<Mailbox> box_;
  bool side_a_;
};

}  // namespace

std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_memory_transport_pair() {
  auto box = std::make_shared<Mailbox>();
  return {std::make_unique<MemoryEndpoint>(box, true), std::make_unique<MemoryEndpoint>(box, false)};
}

AgentState make_agent(AgentId id, const Ellipsoid& e) {
  AgentState state{id, e, e.center, e.center};
  return state;
}

AgentState agent_step(const AgentState& state, const Vec3& peer_point,
                      const EllipsoidProjector& projector) {
  AgentState next = state;
  // gradient step with the fixed Lipschitz constant 4: p - (2/4)(p - p_peer)
  Vec3 v = 0.5 * (state.p + peer_point);
  next.x = projector(v);
  next.t = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * state.t * state.t));
  next.p = next.x + ((state.t - 1.0) / next.t) * (next.x - state.x);
  next.last_step = (next.x - state.x).norm();
  next.k = state.k + 1;
  return next;
}

AgentState agent_step(const AgentState& state, const Vec3& peer_point) {
  return agent_step(state, peer_point, EllipsoidProjector(state.ellipsoid));
}

AgentState agent_step(const AgentState& state, const AgentMessage& peer) {
  if (peer.iteration != state.k) {
    throw IterationMismatch("peer is at round " + std::to_string(peer.iteration) + ", " +
                            agent_name(state.agent_id) + " is at round " + std::to_string(state.k));
  }
  return agent_step(state, peer.point);
}

SessionOutcome run_agent_session(AgentState state, Transport& transport, const FistaOptions& opts,
                                 FistaTrace* trace) {
  EllipsoidProjector projector(state.ellipsoid);
  int halt_streak = 0;
  bool converged = false;
  while (true) {
    AgentMessage mine;
    mine.iteration = state.k;
    mine.point = state.p;
    mine.agent_id = state.agent_id;
    mine.halt = opts.tol_step >= 0 && state.last_step <= opts.tol_step;
    transport.send(mine);
    AgentMessage peer = transport.recv();
    if (peer.iteration != state.k) {
      throw IterationMismatch("peer is at round " + std::to_string(peer.iteration) + ", " +
                              agent_name(state.agent_id) + " is at round " +
                              std::to_string(state.k));
    }
    // Both sides see the same two votes each round, so they always take this
    // branch (and the cap below) in the same round.
    halt_streak = (mine.halt && peer.halt) ? halt_streak + 1 : 0;
    if (halt_streak >= 2) {
      converged = true;
      break;
    }
    if (state.k >= opts.max_iter) break;
    state = agent_step(state, peer.point, projector);
    if (trace) {
      trace->x.push_back(state.x);
      trace->t.push_back(state.t);
    }
  }

  FinalMessage mine_final;
  mine_final.iteration = state.k;
  mine_final.point = state.x;
  transport.send_final(mine_final);
  FinalMessage peer_final = transport.recv_final();

  SessionOutcome outcome;
  outcome.x_final = state.x;
  outcome.peer_final = peer_final.point;
  outcome.iterations = state.k;
  outcome.converged = converged;
  return outcome;
}

MarginResult solve_fista(const Conjunction& c, const FistaOptions& opts) {
  auto [chaser_end, target_end] = make_memory_transport_pair();

  SessionOutcome target_out;
  std::exception_ptr target_err;
  std::thread worker([&, endpoint = target_end.get()] {
    try {
      target_out = run_agent_session(make_agent(AgentId::target, c.target), *endpoint, opts,
                                     opts.target_trace);
    } catch (...) {
      target_err = std::current_exception();
    }
  });
  SessionOutcome chaser_out = run_agent_session(make_agent(AgentId::chaser, c.chaser), *chaser_end,
                                                opts, opts.chaser_trace);
  worker.join();
  if (target_err) std::rethrow_exception(target_err);

  MarginResult res;
  res.method = Method::fista;
  res.x_star = chaser_out.x_final;
  res.y_star = chaser_out.peer_final;
  res.margin = (res.x_star - res.y_star).norm();
  res.iterations = chaser_out.iterations;
  res.converged = chaser_out.converged;

  OverlapReport report = overlap_test(c);
  res.overlap = report.overlapping;
  if (report.overlapping) res.margin = 0.0;
  return res;
}

}  // namespace margin
