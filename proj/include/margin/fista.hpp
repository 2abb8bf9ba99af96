#pragma once

#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "margin/geometry.hpp"
#include "margin/projection.hpp"

namespace margin {

enum class AgentId { chaser, target };

const char* agent_name(AgentId id);

// One round's broadcast from an agent: its extrapolated point p^k plus a
// one-bit halt vote ("my last step was within tolerance"). Covariance data
// never travels: the peer only ever sees points.
struct AgentMessage {
  int iteration = 0;
  Vec3 point = Vec3::Zero();
  AgentId agent_id = AgentId::chaser;
  bool halt = false;
};

// Closing report: the sender's final feasible iterate.
struct FinalMessage {
  int iteration = 0;
  Vec3 point = Vec3::Zero();
};

// Reliable, in-order, exactly-once message channel between the two agents.
// Implementations: the in-memory rendezvous pair below and the JSON-line
// socket transport in wire.hpp.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send(const AgentMessage& m) = 0;
  virtual AgentMessage recv() = 0;
  virtual void send_final(const FinalMessage& m) = 0;
  virtual FinalMessage recv_final() = 0;
};

// Two connected in-process endpoints (thread-safe blocking queues): whatever
// one side sends, the other receives, in order.
std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_memory_transport_pair();

// Per-agent solver state for the accelerated projected-gradient iteration.
// x is the last feasible iterate, p the extrapolated point to broadcast, t
// the momentum scalar (t0 = 1, t_{k+1} = (1 + sqrt(1 + 4 t^2)) / 2), k the
// round index, and last_step = |x^k - x^{k-1}| drives the halt vote.
struct AgentState {
  AgentId agent_id;
  Ellipsoid ellipsoid;
  Vec3 x;
  Vec3 p;
  double t = 1.0;
  int k = 0;
  double last_step = std::numeric_limits<double>::infinity();
};

AgentState make_agent(AgentId id, const Ellipsoid& e);

// One round of the iteration given the peer's same-round point p_j^k:
// gradient step v = p - (2/L)(p - p_j) with the fixed L = 4 (spectral norm
// of the joint quadratic), projection x+ = P(v), momentum update of t and p.
// Pure: returns the advanced state. The overload taking the full message
// enforces lockstep and throws IterationMismatch when rounds disagree.
// Passing a projector avoids refactoring the ellipsoid frame every round;
// it must belong to state.ellipsoid.
AgentState agent_step(const AgentState& state, const Vec3& peer_point);
AgentState agent_step(const AgentState& state, const Vec3& peer_point,
                      const EllipsoidProjector& projector);
AgentState agent_step(const AgentState& state, const AgentMessage& peer);

// Optional per-round capture of an agent's trajectory.
struct FistaTrace {
  std::vector<Vec3> x;       // feasible iterate after each round
  std::vector<double> t;     // momentum scalar after each round
};

struct FistaOptions {
  double tol_step = 1e-3;  // km; negative disables the halt votes entirely
  int max_iter = 50000;
  FistaTrace* chaser_trace = nullptr;
  FistaTrace* target_trace = nullptr;
};

// What one side knows when a session ends.
struct SessionOutcome {
  Vec3 x_final = Vec3::Zero();     // own last feasible iterate
  Vec3 peer_final = Vec3::Zero();  // peer's reported final iterate
  int iterations = 0;
  bool converged = false;
};

// Drives one agent through a full session on the given transport: round
// messages are exchanged in lockstep, the run stops once both halt votes are
// true in two consecutive rounds (or at max_iter), then finals are swapped.
// Both the in-memory and the socket paths run exactly this loop, which is
// what makes their iterate sequences bit-identical.
SessionOutcome run_agent_session(AgentState state, Transport& transport,
                                 const FistaOptions& opts, FistaTrace* trace = nullptr);

// Distributed margin solve, both agents in-process on an in-memory transport
// pair. A final overlap test sets the overlap flag and clamps the margin to
// exactly 0 for overlapping conjunctions (the iteration itself converges to
// a common point in that case, but only up to tolerance).
MarginResult solve_fista(const Conjunction& c, const FistaOptions& opts = {});

}  // namespace margin
