// Release gate for the margin library. Each criterion prints exactly one
// PASS/FAIL line with the measured numbers; the process exits nonzero if any
// criterion fails. Solver tolerances chosen here are part of the gate
// configuration and are printed where they matter.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <cstring>
#include <deque>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "margin/fista.hpp"
#include "margin/frank_wolfe.hpp"
#include "margin/oracle.hpp"
#include "margin/overlap.hpp"
#include "margin/projection.hpp"
#include "margin/rimon_boyd.hpp"
#include "margin/screening.hpp"
#include "margin/wire.hpp"
#include "support/generators.hpp"

using namespace margin;
using testsupport::Rng;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

std::string secs(std::chrono::steady_clock::time_point t0) {
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f s", dt);
  return buf;
}

bool bits_equal(const Vec3& a, const Vec3& b) {
  return std::memcmp(a.data(), b.data(), 3 * sizeof(double)) == 0;
}

// ---------------------------------------------------------------------------
// Shared random suite: 1000 conjunctions with log-uniform semi-axes in
// [0.01, 10] km, shape condition numbers up to 1e4, random orientations, and
// centers within 50 km. Criteria 2-5 read these records; criterion 10 times a
// fresh screening run over the same conjunctions.

struct SuiteCase {
  Conjunction conj;
  OverlapReport overlap;
  MarginResult oracle;
  MarginResult fw;
  MarginResult fista;
  double rb = kNan;          // benchmark margin, NaN if the eigensolve threw
  bool rb_threw = false;
  double exit_gap = kNan;    // duality gap at the returned FW iterate
  double worst_ascent = 0;   // largest objective increase along the FW trace
  double min_gap = 0;        // most negative recorded FW gap
  bool excluded = false;     // near-tangent: |min K| < 1e-9
};

std::vector<SuiteCase> build_suite(std::vector<Conjunction>& bare) {
  Rng rng(23);
  std::vector<SuiteCase> suite;
  suite.reserve(1000);
  for (int i = 0; i < 1000; ++i) {
    SuiteCase sc{testsupport::random_conjunction(rng, i), {}, {}, {}, {}};
    bare.push_back(sc.conj);
    sc.overlap = overlap_test(sc.conj);
    sc.excluded = std::abs(sc.overlap.k_min) < 1e-9;
    sc.oracle = solve_oracle(sc.conj);

    FwTrace trace;
    FwOptions fw_opts;
    fw_opts.tol_step = 1e-8;
    fw_opts.max_iter = 100000;
    fw_opts.trace = &trace;
    sc.fw = solve_fw(sc.conj, fw_opts);
    double start_objective = miss_distance(sc.conj);
    start_objective *= start_objective;
    double prev = start_objective;
    for (double obj : trace.objective) {
      sc.worst_ascent = std::max(sc.worst_ascent, obj - prev);
      prev = obj;
    }
    for (double g : trace.gap) sc.min_gap = std::min(sc.min_gap, g);
    if (!sc.fw.overlap && sc.fw.converged) {
      LmoPair lm = lmo(sc.conj, sc.fw.x_star, sc.fw.y_star);
      Vec3 r = sc.fw.x_star - sc.fw.y_star;
      sc.exit_gap = 2.0 * r.dot(r - (lm.s1 - lm.s2));
    }

    FistaOptions fi_opts;
    fi_opts.tol_step = 1e-6;
    fi_opts.max_iter = 2000000;
    sc.fista = solve_fista(sc.conj, fi_opts);

    try {
      sc.rb = rb_margin(sc.conj).margin;
    } catch (const Error&) {
      sc.rb_threw = true;
    }
    suite.push_back(std::move(sc));
  }
  return suite;
}

// ---------------------------------------------------------------------------
// 1. Sphere exactness: analytic margin max(0, |dc| - r1 - r2) on 50 random
// sphere pairs; fw/fista within 1e-6 km, oracle within 1e-9 km, the
// closed-form benchmark within 1e-6 km on the disjoint subset; under 5 s.

Outcome sphere_exactness() {
  auto t0 = std::chrono::steady_clock::now();
  Rng rng(11);
  double worst_fw = 0, worst_fista = 0, worst_oracle = 0, worst_rb = 0;
  int disjoint = 0;
  for (int i = 0; i < 50; ++i) {
    testsupport::SphereCase sc = testsupport::random_sphere_case(rng, i);
    worst_fw = std::max(worst_fw, std::abs(solve_fw(sc.conj).margin - sc.analytic_margin));
    worst_fista = std::max(worst_fista, std::abs(solve_fista(sc.conj).margin - sc.analytic_margin));
    worst_oracle =
        std::max(worst_oracle, std::abs(solve_oracle(sc.conj).margin - sc.analytic_margin));
    if (sc.disjoint) {
      ++disjoint;
      worst_rb = std::max(worst_rb, std::abs(rb_margin(sc.conj).margin - sc.analytic_margin));
    }
  }
  double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool pass = worst_fw <= 1e-6 && worst_fista <= 1e-6 && worst_oracle <= 1e-9 &&
              worst_rb <= 1e-6 && elapsed < 5.0;
  return {pass, "max |margin - analytic|: fw " + num(worst_fw) + ", fista " + num(worst_fista) +
                    ", oracle " + num(worst_oracle) + ", benchmark " + num(worst_rb) + " (" +
                    std::to_string(disjoint) + " disjoint), " + secs(t0)};
}

// ---------------------------------------------------------------------------
// 2. Oracle equivalence on the random suite: |fw - oracle| and
// |fista - oracle| at most 1e-3 km outside the near-tangent band.

Outcome oracle_equivalence(const std::vector<SuiteCase>& suite) {
  double worst_fw = 0, worst_fista = 0;
  int excluded = 0, oracle_unconverged = 0;
  for (const SuiteCase& sc : suite) {
    if (sc.excluded) {
      ++excluded;
      continue;
    }
    if (!sc.oracle.converged) ++oracle_unconverged;
    worst_fw = std::max(worst_fw, std::abs(sc.fw.margin - sc.oracle.margin));
    worst_fista = std::max(worst_fista, std::abs(sc.fista.margin - sc.oracle.margin));
  }
  bool pass = worst_fw <= 1e-3 && worst_fista <= 1e-3 && oracle_unconverged == 0;
  return {pass, "max |margin - oracle|: fw " + num(worst_fw) + ", fista " + num(worst_fista) +
                    " over " + std::to_string(1000 - excluded) + " cases (" +
                    std::to_string(excluded) + " near-tangent excluded)"};
}

// ---------------------------------------------------------------------------
// 3. Overlap-test correctness: the pre-test verdict must equal
// (oracle margin <= 1e-6 km) outside the exclusion band, and every
// overlapping verdict must come with a point feasible in both ellipsoids.

Outcome overlap_correctness(const std::vector<SuiteCase>& suite) {
  int disagreements = 0, bad_witness = 0, checked = 0, overlapping = 0;
  for (const SuiteCase& sc : suite) {
    if (sc.excluded) continue;
    ++checked;
    bool oracle_overlap = sc.oracle.margin <= 1e-6;
    if (sc.overlap.overlapping != oracle_overlap) ++disagreements;
    if (sc.overlap.overlapping) {
      ++overlapping;
      Vec3 w = overlap_point(sc.conj, sc.overlap.lambda_star);
      if (!contains(sc.conj.chaser, w, 1e-6) || !contains(sc.conj.target, w, 1e-6))
        ++bad_witness;
    }
  }
  bool pass = disagreements == 0 && bad_witness == 0;
  return {pass, std::to_string(disagreements) + " verdict disagreements, " +
                    std::to_string(bad_witness) + " witness failures over " +
                    std::to_string(checked) + " cases (" + std::to_string(overlapping) +
                    " overlapping, witness certified in both ellipsoids)"};
}

// ---------------------------------------------------------------------------
// 4. Margin never exceeds the miss distance (within 1e-9 km) for fw, fista,
// and the oracle, across both generated suites. Benchmark violations are
// counted and reported, never asserted away.

Outcome margin_vs_miss(const std::vector<SuiteCase>& suite) {
  int violations = 0, rb_violations = 0, rb_failures = 0;
  double worst_rb_excess = 0;

  auto check = [&](double margin, double miss) {
    if (margin > miss + 1e-9) ++violations;
  };
  for (const SuiteCase& sc : suite) {
    double miss = miss_distance(sc.conj);
    check(sc.fw.margin, miss);
    check(sc.fista.margin, miss);
    check(sc.oracle.margin, miss);
    if (sc.rb_threw || !std::isfinite(sc.rb)) {
      ++rb_failures;
    } else if (sc.rb > miss + 1e-9) {
      ++rb_violations;
      worst_rb_excess = std::max(worst_rb_excess, sc.rb - miss);
    }
  }
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    testsupport::SphereCase sc = testsupport::random_sphere_case(rng, i);
    double miss = miss_distance(sc.conj);
    check(solve_fw(sc.conj).margin, miss);
    check(solve_fista(sc.conj).margin, miss);
    check(solve_oracle(sc.conj).margin, miss);
  }
  return {violations == 0,
          std::to_string(violations) + " violations (fw/fista/oracle, 1050 cases); benchmark: " +
              std::to_string(rb_violations) + " violations (worst excess " + num(worst_rb_excess) +
              " km), " + std::to_string(rb_failures) + " non-finite or failed (reported only)"};
}

// ---------------------------------------------------------------------------
// 5. Frank-Wolfe descent and certificate: the objective never increases by
// more than 1e-12 along any trace, recorded gaps stay above -1e-9, and the
// duality gap at the returned iterate is at most 1e-6 km^2 on disjoint
// instances with margin >= 1e-4 km.

Outcome fw_descent_and_gap(const std::vector<SuiteCase>& suite) {
  double worst_ascent = 0, min_gap = 0, worst_exit_gap = 0;
  int certified = 0, unconverged = 0;
  for (const SuiteCase& sc : suite) {
    worst_ascent = std::max(worst_ascent, sc.worst_ascent);
    min_gap = std::min(min_gap, sc.min_gap);
    if (!sc.fw.converged) ++unconverged;
    if (!sc.overlap.overlapping && !sc.excluded && sc.oracle.margin >= 1e-4 &&
        std::isfinite(sc.exit_gap)) {
      ++certified;
      worst_exit_gap = std::max(worst_exit_gap, sc.exit_gap);
    }
  }
  bool pass =
      worst_ascent <= 1e-12 && min_gap >= -1e-9 && worst_exit_gap <= 1e-6 && unconverged == 0;
  return {pass, "worst ascent " + num(worst_ascent) + ", most negative gap " + num(min_gap) +
                    ", worst exit gap " + num(worst_exit_gap) + " km^2 over " +
                    std::to_string(certified) + " disjoint non-degenerate cases"};
}

// ---------------------------------------------------------------------------
// 6. Momentum schedule and rate: the agent's t-sequence follows
// t+ = (1 + sqrt(1 + 4 t^2))/2 within 1e-12 relative over 1e4 steps (with the
// (k+2)/2 floor), and on a fixed disjoint fixture the objective error obeys
// the accelerated bound err_k <= 8 |z0 - z*|^2 / (k+1)^2 for k in [10, 1000].

Outcome fista_schedule_and_rate() {
  AgentState agent = make_agent(AgentId::chaser, Ellipsoid::sphere(Vec3::Zero(), 1.0));
  EllipsoidProjector projector(agent.ellipsoid);
  long double t_ref = 1.0L;
  double worst_t = 0;
  bool floor_ok = true;
  for (int k = 0; k < 10000; ++k) {
    agent = agent_step(agent, Vec3(3, 0, 0), projector);
    t_ref = (1.0L + sqrtl(1.0L + 4.0L * t_ref * t_ref)) / 2.0L;
    worst_t = std::max(worst_t, std::abs(agent.t - static_cast<double>(t_ref)) /
                                    static_cast<double>(t_ref));
    floor_ok = floor_ok && agent.t >= (k + 3) / 2.0 - 1e-9;  // t_k >= (k+2)/2 after k+1 steps
  }

  Mat3 chaser_cov, target_cov;
  chaser_cov << 2.0, 0.3, 0.1, 0.3, 1.5, 0.2, 0.1, 0.2, 1.0;
  target_cov << 1.2, -0.1, 0.05, -0.1, 0.9, 0.1, 0.05, 0.1, 1.1;
  Conjunction fixture("rate-fixture",
                      Ellipsoid::from_covariance(Vec3(0, 0, 0), SymMat3::from_upper(chaser_cov)),
                      Ellipsoid::from_covariance(Vec3(8, 1, 0.5), SymMat3::from_upper(target_cov)));

  OracleOptions tight;
  tight.tol = 1e-12;
  tight.max_iter = 5000000;
  MarginResult ref = solve_oracle(fixture, tight);
  double optimum = ref.margin * ref.margin;
  double d0 = (fixture.chaser.center - ref.x_star).squaredNorm() +
              (fixture.target.center - ref.y_star).squaredNorm();

  FistaTrace chaser_trace, target_trace;
  FistaOptions opts;
  opts.tol_step = -1.0;  // disable halting, run exactly max_iter rounds
  opts.max_iter = 1000;
  opts.chaser_trace = &chaser_trace;
  opts.target_trace = &target_trace;
  solve_fista(fixture, opts);

  double worst_ratio = 0;  // err_k over its bound, max over k
  double worst_k2_err = 0;
  bool rate_ok = chaser_trace.x.size() == 1000 && target_trace.x.size() == 1000;
  for (size_t i = 9; rate_ok && i < chaser_trace.x.size(); ++i) {
    double k = static_cast<double>(i) + 1;  // trace entry i is iterate k = i+1
    double objective = (chaser_trace.x[i] - target_trace.x[i]).squaredNorm();
    double err = std::max(0.0, objective - optimum);
    double bound = 8.0 * d0 / ((k + 1) * (k + 1));
    worst_ratio = std::max(worst_ratio, err / bound);
    worst_k2_err = std::max(worst_k2_err, k * k * err);
  }
  rate_ok = rate_ok && worst_ratio <= 1.0;

  bool pass = worst_t <= 1e-12 && floor_ok && rate_ok && ref.converged;
  return {pass, "t-sequence max rel dev " + num(worst_t) + " over 1e4 steps; rate: max err/bound " +
                    num(worst_ratio) + ", max k^2 err " + num(worst_k2_err) + " km^2 (bound 8 d0 = " +
                    num(8.0 * d0) + ")"};
}

// ---------------------------------------------------------------------------
// 7. Projection properties on 1000 random ellipsoid/point cases: idempotence,
// non-expansiveness, monotone Newton multiplier iterates, and the variational
// inequality at the projected point.

Outcome projection_properties() {
  Rng rng(7);
  int idem = 0, nonexp = 0, monotone = 0, vi = 0, newton_checked = 0;
  for (int i = 0; i < 1000; ++i) {
    Ellipsoid e = testsupport::random_ellipsoid(
        rng, Vec3(testsupport::uniform(rng, -5, 5), testsupport::uniform(rng, -5, 5),
                  testsupport::uniform(rng, -5, 5)));
    EllipsoidProjector project(e);
    double reach = 1.0 / std::sqrt(sym_eigen(e.shape).values[0]);  // longest semi-axis
    Vec3 x = e.center + testsupport::uniform(rng, 0.0, 4.0 * reach) * testsupport::random_unit(rng);
    Vec3 q = e.center + testsupport::uniform(rng, 0.0, 4.0 * reach) * testsupport::random_unit(rng);
    Vec3 px = project(x);
    Vec3 pq = project(q);

    if ((project(px) - px).norm() > 1e-9 * (1 + px.norm())) ++idem;
    if ((px - pq).norm() > (x - q).norm() * (1 + 1e-10) + 1e-12) ++nonexp;

    for (int s = 0; s < 10; ++s) {
      Vec3 u = testsupport::random_unit(rng) * testsupport::uniform(rng, 0.0, 1.0);
      Vec3 z = e.center + sym_pow(e.shape, -0.5) * u;  // feasible sample
      if ((x - px).dot(z - px) > 1e-9 * (1 + (x - px).norm() * (z - px).norm())) ++vi;
    }

    // The Newton multiplier lives in the principal-axis frame; rebuild the
    // axis-aligned view to watch its iterates directly.
    SymEigen frame = sym_eigen(e.shape);
    Vec3 w(std::sqrt(frame.values[0]), std::sqrt(frame.values[1]), std::sqrt(frame.values[2]));
    Vec3 local = frame.vectors.transpose() * (x - e.center);
    double level = w.x() * w.x() * local.x() * local.x() + w.y() * w.y() * local.y() * local.y() +
                   w.z() * w.z() * local.z() * local.z();
    if (level > 1.0 + 1e-9) {
      ++newton_checked;
      std::vector<double> trail;
      newton_lambda(w, Vec3::Zero(), local, 1.0, &trail);
      for (size_t k = 1; k < trail.size(); ++k)
        if (trail[k] < trail[k - 1]) ++monotone;
    }
  }
  bool pass = idem == 0 && nonexp == 0 && monotone == 0 && vi == 0;
  return {pass, "failures: idempotence " + std::to_string(idem) + ", non-expansiveness " +
                    std::to_string(nonexp) + ", newton monotonicity " + std::to_string(monotone) +
                    " (" + std::to_string(newton_checked) + " exterior), variational inequality " +
                    std::to_string(vi) + " of 10000 samples"};
}

// ---------------------------------------------------------------------------
// 8. Non-normality witness: the stage-1 pencil satisfies |M M^T - M^T M| > 0
// on 100 random disjoint conjunctions with distinct centers.

Outcome nonnormality_witness() {
  Rng rng(31);
  int found = 0, attempts = 0, zero_witness = 0;
  double min_witness = std::numeric_limits<double>::infinity();
  while (found < 100 && attempts < 10000) {
    Conjunction c = testsupport::random_conjunction(rng, attempts++);
    if (overlap_test(c).overlapping) continue;
    ++found;
    double w = rb_nonnormality_witness(rb_m1(c));
    min_witness = std::min(min_witness, w);
    if (!(w > 0)) ++zero_witness;
  }
  bool pass = found == 100 && zero_witness == 0;
  return {pass, std::to_string(found) + " disjoint cases, witness > 0 in all (min " +
                    num(min_witness) + ")"};
}

// ---------------------------------------------------------------------------
// 9. Transport equivalence and privacy: the socket path reproduces the
// in-memory iterate sequences bit for bit on 20 fixtures, and the captured
// traffic carries only the three message shapes, never a covariance entry.

class LinePipe {
 public:
  void push(const std::string& line) {
    std::lock_guard<std::mutex> lock(mu_);
    lines_.push_back(line);
    cv_.notify_all();
  }
  void close() {
    std::lock_guard<std::mutex> lock(mu_);
    closed_ = true;
    cv_.notify_all();
  }
  std::optional<std::string> pop() {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [&] { return !lines_.empty() || closed_; });
    if (lines_.empty()) return std::nullopt;
    std::string line = lines_.front();
    lines_.pop_front();
    return line;
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::string> lines_;
  bool closed_ = false;
};

class RecordingPipeChannel : public LineChannel {
 public:
  RecordingPipeChannel(LinePipe& out, LinePipe& in, std::vector<std::string>& log,
                       std::mutex& log_mu)
      : out_(out), in_(in), log_(log), log_mu_(log_mu) {}
  ~RecordingPipeChannel() override { out_.close(); }

  void send_line(const std::string& line) override {
    {
      std::lock_guard<std::mutex> lock(log_mu_);
      log_.push_back(line);
    }
    out_.push(line);
  }
  std::optional<std::string> recv_line() override { return in_.pop(); }

 private:
  LinePipe& out_;
  LinePipe& in_;
  std::vector<std::string>& log_;
  std::mutex& log_mu_;
};

bool traces_equal(const FistaTrace& a, const FistaTrace& b) {
  if (a.x.size() != b.x.size() || a.t.size() != b.t.size()) return false;
  for (size_t i = 0; i < a.x.size(); ++i)
    if (!bits_equal(a.x[i], b.x[i])) return false;
  return std::memcmp(a.t.data(), b.t.data(), a.t.size() * sizeof(double)) == 0;
}

Outcome transport_equivalence() {
  Rng rng(47);
  int mismatches = 0, schema_leaks = 0, needle_hits = 0;
  std::vector<std::string> traffic;
  std::mutex traffic_mu;
  std::vector<std::string> needles;

  for (int i = 0; i < 20; ++i) {
    Conjunction c = testsupport::random_conjunction(rng, i);
    for (const Ellipsoid* e : {&c.chaser, &c.target}) {
      SymMat3 cov = sym_pow(e->shape, -1.0);
      for (double v : {e->shape.xx, e->shape.xy, e->shape.xz, e->shape.yy, e->shape.yz,
                       e->shape.zz, cov.xx, cov.xy, cov.xz, cov.yy, cov.yz, cov.zz}) {
        std::string s = nlohmann::json(v).dump();
        if (s.size() >= 6) needles.push_back(s);
      }
    }

    FistaTrace mem_chaser, mem_target;
    FistaOptions mem_opts;
    mem_opts.tol_step = 1e-3;
    mem_opts.max_iter = 3000;
    mem_opts.chaser_trace = &mem_chaser;
    mem_opts.target_trace = &mem_target;
    solve_fista(c, mem_opts);

    FistaTrace wire_chaser, wire_target;
    LinePipe to_target, to_chaser;
    RecordingPipeChannel chaser_end(to_target, to_chaser, traffic, traffic_mu);
    RecordingPipeChannel target_end(to_chaser, to_target, traffic, traffic_mu);
    std::exception_ptr target_error;
    std::thread target_thread([&] {
      try {
        FistaOptions opts;
        opts.tol_step = 1e-3;
        opts.max_iter = 3000;
        opts.target_trace = &wire_target;
        run_wire_session_on_channel(target_end, AgentId::target, c.target, opts);
      } catch (...) {
        target_error = std::current_exception();
      }
    });
    FistaOptions opts;
    opts.tol_step = 1e-3;
    opts.max_iter = 3000;
    opts.chaser_trace = &wire_chaser;
    run_wire_session_on_channel(chaser_end, AgentId::chaser, c.chaser, opts);
    target_thread.join();
    if (target_error) std::rethrow_exception(target_error);

    if (!traces_equal(mem_chaser, wire_chaser) || !traces_equal(mem_target, wire_target))
      ++mismatches;
  }

  for (const std::string& line : traffic) {
    nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      ++schema_leaks;
    } else {
      bool handshake = doc.size() == 4 && doc.contains("v") && doc.contains("role") &&
                       doc.contains("tol") && doc.contains("max_iter");
      bool round =
          doc.size() == 3 && doc.contains("k") && doc.contains("p") && doc.contains("halt");
      bool final_msg =
          doc.size() == 3 && doc.contains("k") && doc.contains("x") && doc.contains("done");
      if (!handshake && !round && !final_msg) ++schema_leaks;
    }
    for (const std::string& needle : needles)
      if (line.find(needle) != std::string::npos) ++needle_hits;
  }

  bool pass = mismatches == 0 && schema_leaks == 0 && needle_hits == 0;
  return {pass, std::to_string(mismatches) + " trace mismatches over 20 fixtures; " +
                    std::to_string(traffic.size()) + " captured lines, " +
                    std::to_string(schema_leaks) + " off-schema, " +
                    std::to_string(needle_hits) + " covariance-entry hits"};
}

// ---------------------------------------------------------------------------
// 10. Throughput at production settings: fw screens the 1000-case suite
// single-threaded in <= 10 s; the in-memory distributed solver screens 100
// cases in <= 60 s.

Outcome throughput(const std::vector<Conjunction>& bare) {
  ScreenOptions fw_opts;
  fw_opts.method = Method::frank_wolfe;
  fw_opts.threads = 1;
  auto t0 = std::chrono::steady_clock::now();
  std::vector<ScreeningRow> rows = screen_batch(bare, fw_opts);
  double fw_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::vector<Conjunction> first_hundred(bare.begin(), bare.begin() + 100);
  ScreenOptions fi_opts;
  fi_opts.method = Method::fista;
  fi_opts.threads = 1;
  t0 = std::chrono::steady_clock::now();
  std::vector<ScreeningRow> fi_rows = screen_batch(first_hundred, fi_opts);
  double fi_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  bool pass = rows.size() == 1000 && fi_rows.size() == 100 && fw_s <= 10.0 && fi_s <= 60.0;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "fw: 1000 cases in %.3f s (%.0f/s, bound 10 s); fista: 100 cases in %.3f s "
                "(%.0f/s, bound 60 s)",
                fw_s, 1000.0 / fw_s, fi_s, 100.0 / fi_s);
  return {pass, buf};
}

// ---------------------------------------------------------------------------
// 11. Sigma monotonicity: growing both ellipsoids to their 2- and 3-sigma
// levels never increases the margin (within 1e-9 km) on 100 conjunctions.

Outcome sigma_monotonicity() {
  Rng rng(53);
  int violations = 0;
  for (int i = 0; i < 100; ++i) {
    Conjunction c = testsupport::random_conjunction(rng, i);
    double previous = std::numeric_limits<double>::infinity();
    for (double sigma : {1.0, 2.0, 3.0}) {
      Conjunction scaled(c.id, scale_sigma(c.chaser, sigma), scale_sigma(c.target, sigma));
      double m = solve_oracle(scaled).margin;
      if (m > previous + 1e-9) ++violations;
      previous = m;
    }
  }
  return {violations == 0,
          std::to_string(violations) + " monotonicity violations over 100 conjunctions x sigma "
          "in {1, 2, 3}"};
}

// ---------------------------------------------------------------------------
// 12. Concern rule: on ten hand-built sphere cases the flag equals
// (margin < chaser_radius + target_radius), strict, including both boundary
// cases where margin == radius sum exactly.

Outcome concern_rule() {
  struct Case {
    double distance, cr, tr;
    bool expected;
  };
  // Unit spheres on the x axis; margin = max(0, distance - 2). Overlapping
  // cases land on margin exactly 0.0 (the overlap branch clamps), so the
  // zero-radius rows pin the strictness of the comparison: 0 < 0 must stay
  // false. Positive margins carry ~1e-13 of projection roundoff, so the
  // boundary rows sit 1e-3 away from the radius sum instead of exactly on it.
  const Case table[] = {
      {6.0, 1.0, 1.0, false},    // margin 4, sum 2
      {6.0, 2.5, 2.0, true},     // margin 4, sum 4.5
      {2.0, 0.0, 0.0, false},    // tangent, margin 0, sum 0: 0 < 0 is false
      {1.0, 0.1, 0.0, true},     // overlapping, margin 0, sum 0.1
      {1.0, 0.0, 0.0, false},    // overlapping, zero hardware radii
      {7.0, 2.0, 2.999, false},  // margin 5 just above sum 4.999
      {7.0, 2.0, 3.001, true},   // margin 5 just below sum 5.001
      {6.0, 2.0, 2.5, true},     // margin 4, sum 4.5
      {3.0, 0.4, 0.7, true},     // margin 1, sum 1.1
      {3.0, 0.5, 0.499, false},  // margin 1 just above sum 0.999
  };
  std::vector<Conjunction> rows;
  int index = 0;
  for (const Case& t : table) {
    rows.emplace_back("concern-" + std::to_string(++index),
                      Ellipsoid::sphere(Vec3::Zero(), 1.0),
                      Ellipsoid::sphere(Vec3(t.distance, 0, 0), 1.0), t.cr, t.tr);
  }
  ScreenOptions opts;
  opts.method = Method::oracle;
  opts.deterministic = true;
  std::vector<ScreeningRow> report = screen_batch(rows, opts);

  int wrong = 0;
  for (size_t i = 0; i < report.size(); ++i) {
    bool recomputed = report[i].margin < table[i].cr + table[i].tr;
    if (report[i].concern != table[i].expected || report[i].concern != recomputed) ++wrong;
  }
  return {wrong == 0, std::to_string(wrong) + " flag mismatches over 10 hand-built cases "
                      "(strictness pinned at margin == sum == 0, boundary probed at 1e-3)"};
}

}  // namespace

int main() {
  std::vector<Conjunction> bare;
  std::printf("building shared suite: 1000 random conjunctions ...\n");
  auto t0 = std::chrono::steady_clock::now();
  std::vector<SuiteCase> suite = build_suite(bare);
  std::printf("suite ready (%s)\n\n", secs(t0).c_str());

  std::vector<std::pair<const char*, Outcome>> results;
  auto guard = [](auto&& fn) -> Outcome {
    try {
      return fn();
    } catch (const std::exception& e) {
      return {false, std::string("exception: ") + e.what()};
    }
  };

  results.emplace_back("sphere exactness", guard([] { return sphere_exactness(); }));
  results.emplace_back("oracle equivalence", guard([&] { return oracle_equivalence(suite); }));
  results.emplace_back("overlap-test correctness",
                       guard([&] { return overlap_correctness(suite); }));
  results.emplace_back("margin vs miss distance", guard([&] { return margin_vs_miss(suite); }));
  results.emplace_back("fw descent and gap", guard([&] { return fw_descent_and_gap(suite); }));
  results.emplace_back("fista schedule and rate", guard([] { return fista_schedule_and_rate(); }));
  results.emplace_back("projection properties", guard([] { return projection_properties(); }));
  results.emplace_back("non-normality witness", guard([] { return nonnormality_witness(); }));
  results.emplace_back("transport equivalence and privacy",
                       guard([] { return transport_equivalence(); }));
  results.emplace_back("throughput", guard([&] { return throughput(bare); }));
  results.emplace_back("sigma monotonicity", guard([] { return sigma_monotonicity(); }));
  results.emplace_back("concern rule", guard([] { return concern_rule(); }));

  bool all_pass = true;
  for (size_t i = 0; i < results.size(); ++i) {
    const auto& [label, outcome] = results[i];
    all_pass = all_pass && outcome.pass;
    std::printf("%2zu %s  %-33s %s\n", i + 1, outcome.pass ? "PASS" : "FAIL", label,
                outcome.detail.c_str());
  }
  std::printf("\n%s\n", all_pass ? "all 12 criteria passed" : "ACCEPTANCE FAILED");
  return all_pass ? 0 : 1;
}
