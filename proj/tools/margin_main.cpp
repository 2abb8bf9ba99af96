#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "margin/errors.hpp"
#include "margin/screening.hpp"
#include "margin/wire.hpp"

namespace {

using namespace margin;

Method method_from_flag(const std::string& name) {
  if (name == "fw") return Method::frank_wolfe;
  if (name == "fista") return Method::fista;
  if (name == "rimon-boyd") return Method::rimon_boyd;
  return Method::oracle;
}

int run_screen(const std::string& input, const ScreenOptions& opts, const std::string& output) {
  IngestResult ingest = ingest_csv_file(input);
  for (const RowError& e : ingest.errors) {
    std::cerr << input << ":" << e.line << ": rejected row \"" << e.id << "\": " << e.message
              << "\n";
  }

  std::vector<ScreeningRow> rows = screen_batch(ingest.rows, opts);
  if (output == "json") {
    write_report_json(std::cout, rows, opts);
  } else {
    write_report_csv(std::cout, rows, opts);
  }

  std::cerr << format_summary(summarize(rows), opts);
  if (!ingest.errors.empty()) {
    std::cerr << "  rejected rows: " << ingest.errors.size() << "\n";
    return 1;
  }
  return 0;
}

int run_session(WireRole role, const std::string& endpoint, const std::string& ellipsoid_file,
                const FistaOptions& opts) {
  Ellipsoid mine = load_ellipsoid_file(ellipsoid_file);
  MarginResult res = run_wire_session(role, endpoint, mine, opts);

  const char* own_role = role == WireRole::listen ? "target (listening)" : "chaser (connecting)";
  std::cout << "role: " << own_role << "\n";
  std::cout << "margin: " << res.margin << " km (distance between final iterates; overlap is not"
            << " detectable from one side)\n";
  std::cout << "chaser point: " << res.x_star.x() << " " << res.x_star.y() << " "
            << res.x_star.z() << "\n";
  std::cout << "target point: " << res.y_star.x() << " " << res.y_star.y() << " "
            << res.y_star.z() << "\n";
  std::cout << "rounds: " << res.iterations << (res.converged ? " (converged)" : " (iteration cap)")
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"margin: minimum distance between positional-uncertainty ellipsoids"};
  app.require_subcommand(1);

  auto* screen = app.add_subcommand("screen", "batch-screen a conjunction CSV");
  std::string input;
  screen->add_option("input", input, "conjunction CSV (see README for the column contract)")
      ->required();
  std::string method = "fw";
  screen->add_option("--method", method, "margin solver: fw, fista, rimon-boyd, or oracle")
      ->check(CLI::IsMember({"fw", "fista", "rimon-boyd", "oracle"}));
  double sigma = 1.0;
  screen->add_option("--sigma", sigma, "covariance inflation level (semi-axes scale by sigma)");
  double tol = 0;
  auto* tol_opt =
      screen->add_option("--tol", tol, "solver tolerance in km (per-method default when omitted)");
  int max_iter = 0;
  auto* max_iter_opt = screen->add_option("--max-iter", max_iter, "iteration cap");
  bool oracle_check = false;
  screen->add_flag("--oracle-check", oracle_check,
                   "also solve each row with the reference method and report the signed error");
  bool deterministic = false;
  screen->add_flag("--deterministic", deterministic,
                   "drop wall-clock columns so reruns are byte-identical");
  std::string output = "csv";
  screen->add_option("--output", output, "report format on stdout")
      ->check(CLI::IsMember({"csv", "json"}));
  int threads = 1;
  screen->add_option("--threads", threads, "worker threads (row order is preserved)")
      ->check(CLI::PositiveNumber);

  auto* serve = app.add_subcommand("serve", "run the listening (target) agent of a distributed solve");
  std::string listen_endpoint;
  serve->add_option("--listen", listen_endpoint, "host:port to listen on (host optional)")
      ->required();
  std::string serve_ellipsoid;
  serve->add_option("--ellipsoid", serve_ellipsoid, "own ellipsoid file: center line + 3 covariance rows")
      ->required();
  double serve_tol = 1e-3;
  serve->add_option("--tol", serve_tol, "halt step tolerance in km (peers must agree)");
  int serve_max_iter = 50000;
  serve->add_option("--max-iter", serve_max_iter, "round cap (peers must agree)");

  auto* connect = app.add_subcommand("connect", "run the connecting (chaser) agent of a distributed solve");
  std::string connect_endpoint;
  connect->add_option("address", connect_endpoint, "host:port of the listening peer")->required();
  std::string connect_ellipsoid;
  connect->add_option("--ellipsoid", connect_ellipsoid, "own ellipsoid file: center line + 3 covariance rows")
      ->required();
  double connect_tol = 1e-3;
  connect->add_option("--tol", connect_tol, "halt step tolerance in km (peers must agree)");
  int connect_max_iter = 50000;
  connect->add_option("--max-iter", connect_max_iter, "round cap (peers must agree)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*screen) {
      ScreenOptions opts;
      opts.method = method_from_flag(method);
      opts.sigma = sigma;
      if (tol_opt->count() > 0) opts.tol = tol;
      if (max_iter_opt->count() > 0) opts.max_iter = max_iter;
      opts.oracle_check = oracle_check;
      opts.deterministic = deterministic;
      opts.threads = threads;
      return run_screen(input, opts, output);
    }
    FistaOptions session;
    if (*serve) {
      session.tol_step = serve_tol;
      session.max_iter = serve_max_iter;
      return run_session(WireRole::listen, listen_endpoint, serve_ellipsoid, session);
    }
    session.tol_step = connect_tol;
    session.max_iter = connect_max_iter;
    return run_session(WireRole::connect, connect_endpoint, connect_ellipsoid, session);
  } catch (const TransportError& e) {
    std::cerr << "transport error: " << e.what() << "\n";
    return 3;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
