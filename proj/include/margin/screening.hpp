#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "margin/geometry.hpp"

namespace margin {

// Batch screening configuration (mirrors the CLI flags).
struct ScreenOptions {
  Method method = Method::frank_wolfe;
  double sigma = 1.0;
  // Step tolerance for the iterative solvers / oracle tolerance. Unset means
  // each method's own default (1e-3 km for the solvers, 1e-9 km for the
  // oracle).
  std::optional<double> tol;
  std::optional<int> max_iter;
  bool oracle_check = false;   // adds error_vs_oracle per row
  bool deterministic = false;  // drops wall-clock fields from reports
  int threads = 1;
};

// One report line of the screening run.
struct ScreeningRow {
  std::string id;
  double miss_distance = 0;
  double margin = 0;
  Method method = Method::frank_wolfe;
  bool converged = false;
  bool overlap = false;
  int iterations = 0;
  double wall_time_ms = 0;
  bool concern = false;  // margin < chaser_radius + target_radius
  std::optional<double> risk;
  std::optional<double> error_vs_oracle;  // margin minus oracle margin, km
};

// A rejected input row: the file keeps processing, the rejection is reported.
struct RowError {
  int line = 0;  // 1-based line number in the input file
  std::string id;
  std::string message;
};

struct IngestResult {
  std::vector<Conjunction> rows;
  std::vector<RowError> errors;
};

// Reads the conjunction CSV. The header must be exactly
//   id,cx,cy,cz,cxx,cxy,cxz,cyy,cyz,czz,tx,ty,tz,txx,txy,txz,tyy,tyz,tzz,cr,tr,risk
// (positions km, covariance upper triangles km^2, radii km, risk optional
// and <= 0 when present). Covariances are inverted here, exactly once per
// row; rows with singular/indefinite covariances or malformed fields are
// collected into errors with their line numbers. A bad header or wrong
// column count throws SchemaError.
IngestResult ingest_csv(std::istream& in);
IngestResult ingest_csv_file(const std::string& path);

// Screens every conjunction with the configured method at the configured
// sigma level. Rows come back in input order regardless of thread count.
std::vector<ScreeningRow> screen_batch(const std::vector<Conjunction>& rows,
                                       const ScreenOptions& opts);

// Reports. Numbers are written as shortest round-trip decimals, so a rerun
// with identical inputs and flags is byte-identical (wall_time_ms, the one
// non-deterministic column, is dropped under opts.deterministic).
void write_report_csv(std::ostream& out, const std::vector<ScreeningRow>& rows,
                      const ScreenOptions& opts);
void write_report_json(std::ostream& out, const std::vector<ScreeningRow>& rows,
                       const ScreenOptions& opts);

// Run statistics for the human-readable summary (stderr, not the report).
struct Summary {
  int total = 0;
  int concern = 0;
  int overlap = 0;
  int not_converged = 0;
  int margin_above_miss = 0;  // pathology counter: margin > miss + 1e-9
  double wall_time_total_ms = 0;
  // |error_vs_oracle| decade histogram, buckets <1e-9, [1e-9,1e-8), ...,
  // [1e-1,1), >=1; filled only when the check ran.
  std::vector<int> error_decades;
  // risk (log10 collision probability) of concern rows, integer-floor
  // buckets >=-1, -2, ..., -6, <-6; filled only when any risk is present.
  std::vector<int> risk_buckets;
};

Summary summarize(const std::vector<ScreeningRow>& rows);
std::string format_summary(const Summary& s, const ScreenOptions& opts);

}  // namespace margin
