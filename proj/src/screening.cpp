#include "margin/screening.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "margin/errors.hpp"
#include "margin/fista.hpp"
#include "margin/frank_wolfe.hpp"
#include "margin/oracle.hpp"
#include "margin/rimon_boyd.hpp"

namespace margin {

namespace {

constexpr const char* kHeader =
    "id,cx,cy,cz,cxx,cxy,cxz,cyy,cyz,czz,tx,ty,tz,txx,txy,txz,tyy,tyz,tzz,cr,tr,risk";
constexpr int kColumns = 22;

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_field(const std::string& field, const char* name) {
  double value = 0;
  auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || end != field.data() + field.size()) {
    throw SchemaError(std::string(name) + " is not a number: \"" + field + "\"");
  }
  return value;
}

SymMat3 parse_covariance(const std::vector<std::string>& f, size_t at, const char* which) {
  std::string base(which);
  return SymMat3{parse_field(f[at + 0], (base + "xx").c_str()),
                 parse_field(f[at + 1], (base + "xy").c_str()),
                 parse_field(f[at + 2], (base + "xz").c_str()),
                 parse_field(f[at + 3], (base + "yy").c_str()),
                 parse_field(f[at + 4], (base + "yz").c_str()),
                 parse_field(f[at + 5], (base + "zz").c_str())};
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;  // 64 bytes always suffice for a double
  return std::string(buf, end);
}

ScreeningRow screen_one(const Conjunction& raw, const ScreenOptions& opts) {
  ScreeningRow row;
  row.id = raw.id;
  row.method = opts.method;
  row.risk = raw.risk;

  Conjunction scaled(raw.id, scale_sigma(raw.chaser, opts.sigma),
                     scale_sigma(raw.target, opts.sigma), raw.chaser_radius, raw.target_radius,
                     raw.risk);
  row.miss_distance = miss_distance(scaled);

  auto start = std::chrono::steady_clock::now();
  MarginResult res;
  try {
    switch (opts.method) {
      case Method::frank_wolfe: {
        FwOptions o;
        if (opts.tol) o.tol_step = *opts.tol;
        if (opts.max_iter) o.max_iter = *opts.max_iter;
        res = solve_fw(scaled, o);
        break;
      }
      case Method::fista: {
        FistaOptions o;
        if (opts.tol) o.tol_step = *opts.tol;
        if (opts.max_iter) o.max_iter = *opts.max_iter;
        res = solve_fista(scaled, o);
        break;
      }
      case Method::rimon_boyd:
        res = rb_margin(scaled);
        break;
      case Method::oracle: {
        OracleOptions o;
        if (opts.tol) o.tol = *opts.tol;
        if (opts.max_iter) o.max_iter = *opts.max_iter;
        res = solve_oracle(scaled, o);
        break;
      }
    }
  } catch (const Error&) {
    // a solver failure (no real eigenvalue, singular blend) becomes a
    // non-converged row instead of killing the batch
    res.margin = std::numeric_limits<double>::quiet_NaN();
    res.converged = false;
  }
  auto stop = std::chrono::steady_clock::now();

  row.wall_time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  row.margin = res.margin;
  row.converged = res.converged;
  row.overlap = res.overlap;
  row.iterations = res.iterations;
  row.concern = res.margin < raw.chaser_radius + raw.target_radius;

  if (opts.oracle_check) {
    MarginResult truth = solve_oracle(scaled);
    row.error_vs_oracle = relative_error(res.margin, truth.margin);
  }
  return row;
}

}  // namespace

IngestResult ingest_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty input: missing header line");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) {
    throw SchemaError("unexpected header; the screening CSV must start with exactly: " +
                      std::string(kHeader));
  }

  IngestResult result;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    std::vector<std::string> f = split_fields(line);
    if (int(f.size()) != kColumns) {
      throw SchemaError("line " + std::to_string(lineno) + ": expected " +
                        std::to_string(kColumns) + " columns, got " + std::to_string(f.size()));
    }
    const std::string& id = f[0];
    try {
      if (id.empty()) throw SchemaError("empty id");
      Vec3 chaser_center(parse_field(f[1], "cx"), parse_field(f[2], "cy"),
                         parse_field(f[3], "cz"));
      SymMat3 chaser_cov = parse_covariance(f, 4, "c");
      Vec3 target_center(parse_field(f[10], "tx"), parse_field(f[11], "ty"),
                         parse_field(f[12], "tz"));
      SymMat3 target_cov = parse_covariance(f, 13, "t");
      double cr = parse_field(f[19], "cr");
      double tr = parse_field(f[20], "tr");
      std::optional<double> risk;
      if (!f[21].empty()) risk = parse_field(f[21], "risk");

      result.rows.emplace_back(id, Ellipsoid::from_covariance(chaser_center, chaser_cov),
                               Ellipsoid::from_covariance(target_center, target_cov), cr, tr,
                               risk);
    } catch (const Error& e) {
      result.errors.push_back(RowError{lineno, id, e.what()});
    }
  }
  return result;
}

IngestResult ingest_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open input file " + path);
  return ingest_csv(in);
}

std::vector<ScreeningRow> screen_batch(const std::vector<Conjunction>& rows,
                                       const ScreenOptions& opts) {
  std::vector<ScreeningRow> out(rows.size());
  if (rows.empty()) return out;

  int workers = std::max(1, std::min<int>(opts.threads, int(rows.size())));
  std::atomic<size_t> next{0};
  auto drain = [&] {
    for (size_t i = next.fetch_add(1); i < rows.size(); i = next.fetch_add(1)) {
      out[i] = screen_one(rows[i], opts);
    }
  };
  if (workers == 1) {
    drain();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(size_t(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(drain);
    for (auto& t : pool) t.join();
  }
  return out;
}

void write_report_csv(std::ostream& out, const std::vector<ScreeningRow>& rows,
                      const ScreenOptions& opts) {
  out << "id,miss_distance,margin,method,converged,overlap,iterations";
  if (!opts.deterministic) out << ",wall_time_ms";
  out << ",concern,risk";
  if (opts.oracle_check) out << ",error_vs_oracle";
  out << "\n";

  for (const ScreeningRow& r : rows) {
    out << r.id << ',' << format_double(r.miss_distance) << ',' << format_double(r.margin) << ','
        << method_name(r.method) << ',' << (r.converged ? "true" : "false") << ','
        << (r.overlap ? "true" : "false") << ',' << r.iterations;
    if (!opts.deterministic) out << ',' << format_double(r.wall_time_ms);
    out << ',' << (r.concern ? "true" : "false") << ',';
    if (r.risk) out << format_double(*r.risk);
    if (opts.oracle_check) {
      out << ',';
      if (r.error_vs_oracle) out << format_double(*r.error_vs_oracle);
    }
    out << "\n";
  }
}

void write_report_json(std::ostream& out, const std::vector<ScreeningRow>& rows,
                       const ScreenOptions& opts) {
  nlohmann::ordered_json report = nlohmann::ordered_json::array();
  for (const ScreeningRow& r : rows) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["miss_distance"] = r.miss_distance;
    j["margin"] = r.margin;
    j["method"] = method_name(r.method);
    j["converged"] = r.converged;
    j["overlap"] = r.overlap;
    j["iterations"] = r.iterations;
    if (!opts.deterministic) j["wall_time_ms"] = r.wall_time_ms;
    j["concern"] = r.concern;
    j["risk"] = r.risk ? nlohmann::ordered_json(*r.risk) : nlohmann::ordered_json(nullptr);
    if (opts.oracle_check) {
      j["error_vs_oracle"] =
          r.error_vs_oracle ? nlohmann::ordered_json(*r.error_vs_oracle) : nlohmann::ordered_json(nullptr);
    }
    report.push_back(std::move(j));
  }
  out << report.dump(2) << "\n";
}

Summary summarize(const std::vector<ScreeningRow>& rows) {
  Summary s;
  bool any_error = false;
  bool any_risk = false;
  for (const ScreeningRow& r : rows) {
    any_error = any_error || r.error_vs_oracle.has_value();
    any_risk = any_risk || r.risk.has_value();
  }
  if (any_error) s.error_decades.assign(11, 0);
  if (any_risk) s.risk_buckets.assign(7, 0);

  for (const ScreeningRow& r : rows) {
    ++s.total;
    if (r.concern) ++s.concern;
    if (r.overlap) ++s.overlap;
    if (!r.converged) ++s.not_converged;
    if (r.margin > r.miss_distance + 1e-9) ++s.margin_above_miss;
    s.wall_time_total_ms += r.wall_time_ms;

    if (r.error_vs_oracle) {
      double e = std::abs(*r.error_vs_oracle);
      int bucket;
      if (!(e >= 1e-9)) {
        bucket = 0;  // includes NaN-free tiny errors; NaN lands in the top bucket below
      } else if (e >= 1.0) {
        bucket = 10;
      } else {
        bucket = int(std::floor(std::log10(e))) + 10;
        bucket = std::min(std::max(bucket, 1), 9);
      }
      if (std::isnan(e)) bucket = 10;
      ++s.error_decades[size_t(bucket)];
    }
    if (r.concern && r.risk) {
      double f = std::floor(*r.risk);
      int bucket;
      if (f >= -1) {
        bucket = 0;
      } else if (f < -6) {
        bucket = 6;
      } else {
        bucket = -int(f) - 1;  // f in [-6, -2]
      }
      ++s.risk_buckets[size_t(bucket)];
    }
  }
  return s;
}

std::string format_summary(const Summary& s, const ScreenOptions& opts) {
  std::ostringstream out;
  out << "screened " << s.total << " conjunction" << (s.total == 1 ? "" : "s");
  if (!opts.deterministic && s.wall_time_total_ms > 0) {
    out << " in " << format_double(s.wall_time_total_ms) << " ms";
    if (s.total > 0) {
      out << " (" << format_double(1000.0 * s.total / s.wall_time_total_ms) << " rows/s)";
    }
  }
  out << "\n";
  out << "  concern: " << s.concern << "   overlap: " << s.overlap
      << "   not converged: " << s.not_converged << "   margin > miss: " << s.margin_above_miss
      << "\n";

  if (!s.error_decades.empty()) {
    static const char* labels[11] = {"<1e-9", "1e-9", "1e-8", "1e-7", "1e-6", "1e-5",
                                     "1e-4",  "1e-3", "1e-2", "1e-1", ">=1"};
    out << "  |margin - oracle| decades:";
    for (size_t i = 0; i < s.error_decades.size(); ++i) {
      out << " " << labels[i] << ":" << s.error_decades[i];
    }
    out << "\n";
  }
  if (!s.risk_buckets.empty()) {
    static const char* labels[7] = {">=-1", "-2", "-3", "-4", "-5", "-6", "<-6"};
    out << "  log10 risk of concern rows:";
    for (size_t i = 0; i < s.risk_buckets.size(); ++i) {
      out << " " << labels[i] << ":" << s.risk_buckets[i];
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace margin
