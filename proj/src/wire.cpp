#include "margin/wire.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>
#include <vector>

#include "json.hpp"
#include "margin/errors.hpp"

namespace margin {

namespace {

using nlohmann::json;

json parse_object(const std::string& line, const char* context) {
  json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    throw SchemaError(std::string(context) + ": malformed message: " + line);
  }
  return j;
}

Vec3 point_from(const json& arr) {
  return Vec3(arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>());
}

bool is_point(const json& j) {
  return j.is_array() && j.size() == 3 && j[0].is_number() && j[1].is_number() && j[2].is_number();
}

void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

// "host:port", ":port", or bare "port"
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  auto pos = endpoint.rfind(':');
  if (pos == std::string::npos) return {"", endpoint};
  return {endpoint.substr(0, pos), endpoint.substr(pos + 1)};
}

}  // namespace

FdLineChannel::FdLineChannel(int fd, bool owns) : fd_(fd), owns_(owns) {}

FdLineChannel::~FdLineChannel() {
  if (owns_ && fd_ >= 0) ::close(fd_);
}

void FdLineChannel::send_line(const std::string& line) {
  std::string framed = line;
  framed.push_back('\n');
  size_t off = 0;
  while (off < framed.size()) {
    // MSG_NOSIGNAL turns a peer hangup into EPIPE instead of killing the
    // process; plain files answer ENOTSOCK and get a regular write.
    ssize_t n = ::send(fd_, framed.data() + off, framed.size() - off, MSG_NOSIGNAL);
    if (n < 0 && errno == ENOTSOCK) n = ::write(fd_, framed.data() + off, framed.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ConnectionLost(std::string("write failed: ") + std::strerror(errno));
    }
    off += size_t(n);
  }
}

std::optional<std::string> FdLineChannel::recv_line() {
  while (true) {
    auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    char chunk[4096];
    ssize_t n = ::read(fd_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ConnectionLost(std::string("read failed: ") + std::strerror(errno));
    }
    if (n == 0) {
      if (buffer_.empty()) return std::nullopt;
      std::string line = std::move(buffer_);  // tolerate a missing final newline
      buffer_.clear();
      return line;
    }
    buffer_.append(chunk, size_t(n));
  }
}

int tcp_listen_accept(const std::string& endpoint) {
  auto [host, port] = split_endpoint(endpoint);
  if (port.empty()) throw ConnectionLost("listen endpoint needs a port: " + endpoint);

  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* info = nullptr;
  int rc = ::getaddrinfo(host.empty() ? nullptr : host.c_str(), port.c_str(), &hints, &info);
  if (rc != 0) throw ConnectionLost("cannot resolve " + endpoint + ": " + gai_strerror(rc));

  int listener = -1;
  std::string error = "no usable address";
  for (addrinfo* ai = info; ai != nullptr; ai = ai->ai_next) {
    listener = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (listener < 0) {
      error = std::strerror(errno);
      continue;
    }
    int one = 1;
    ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(listener, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(listener, 1) == 0) break;
    error = std::strerror(errno);
    ::close(listener);
    listener = -1;
  }
  ::freeaddrinfo(info);
  if (listener < 0) throw ConnectionLost("cannot listen on " + endpoint + ": " + error);

  int fd = ::accept(listener, nullptr, nullptr);
  int saved = errno;
  ::close(listener);
  if (fd < 0) throw ConnectionLost("accept failed on " + endpoint + ": " + std::strerror(saved));
  set_nodelay(fd);
  return fd;
}

int tcp_connect(const std::string& endpoint) {
  auto [host, port] = split_endpoint(endpoint);
  if (port.empty()) throw ConnectionLost("connect endpoint needs a port: " + endpoint);
  if (host.empty()) host = "127.0.0.1";

  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* info = nullptr;
  int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &info);
  if (rc != 0) throw ConnectionLost("cannot resolve " + endpoint + ": " + gai_strerror(rc));

  std::string error = "no usable address";
  // Brief retry window so a connecting side started moments before its peer
  // begins listening still succeeds.
  for (int attempt = 0; attempt < 50; ++attempt) {
    bool refused = false;
    for (addrinfo* ai = info; ai != nullptr; ai = ai->ai_next) {
      int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
      if (fd < 0) {
        error = std::strerror(errno);
        continue;
      }
      if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
        ::freeaddrinfo(info);
        set_nodelay(fd);
        return fd;
      }
      error = std::strerror(errno);
      refused = errno == ECONNREFUSED;
      ::close(fd);
    }
    if (!refused) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  ::freeaddrinfo(info);
  throw ConnectionLost("cannot connect to " + endpoint + ": " + error);
}

JsonLineTransport::JsonLineTransport(LineChannel& channel, AgentId self, double tol, int max_iter)
    : channel_(channel),
      self_(self),
      peer_(self == AgentId::chaser ? AgentId::target : AgentId::chaser) {
  json mine{{"v", 1}, {"role", agent_name(self_)}, {"tol", tol}, {"max_iter", max_iter}};
  channel_.send_line(mine.dump());

  auto line = channel_.recv_line();
  if (!line) throw ConnectionLost("stream ended during the handshake");
  json peer = parse_object(*line, "handshake");
  if (peer.size() != 4 || !peer.contains("v") || !peer.contains("role") || !peer.contains("tol") ||
      !peer.contains("max_iter") || !peer["v"].is_number_integer() || !peer["role"].is_string() ||
      !peer["tol"].is_number() || !peer["max_iter"].is_number_integer()) {
    throw SchemaError("handshake: unexpected message shape: " + *line);
  }
  if (peer["v"].get<int>() != 1) {
    throw HandshakeMismatch("peer speaks protocol version " + peer["v"].dump() + ", expected 1");
  }
  if (peer["role"].get<std::string>() != agent_name(peer_)) {
    throw HandshakeMismatch("peer role is \"" + peer["role"].get<std::string>() +
                            "\", expected \"" + agent_name(peer_) + "\"");
  }
  if (peer["tol"].get<double>() != tol) {
    throw HandshakeMismatch("peer halts at tol " + peer["tol"].dump() + ", ours is " +
                            json(tol).dump());
  }
  if (peer["max_iter"].get<int>() != max_iter) {
    throw HandshakeMismatch("peer caps at " + peer["max_iter"].dump() + " rounds, ours is " +
                            std::to_string(max_iter));
  }
}

void JsonLineTransport::send(const AgentMessage& m) {
  json j{{"k", m.iteration},
         {"p", json::array({m.point.x(), m.point.y(), m.point.z()})},
         {"halt", m.halt}};
  channel_.send_line(j.dump());
}

AgentMessage JsonLineTransport::recv() {
  auto line = channel_.recv_line();
  if (!line) throw ConnectionLost("stream ended before the session finished");
  json j = parse_object(*line, "round");
  if (j.size() != 3 || !j.contains("k") || !j.contains("p") || !j.contains("halt") ||
      !j["k"].is_number_integer() || !is_point(j["p"]) || !j["halt"].is_boolean()) {
    throw SchemaError("round: unexpected message shape: " + *line);
  }
  AgentMessage m;
  m.iteration = j["k"].get<int>();
  m.point = point_from(j["p"]);
  m.agent_id = peer_;
  m.halt = j["halt"].get<bool>();
  return m;
}

void JsonLineTransport::send_final(const FinalMessage& m) {
  json j{{"k", m.iteration},
         {"x", json::array({m.point.x(), m.point.y(), m.point.z()})},
         {"done", true}};
  channel_.send_line(j.dump());
}

FinalMessage JsonLineTransport::recv_final() {
  auto line = channel_.recv_line();
  if (!line) throw ConnectionLost("stream ended before the peer's final report");
  json j = parse_object(*line, "final");
  if (j.size() != 3 || !j.contains("k") || !j.contains("x") || !j.contains("done") ||
      !j["k"].is_number_integer() || !is_point(j["x"]) || j["done"] != true) {
    throw SchemaError("final: unexpected message shape: " + *line);
  }
  FinalMessage m;
  m.iteration = j["k"].get<int>();
  m.point = point_from(j["x"]);
  return m;
}

MarginResult run_wire_session_on_channel(LineChannel& channel, AgentId self, const Ellipsoid& mine,
                                         const FistaOptions& opts) {
  JsonLineTransport transport(channel, self, opts.tol_step, opts.max_iter);
  FistaTrace* trace = self == AgentId::chaser ? opts.chaser_trace : opts.target_trace;
  SessionOutcome out = run_agent_session(make_agent(self, mine), transport, opts, trace);

  MarginResult res;
  res.method = Method::fista;
  if (self == AgentId::chaser) {
    res.x_star = out.x_final;
    res.y_star = out.peer_final;
  } else {
    res.x_star = out.peer_final;
    res.y_star = out.x_final;
  }
  res.margin = (res.x_star - res.y_star).norm();
  res.iterations = out.iterations;
  res.converged = out.converged;
  res.overlap = false;
  return res;
}

MarginResult run_wire_session(WireRole role, const std::string& endpoint, const Ellipsoid& mine,
                              const FistaOptions& opts) {
  int fd = role == WireRole::listen ? tcp_listen_accept(endpoint) : tcp_connect(endpoint);
  FdLineChannel channel(fd);
  AgentId self = role == WireRole::listen ? AgentId::target : AgentId::chaser;
  return run_wire_session_on_channel(channel, self, mine, opts);
}

Ellipsoid load_ellipsoid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open ellipsoid file " + path);

  std::vector<std::array<double, 3>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    std::array<double, 3> row{};
    if (!(fields >> row[0] >> row[1] >> row[2])) {
      throw SchemaError(path + ":" + std::to_string(lineno) + ": expected three numbers");
    }
    std::string rest;
    if (fields >> rest) {
      throw SchemaError(path + ":" + std::to_string(lineno) + ": trailing content \"" + rest + "\"");
    }
    for (double v : row) {
      if (!std::isfinite(v)) {
        throw SchemaError(path + ":" + std::to_string(lineno) + ": non-finite value");
      }
    }
    rows.push_back(row);
  }
  if (rows.size() != 4) {
    throw SchemaError(path + ": expected 4 lines (center, then 3 covariance rows), got " +
                      std::to_string(rows.size()));
  }

  Vec3 center(rows[0][0], rows[0][1], rows[0][2]);
  Mat3 cov;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) cov(i, j) = rows[size_t(i) + 1][size_t(j)];
  }
  double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw SchemaError(path + ": covariance rows are not symmetric");
  }
  return Ellipsoid::from_covariance(center, SymMat3::from_upper(cov));
}

}  // namespace margin
