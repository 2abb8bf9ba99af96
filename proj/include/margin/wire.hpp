#pragma once

#include <memory>
#include <optional>
#include <string>

#include "margin/fista.hpp"

namespace margin {

// Newline-delimited text channel over some reliable byte stream. recv_line
// returns std::nullopt on orderly end-of-stream; implementations throw
// ConnectionLost on read/write failures.
class LineChannel {
 public:
  virtual ~LineChannel() = default;
  virtual void send_line(const std::string& line) = 0;
  virtual std::optional<std::string> recv_line() = 0;
};

// LineChannel over a connected socket (or any stream file descriptor).
class FdLineChannel : public LineChannel {
 public:
  // Takes ownership of fd when owns is true.
  explicit FdLineChannel(int fd, bool owns = true);
  ~FdLineChannel() override;

  FdLineChannel(const FdLineChannel&) = delete;
  FdLineChannel& operator=(const FdLineChannel&) = delete;

  void send_line(const std::string& line) override;
  std::optional<std::string> recv_line() override;

 private:
  int fd_;
  bool owns_;
  std::string buffer_;
};

// endpoint is "host:port"; listen accepts ":port" or "port" to bind all
// interfaces. Both return a connected stream socket fd or throw
// ConnectionLost.
int tcp_listen_accept(const std::string& endpoint);
int tcp_connect(const std::string& endpoint);

// Message transport speaking the line-delimited JSON protocol:
//   handshake  {"v":1,"role":"chaser"|"target","tol":<f>,"max_iter":<n>}
//   round      {"k":<n>,"p":[<f>,<f>,<f>],"halt":<bool>}
//   final      {"k":<n>,"x":[<f>,<f>,<f>],"done":true}
// Numbers are emitted as shortest round-trip decimals, so a value crosses
// the wire bit-exactly. The constructor performs the handshake: both sides
// must agree on protocol version, opposite roles, tol, and max_iter, else
// HandshakeMismatch. A stream that ends before the session's final message
// surfaces as ConnectionLost.
class JsonLineTransport : public Transport {
 public:
  JsonLineTransport(LineChannel& channel, AgentId self, double tol, int max_iter);

  void send(const AgentMessage& m) override;
  AgentMessage recv() override;
  void send_final(const FinalMessage& m) override;
  FinalMessage recv_final() override;

 private:
  LineChannel& channel_;
  AgentId self_;
  AgentId peer_;
};

enum class WireRole { listen, connect };

// Runs one side of a distributed margin session over TCP. The listening side
// plays the target agent, the connecting side the chaser (the iteration is
// symmetric; the assignment only labels the messages). The result carries
// the raw distance between the two final iterates: overlap detection needs
// both shape matrices, which never cross the wire, so no overlap clamping
// happens here.
MarginResult run_wire_session(WireRole role, const std::string& endpoint,
                              const Ellipsoid& mine, const FistaOptions& opts = {});

// Same session against an already-established channel; used by
// run_wire_session and directly by tests.
MarginResult run_wire_session_on_channel(LineChannel& channel, AgentId self,
                                         const Ellipsoid& mine, const FistaOptions& opts = {});

// Parses the 4-line ellipsoid description used by the serve/connect
// commands: line 1 the center (km), lines 2-4 the covariance rows (km^2).
// The covariance is inverted here, once. Throws SchemaError on malformed
// input and NotPositiveDefinite for bad covariances.
Ellipsoid load_ellipsoid_file(const std::string& path);

}  // namespace margin
