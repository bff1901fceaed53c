#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "ringtally/message.hpp"
#include "ringtally/transport.hpp"

namespace ringtally::transport {

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;

  /// Parses `host:port`. Throws Errc::kInvalidInput.
  static Endpoint parse(std::string_view text);
  std::string str() const;

  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

/// Participant index -> address. File format: one `<index> <host:port>` per line.
using Roster = std::map<std::size_t, Endpoint>;

Roster parse_roster(std::string_view text);
Roster load_roster(const std::filesystem::path& path);

class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& other) noexcept;
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket();

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }

  void write_all(std::string_view data);
  /// One LF-terminated line without the LF; nullopt on orderly EOF before any
  /// byte of a new line. Throws kTimeout / kTransport / MalformedLine.
  std::optional<std::string> read_line(std::chrono::milliseconds timeout);

 private:
  int fd_ = -1;
  std::string buffer_;
};

class Listener {
 public:
  /// Binds and listens; port 0 picks an ephemeral port.
  explicit Listener(const Endpoint& at);

  std::uint16_t port() const { return port_; }
  Endpoint endpoint() const { return {host_, port_}; }

  /// nullopt when no peer connected within the timeout.
  std::optional<Socket> accept(std::chrono::milliseconds timeout);

 private:
  Socket socket_;
  std::string host_;
  std::uint16_t port_ = 0;
};

struct TcpOptions {
  std::chrono::milliseconds timeout{30'000};
  unsigned retries = 0;
  std::chrono::milliseconds retry_delay{100};
};

/// One connection per leg: connect (with retries), write every line, await `OK`.
void send_leg(const Endpoint& to, const CallLeg& leg, const TcpOptions& options);

/// Reads HELLO..BYE from an accepted connection; the caller then acknowledges.
CallLeg read_leg(Socket& connection, std::size_t self, std::chrono::milliseconds timeout);
void acknowledge(Socket& connection);

/// Loopback TCP transport for in-process runs: one listener and receiver
/// thread per participant. A leg is queued before it is acknowledged, so it is
/// pollable once send_call returns.
class TcpTransport final : public Transport {
 public:
  explicit TcpTransport(std::vector<std::size_t> participants, TcpOptions options = {});
  ~TcpTransport() override;

  TcpTransport(const TcpTransport&) = delete;
  TcpTransport& operator=(const TcpTransport&) = delete;

  std::optional<Delivery> poll() override;
  const Roster& roster() const { return roster_; }

 protected:
  void deliver(const CallLeg& leg) override;

 private:
  void serve(std::size_t index, Listener* listener);

  std::vector<std::size_t> participants_;
  TcpOptions options_;
  Roster roster_;
  std::vector<std::unique_ptr<Listener>> listeners_;
  std::vector<std::thread> threads_;
  std::atomic<bool> stopping_{false};
  std::mutex inbox_mutex_;
  std::deque<Delivery> inbox_;
};

}  // namespace ringtally::transport
