#include "ringtally/tcp.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <utility>

#include "ringtally/error.hpp"

namespace ringtally::transport {

namespace {

constexpr std::size_t kMaxLineBytes = 1 << 20;

std::string errno_text() { return std::strerror(errno); }

/// Waits for `events` on fd; false on timeout.
bool wait_for(int fd, short events, std::chrono::milliseconds timeout) {
  pollfd pfd{fd, events, 0};
  for (;;) {
    const int rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
    if (rc > 0) return true;
    if (rc == 0) return false;
    if (errno != EINTR) throw Error(Errc::kTransport, "poll: " + errno_text());
  }
}

struct AddrInfoDeleter {
  void operator()(addrinfo* info) const { ::freeaddrinfo(info); }
};

std::unique_ptr<addrinfo, AddrInfoDeleter> resolve(const Endpoint& at, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* out = nullptr;
  const std::string port = std::to_string(at.port);
  const int rc = ::getaddrinfo(at.host.empty() ? nullptr : at.host.c_str(), port.c_str(), &hints, &out);
  if (rc != 0) throw Error(Errc::kTransport, "resolve " + at.str() + ": " + ::gai_strerror(rc));
  return std::unique_ptr<addrinfo, AddrInfoDeleter>(out);
}

Socket connect_once(const Endpoint& to) {
  auto info = resolve(to, false);
  std::string last_error = "no address";
  for (addrinfo* ai = info.get(); ai != nullptr; ai = ai->ai_next) {
    Socket s(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
    if (!s.valid()) {
      last_error = errno_text();
      continue;
    }
    if (::connect(s.fd(), ai->ai_addr, ai->ai_addrlen) == 0) {
      int one = 1;
      ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return s;
    }
    last_error = errno_text();
  }
  throw Error(Errc::kTransport, "connect " + to.str() + ": " + last_error);
}

}  // namespace

Endpoint Endpoint::parse(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw Error(Errc::kInvalidInput, "expected host:port, got '" + std::string(text) + "'");
  }
  const std::string_view port_text = text.substr(colon + 1);
  unsigned value = 0;
  const auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), value);
  if (port_text.empty() || ec != std::errc{} || ptr != port_text.data() + port_text.size() ||
      value > 65535) {
    throw Error(Errc::kInvalidInput, "bad port in '" + std::string(text) + "'");
  }
  return {std::string(text.substr(0, colon)), static_cast<std::uint16_t>(value)};
}

std::string Endpoint::str() const { return host + ":" + std::to_string(port); }

Roster parse_roster(std::string_view text) {
  Roster roster;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto space = line.find(' ');
    if (space == std::string_view::npos) throw MalformedLine("expected '<index> <host:port>'", 0, line_no);
    std::size_t index = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + space, index);
    if (ec != std::errc{} || ptr != line.data() + space || index == 0) {
      throw MalformedLine("bad participant index", 0, line_no);
    }
    Endpoint at;
    try {
      at = Endpoint::parse(line.substr(space + 1));
    } catch (const Error&) {
      throw MalformedLine("bad address", space + 1, line_no);
    }
    if (!roster.emplace(index, std::move(at)).second) {
      throw MalformedLine("duplicate participant " + std::to_string(index), 0, line_no);
    }
  }
  return roster;
}

Roster load_roster(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kInvalidInput, "cannot read roster " + path.string());
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_roster(text);
}

Socket::Socket(Socket&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)), buffer_(std::move(other.buffer_)) {}

Socket& Socket::operator=(Socket&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = std::exchange(other.fd_, -1);
    buffer_ = std::move(other.buffer_);
  }
  return *this;
}

Socket::~Socket() {
  if (fd_ >= 0) ::close(fd_);
}

void Socket::write_all(std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(fd_, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(Errc::kTransport, "send: " + errno_text());
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

std::optional<std::string> Socket::read_line(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    if (const auto lf = buffer_.find('\n'); lf != std::string::npos) {
      std::string line = buffer_.substr(0, lf);
      buffer_.erase(0, lf + 1);
      return line;
    }
    if (buffer_.size() > kMaxLineBytes) throw MalformedLine("line exceeds 1 MiB", buffer_.size());

    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0 || !wait_for(fd_, POLLIN, left)) {
      throw Error(Errc::kTimeout, "no data within " + std::to_string(timeout.count()) + " ms");
    }
    char chunk[4096];
    const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(Errc::kTransport, "recv: " + errno_text());
    }
    if (n == 0) {
      if (buffer_.empty()) return std::nullopt;
      throw Error(Errc::kTransport, "connection closed mid-line");
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

Listener::Listener(const Endpoint& at) : host_(at.host) {
  auto info = resolve(at, true);
  std::string last_error = "no address";
  for (addrinfo* ai = info.get(); ai != nullptr; ai = ai->ai_next) {
    Socket s(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
    if (!s.valid()) continue;
    int one = 1;
    ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(s.fd(), ai->ai_addr, ai->ai_addrlen) != 0 || ::listen(s.fd(), 64) != 0) {
      last_error = errno_text();
      continue;
    }
    sockaddr_storage bound{};
    socklen_t len = sizeof bound;
    ::getsockname(s.fd(), reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = ntohs(bound.ss_family == AF_INET6 ? reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port
                                              : reinterpret_cast<sockaddr_in*>(&bound)->sin_port);
    socket_ = std::move(s);
    return;
  }
  throw Error(Errc::kTransport, "listen " + at.str() + ": " + last_error);
}

std::optional<Socket> Listener::accept(std::chrono::milliseconds timeout) {
  if (!wait_for(socket_.fd(), POLLIN, timeout)) return std::nullopt;
  const int fd = ::accept(socket_.fd(), nullptr, nullptr);
  if (fd < 0) {
    if (errno == EINTR || errno == EAGAIN || errno == ECONNABORTED) return std::nullopt;
    throw Error(Errc::kTransport, "accept: " + errno_text());
  }
  return Socket(fd);
}

void send_leg(const Endpoint& to, const CallLeg& leg, const TcpOptions& options) {
  Socket s;
  for (unsigned attempt = 0;; ++attempt) {
    try {
      s = connect_once(to);
      break;
    } catch (const Error&) {
      if (attempt >= options.retries) throw;
      std::this_thread::sleep_for(options.retry_delay);
    }
  }
  std::string payload;
  for (const auto& message : leg.messages) payload += encode(message);
  s.write_all(payload);
  const auto reply = s.read_line(options.timeout);
  if (!reply) throw Error(Errc::kTransport, to.str() + " closed the call without OK");
  if (*reply != "OK") throw Error(Errc::kTransport, to.str() + " answered '" + *reply + "'");
}

CallLeg read_leg(Socket& connection, std::size_t self, std::chrono::milliseconds timeout) {
  CallLeg leg;
  leg.to = self;
  for (;;) {
    auto line = connection.read_line(timeout);
    if (!line) throw Error(Errc::kTransport, "caller hung up before BYE");
    ProtocolMessage message = decode(*line);
    if (leg.messages.empty()) {
      if (message.kind != MessageKind::kHello) throw MalformedLine("call does not open with HELLO", 0);
      leg.from = message.payload[0].get_ui();
    }
    const bool done = message.kind == MessageKind::kBye;
    leg.messages.push_back(std::move(message));
    if (done) break;
  }
  validate_leg(leg);
  return leg;
}

void acknowledge(Socket& connection) { connection.write_all("OK\n"); }

TcpTransport::TcpTransport(std::vector<std::size_t> participants, TcpOptions options)
    : participants_(std::move(participants)), options_(options) {
  for (const std::size_t p : participants_) {
    auto listener = std::make_unique<Listener>(Endpoint{"127.0.0.1", 0});
    roster_[p] = listener->endpoint();
    listeners_.push_back(std::move(listener));
  }
  for (std::size_t i = 0; i < participants_.size(); ++i) {
    threads_.emplace_back(&TcpTransport::serve, this, participants_[i], listeners_[i].get());
  }
}

TcpTransport::~TcpTransport() {
  stopping_ = true;
  for (auto& t : threads_) t.join();
}

void TcpTransport::serve(std::size_t index, Listener* listener) {
  while (!stopping_) {
    std::optional<Socket> connection;
    try {
      connection = listener->accept(std::chrono::milliseconds(50));
    } catch (const Error&) {
      continue;
    }
    if (!connection) continue;
    try {
      CallLeg leg = read_leg(*connection, index, options_.timeout);
      {
        std::lock_guard lock(inbox_mutex_);
        inbox_.push_back({index, std::move(leg)});
      }
      acknowledge(*connection);
    } catch (const Error&) {
      // Dropping the connection without OK surfaces the fault at the caller.
    }
  }
}

std::optional<Delivery> TcpTransport::poll() {
  std::lock_guard lock(inbox_mutex_);
  if (inbox_.empty()) return std::nullopt;
  Delivery next = std::move(inbox_.front());
  inbox_.pop_front();
  return next;
}

void TcpTransport::deliver(const CallLeg& leg) {
  auto send_to = [&](std::size_t index) {
    const auto it = roster_.find(index);
    if (it == roster_.end()) throw Error(Errc::kTransport, "no endpoint for participant " + std::to_string(index));
    send_leg(it->second, leg, options_);
  };
  if (leg.to != kBroadcast) {
    send_to(leg.to);
    return;
  }
  for (const std::size_t p : participants_) {
    if (p != leg.from) send_to(p);
  }
}

}  // namespace ringtally::transport
