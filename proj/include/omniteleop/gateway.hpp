#pragma once

// Network boundary. A single I/O thread polls
//   - a UDP socket carrying one input frame per datagram,
//   - a TCP listener for cockpit subscribers speaking newline-delimited JSON
//     (inbound: input frames, outbound: state messages).
// Decoded frames go to a caller-supplied handler (normally Session::push).
// publish() never blocks: each subscriber has a bounded queue and is
// disconnected when it overflows.

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "omniteleop/config.hpp"
#include "omniteleop/wire.hpp"

namespace omniteleop {

struct GatewayCounters {
    std::int64_t frames_accepted = 0;
    std::int64_t malformed = 0;
    std::int64_t version_mismatch = 0;
    std::int64_t out_of_order = 0;
    std::int64_t subscribers_dropped = 0;
};

namespace net {

class Fd {
public:
    Fd() = default;
    explicit Fd(int fd) : fd_(fd) {}
    Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
    Fd& operator=(Fd&& o) noexcept {
        if (this != &o) {
            reset();
            fd_ = std::exchange(o.fd_, -1);
        }
        return *this;
    }
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    ~Fd() { reset(); }

    void reset() {
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
    }
    [[nodiscard]] int get() const { return fd_; }
    explicit operator bool() const { return fd_ >= 0; }

private:
    int fd_ = -1;
};

/// Splits "host:port"; an empty host or "*" binds all interfaces.
inline std::pair<std::string, std::string> split_address(const std::string& addr) {
    const auto colon = addr.rfind(':');
    if (colon == std::string::npos) throw BindError("address '" + addr + "' must be host:port");
    std::string host = addr.substr(0, colon);
    if (host == "*" || host.empty()) host = "0.0.0.0";
    return {host, addr.substr(colon + 1)};
}

inline void set_nonblocking(int fd) { ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL, 0) | O_NONBLOCK); }

inline Fd bind_socket(const std::string& addr, int type) {
    const auto [host, port] = split_address(addr);
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = type;
    hints.ai_flags = AI_PASSIVE;
    addrinfo* res = nullptr;
    if (int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &res); rc != 0)
        throw BindError("cannot resolve '" + addr + "': " + ::gai_strerror(rc));
    std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(res, &::freeaddrinfo);

    Fd fd(::socket(res->ai_family, res->ai_socktype, res->ai_protocol));
    if (!fd) throw BindError(std::string("socket(): ") + std::strerror(errno));
    int one = 1;
    ::setsockopt(fd.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(fd.get(), res->ai_addr, res->ai_addrlen) != 0)
        throw BindError("cannot bind '" + addr + "': " + std::strerror(errno));
    if (type == SOCK_STREAM && ::listen(fd.get(), 16) != 0)
        throw BindError("cannot listen on '" + addr + "': " + std::strerror(errno));
    set_nonblocking(fd.get());
    return fd;
}

inline std::uint16_t local_port(int fd) {
    sockaddr_in sa{};
    socklen_t len = sizeof(sa);
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&sa), &len);
    return ntohs(sa.sin_port);
}

} // namespace net

class Gateway {
public:
    using FrameHandler = std::function<void(OperatorFrame)>;
    using Clock = std::function<double()>;

    static constexpr std::size_t kMaxLineBytes = 64 * 1024;

    /// clock supplies arrival stamps when cfg.restamp is set; defaults to
    /// seconds since start().
    Gateway(GatewayConfig cfg, FrameHandler handler, Clock clock = {})
        : cfg_(std::move(cfg)), handler_(std::move(handler)), clock_(std::move(clock)) {}

    ~Gateway() { stop(); }

    Gateway(const Gateway&) = delete;
    Gateway& operator=(const Gateway&) = delete;

    /// Binds both endpoints and starts the I/O thread. Throws BindError.
    void start() {
        udp_ = net::bind_socket(cfg_.udp_listen, SOCK_DGRAM);
        listener_ = net::bind_socket(cfg_.stream_listen, SOCK_STREAM);
        int fds[2];
        if (::pipe(fds) != 0) throw BindError("cannot create wake pipe");
        wake_read_ = net::Fd(fds[0]);
        wake_write_ = net::Fd(fds[1]);
        net::set_nonblocking(wake_read_.get());
        net::set_nonblocking(wake_write_.get());
        started_at_ = std::chrono::steady_clock::now();
        if (!clock_) {
            clock_ = [start = started_at_] {
                return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            };
        }
        running_ = true;
        thread_ = std::thread([this] { io_loop(); });
    }

    void stop() {
        if (!running_.exchange(false)) return;
        wake();
        if (thread_.joinable()) thread_.join();
        std::lock_guard lock(mutex_);
        clients_.clear();
    }

    [[nodiscard]] std::uint16_t udp_port() const { return net::local_port(udp_.get()); }
    [[nodiscard]] std::uint16_t stream_port() const { return net::local_port(listener_.get()); }

    /// Queues one line for every subscriber.
    void publish(const std::string& line) {
        {
            std::lock_guard lock(mutex_);
            for (auto& [id, c] : clients_) {
                if (c.closing) continue;
                if (c.outbox.size() >= cfg_.max_subscriber_queue) {
                    c.closing = true;
                    continue;
                }
                c.outbox.push_back(line + '\n');
            }
        }
        wake();
    }

    [[nodiscard]] std::size_t subscriber_count() const {
        std::lock_guard lock(mutex_);
        std::size_t n = 0;
        for (const auto& [id, c] : clients_) n += c.closing ? 0 : 1;
        return n;
    }

    [[nodiscard]] GatewayCounters counters() const {
        std::lock_guard lock(mutex_);
        return counters_;
    }

private:
    struct Client {
        net::Fd fd;
        std::string inbuf;
        std::deque<std::string> outbox;
        std::size_t out_offset = 0;
        bool closing = false;
    };

    void wake() {
        if (wake_write_) {
            const char b = 1;
            [[maybe_unused]] auto n = ::write(wake_write_.get(), &b, 1);
        }
    }

    /// Decodes, filters stale stamps per source, restamps, forwards.
    void ingest(std::string_view payload, const std::string& source) {
        OperatorFrame frame;
        try {
            frame = to_frame(decode_input(payload));
        } catch (const VersionMismatch&) {
            std::lock_guard lock(mutex_);
            ++counters_.version_mismatch;
            return;
        } catch (const Error&) {
            std::lock_guard lock(mutex_);
            ++counters_.malformed;
            return;
        }
        {
            std::lock_guard lock(mutex_);
            auto [it, fresh] = last_sender_t_.try_emplace(source, frame.t);
            if (!fresh) {
                if (frame.t < it->second) {
                    ++counters_.out_of_order;
                    return;
                }
                it->second = frame.t;
            }
            ++counters_.frames_accepted;
        }
        if (cfg_.restamp) frame.t = clock_();
        if (handler_) handler_(std::move(frame));
    }

    void io_loop() {
        std::vector<char> buf(kMaxLineBytes);
        while (running_) {
            std::vector<pollfd> pfds{{wake_read_.get(), POLLIN, 0}, {udp_.get(), POLLIN, 0},
                                     {listener_.get(), POLLIN, 0}};
            std::vector<int> ids;
            {
                std::lock_guard lock(mutex_);
                for (auto it = clients_.begin(); it != clients_.end();) {
                    if (it->second.closing) {
                        ++counters_.subscribers_dropped;
                        it = clients_.erase(it);
                        continue;
                    }
                    short ev = POLLIN;
                    if (!it->second.outbox.empty()) ev |= POLLOUT;
                    pfds.push_back({it->second.fd.get(), ev, 0});
                    ids.push_back(it->first);
                    ++it;
                }
            }
            if (::poll(pfds.data(), pfds.size(), 100) < 0) {
                if (errno == EINTR) continue;
                break;
            }
            if (pfds[0].revents & POLLIN)
                while (::read(wake_read_.get(), buf.data(), buf.size()) > 0) {
                }
            if (pfds[1].revents & POLLIN) {
                while (true) {
                    sockaddr_in from{};
                    socklen_t len = sizeof(from);
                    const ssize_t n = ::recvfrom(udp_.get(), buf.data(), buf.size(), 0,
                                                 reinterpret_cast<sockaddr*>(&from), &len);
                    if (n < 0) break;
                    char host[INET_ADDRSTRLEN] = {};
                    ::inet_ntop(AF_INET, &from.sin_addr, host, sizeof(host));
                    ingest(std::string_view(buf.data(), static_cast<std::size_t>(n)),
                           std::string("udp:") + host + ":" + std::to_string(ntohs(from.sin_port)));
                }
            }
            if (pfds[2].revents & POLLIN) {
                while (true) {
                    const int fd = ::accept(listener_.get(), nullptr, nullptr);
                    if (fd < 0) break;
                    net::set_nonblocking(fd);
                    std::lock_guard lock(mutex_);
                    clients_[next_id_++].fd = net::Fd(fd);
                }
            }
            for (std::size_t i = 0; i < ids.size(); ++i) service_client(ids[i], pfds[3 + i].revents, buf);
        }
    }

    void service_client(int id, short revents, std::vector<char>& buf) {
        std::vector<std::string> lines;
        {
            std::lock_guard lock(mutex_);
            auto it = clients_.find(id);
            if (it == clients_.end()) return;
            Client& c = it->second;
            if (revents & (POLLERR | POLLNVAL)) {
                c.closing = true;
                return;
            }
            if (revents & (POLLIN | POLLHUP)) {
                const ssize_t n = ::recv(c.fd.get(), buf.data(), buf.size(), 0);
                if (n <= 0) {
                    if (n == 0 || (errno != EAGAIN && errno != EWOULDBLOCK)) c.closing = true;
                } else {
                    c.inbuf.append(buf.data(), static_cast<std::size_t>(n));
                    std::size_t pos;
                    while ((pos = c.inbuf.find('\n')) != std::string::npos) {
                        lines.push_back(c.inbuf.substr(0, pos));
                        c.inbuf.erase(0, pos + 1);
                    }
                    if (c.inbuf.size() > kMaxLineBytes) c.closing = true;
                }
            }
            if ((revents & POLLOUT) && !c.closing) {
                while (!c.outbox.empty()) {
                    const std::string& front = c.outbox.front();
                    const ssize_t n = ::send(c.fd.get(), front.data() + c.out_offset, front.size() - c.out_offset,
                                             MSG_NOSIGNAL);
                    if (n < 0) {
                        if (errno != EAGAIN && errno != EWOULDBLOCK) c.closing = true;
                        break;
                    }
                    c.out_offset += static_cast<std::size_t>(n);
                    if (c.out_offset < front.size()) break;
                    c.outbox.pop_front();
                    c.out_offset = 0;
                }
            }
        }
        for (const auto& line : lines)
            if (!line.empty() && line != "\r") ingest(line, "stream:" + std::to_string(id));
    }

    GatewayConfig cfg_;
    FrameHandler handler_;
    Clock clock_;
    std::chrono::steady_clock::time_point started_at_;

    net::Fd udp_, listener_, wake_read_, wake_write_;
    std::atomic<bool> running_{false};
    std::thread thread_;

    mutable std::mutex mutex_;
    std::map<int, Client> clients_;
    int next_id_ = 0;
    std::map<std::string, double> last_sender_t_;
    GatewayCounters counters_;
};

} // namespace omniteleop
