#pragma once

// Topic-based publish/subscribe. Every subscription replays its topic from
// the first message; delivery is FIFO per topic within one broker.
//
// Two implementations share the interface: InProcessBroker, and TcpBroker
// talking to a TcpBrokerServer. On the wire every message is one frame:
//
//   <topic-length> <topic> <payload-length>\n<payload>
//
// A client subscribes by sending a frame on the control topic `$subscribe`
// whose payload is the topic name; the server then streams that topic's
// frames back on the same connection.

#include "error.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

namespace kitchenforge {

inline constexpr std::string_view kSubscribeTopic = "$subscribe";

inline void check_topic(std::string_view topic) {
    if (topic.empty()) throw std::invalid_argument("topic name is empty");
    for (char c : topic) {
        if (std::isspace(static_cast<unsigned char>(c)))
            throw std::invalid_argument("topic name contains whitespace: '" + std::string(topic) + "'");
    }
}

class Subscription {
public:
    virtual ~Subscription() = default;
    /// Next message, or nullopt on timeout or once the stream has ended.
    virtual std::optional<std::string> next(std::chrono::milliseconds timeout) = 0;
    /// True once the stream has ended (broker stopped or connection lost).
    [[nodiscard]] virtual bool closed() const = 0;
};

class Broker {
public:
    virtual ~Broker() = default;
    virtual void publish(std::string const& topic, std::string const& payload) = 0;
    virtual std::unique_ptr<Subscription> subscribe(std::string const& topic) = 0;
    virtual void stop() = 0;
};

class InProcessBroker final : public Broker {
    struct State {
        std::mutex mutex;
        std::condition_variable cv;
        std::map<std::string, std::vector<std::string>> log;
        bool stopped = false;
    };

    class Sub final : public Subscription {
    public:
        Sub(std::shared_ptr<State> state, std::string topic) : state_(std::move(state)), topic_(std::move(topic)) {}

        std::optional<std::string> next(std::chrono::milliseconds timeout) override {
            std::unique_lock lock(state_->mutex);
            auto ready = [&] { return state_->log[topic_].size() > cursor_ || state_->stopped; };
            state_->cv.wait_for(lock, timeout, ready);
            auto const& messages = state_->log[topic_];
            if (messages.size() > cursor_) return messages[cursor_++];
            if (state_->stopped) closed_ = true;
            return std::nullopt;
        }

        [[nodiscard]] bool closed() const override { return closed_; }

    private:
        std::shared_ptr<State> state_;
        std::string topic_;
        std::size_t cursor_ = 0;
        bool closed_ = false;
    };

public:
    void publish(std::string const& topic, std::string const& payload) override {
        check_topic(topic);
        {
            std::lock_guard lock(state_->mutex);
            if (state_->stopped) throw BrokerError("publish on a stopped broker");
            state_->log[topic].push_back(payload);
        }
        state_->cv.notify_all();
    }

    std::unique_ptr<Subscription> subscribe(std::string const& topic) override {
        check_topic(topic);
        return std::make_unique<Sub>(state_, topic);
    }

    void stop() override {
        {
            std::lock_guard lock(state_->mutex);
            state_->stopped = true;
        }
        state_->cv.notify_all();
    }

private:
    std::shared_ptr<State> state_ = std::make_shared<State>();
};

struct Frame {
    std::string topic;
    std::string payload;
};

inline std::string encode_frame(std::string_view topic, std::string_view payload) {
    std::string out = std::to_string(topic.size());
    out += ' ';
    out += topic;
    out += ' ';
    out += std::to_string(payload.size());
    out += '\n';
    out += payload;
    return out;
}

/// Incremental frame decoder over a byte stream.
class FrameDecoder {
public:
    void feed(std::string_view bytes) { buffer_.append(bytes); }

    /// Next complete frame, or nullopt when more bytes are needed. Throws
    /// BrokerError on a malformed header.
    std::optional<Frame> pop() {
        auto nl = buffer_.find('\n');
        if (nl == std::string::npos) {
            if (buffer_.size() > 4096) throw BrokerError("frame header too long");
            return std::nullopt;
        }
        std::string_view header(buffer_.data(), nl);
        auto sp1 = header.find(' ');
        auto sp2 = header.rfind(' ');
        if (sp1 == std::string_view::npos || sp1 == sp2) throw BrokerError("malformed frame header");
        auto topic_len = to_size(header.substr(0, sp1));
        auto topic = header.substr(sp1 + 1, sp2 - sp1 - 1);
        auto payload_len = to_size(header.substr(sp2 + 1));
        if (topic.size() != topic_len) throw BrokerError("frame topic length mismatch");
        if (buffer_.size() - nl - 1 < payload_len) return std::nullopt;
        Frame f{std::string(topic), buffer_.substr(nl + 1, payload_len)};
        buffer_.erase(0, nl + 1 + payload_len);
        return f;
    }

private:
    static std::size_t to_size(std::string_view s) {
        if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
            throw BrokerError("frame length is not a number");
        return static_cast<std::size_t>(std::stoull(std::string(s)));
    }

    std::string buffer_;
};

struct BrokerAddress {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;
};

/// "host:port"; an empty string falls back to $KITCHENFORGE_BROKER_ADDR,
/// then to 127.0.0.1:9092.
inline BrokerAddress parse_broker_address(std::string text) {
    if (text.empty()) {
        if (char const* env = std::getenv("KITCHENFORGE_BROKER_ADDR")) text = env;
    }
    if (text.empty()) text = "127.0.0.1:9092";
    auto colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0) throw std::invalid_argument("broker address must be host:port");
    BrokerAddress a;
    a.host = text.substr(0, colon);
    auto port = std::stoul(text.substr(colon + 1));
    if (port > 65535) throw std::invalid_argument("broker port out of range");
    a.port = static_cast<std::uint16_t>(port);
    return a;
}

namespace detail {

class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    Socket(Socket const&) = delete;
    Socket& operator=(Socket const&) = delete;
    Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
    Socket& operator=(Socket&& o) noexcept {
        if (this != &o) {
            reset();
            fd_ = std::exchange(o.fd_, -1);
        }
        return *this;
    }
    ~Socket() { reset(); }

    [[nodiscard]] int fd() const noexcept { return fd_; }
    [[nodiscard]] bool valid() const noexcept { return fd_ >= 0; }

    void shutdown_both() const {
        if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
    }

    void reset() {
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
    }

private:
    int fd_ = -1;
};

inline bool send_all(int fd, std::string_view bytes) {
    while (!bytes.empty()) {
        auto n = ::send(fd, bytes.data(), bytes.size(), MSG_NOSIGNAL);
        if (n <= 0) return false;
        bytes.remove_prefix(static_cast<std::size_t>(n));
    }
    return true;
}

inline Socket connect_to(BrokerAddress const& addr) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (::getaddrinfo(addr.host.c_str(), std::to_string(addr.port).c_str(), &hints, &res) != 0 || !res)
        throw BrokerError("cannot resolve broker host '" + addr.host + "'");
    Socket s(::socket(res->ai_family, res->ai_socktype, res->ai_protocol));
    bool ok = s.valid() && ::connect(s.fd(), res->ai_addr, res->ai_addrlen) == 0;
    ::freeaddrinfo(res);
    if (!ok) throw BrokerError("cannot connect to broker at " + addr.host + ":" + std::to_string(addr.port));
    return s;
}

// Waits up to `timeout` for readable data; returns false on timeout.
// Appends received bytes to the decoder; sets `eof` when the peer closed.
inline bool receive_some(int fd, FrameDecoder& decoder, std::chrono::milliseconds timeout, bool& eof) {
    pollfd p{fd, POLLIN, 0};
    int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
    if (rc <= 0) return false;
    char buf[8192];
    auto n = ::recv(fd, buf, sizeof buf, 0);
    if (n <= 0) {
        eof = true;
        return false;
    }
    decoder.feed(std::string_view(buf, static_cast<std::size_t>(n)));
    return true;
}

} // namespace detail

/// Serves an in-process broker over TCP. Local code may use broker()
/// directly alongside remote clients.
class TcpBrokerServer {
public:
    explicit TcpBrokerServer(BrokerAddress const& addr) {
        listener_ = detail::Socket(::socket(AF_INET, SOCK_STREAM, 0));
        if (!listener_.valid()) throw BrokerError("cannot create socket");
        int yes = 1;
        ::setsockopt(listener_.fd(), SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
        sockaddr_in sa{};
        sa.sin_family = AF_INET;
        sa.sin_port = htons(addr.port);
        if (::inet_pton(AF_INET, addr.host == "localhost" ? "127.0.0.1" : addr.host.c_str(), &sa.sin_addr) != 1)
            throw BrokerError("invalid bind address '" + addr.host + "'");
        if (::bind(listener_.fd(), reinterpret_cast<sockaddr*>(&sa), sizeof sa) != 0 ||
            ::listen(listener_.fd(), 16) != 0)
            throw BrokerError("cannot bind broker to " + addr.host + ":" + std::to_string(addr.port));
        socklen_t len = sizeof sa;
        ::getsockname(listener_.fd(), reinterpret_cast<sockaddr*>(&sa), &len);
        address_ = {addr.host, ntohs(sa.sin_port)};
        acceptor_ = std::thread([this] { accept_loop(); });
    }

    TcpBrokerServer(TcpBrokerServer const&) = delete;
    TcpBrokerServer& operator=(TcpBrokerServer const&) = delete;
    ~TcpBrokerServer() { stop(); }

    [[nodiscard]] BrokerAddress const& address() const noexcept { return address_; }
    [[nodiscard]] InProcessBroker& broker() noexcept { return core_; }

    void stop() {
        if (stopping_.exchange(true)) return;
        core_.stop();
        listener_.shutdown_both();
        if (acceptor_.joinable()) acceptor_.join();
        std::list<Connection> conns;
        {
            std::lock_guard lock(mutex_);
            for (auto& c : connections_) c.socket.shutdown_both();
            conns.splice(conns.end(), connections_);
        }
        for (auto& c : conns) {
            if (c.thread.joinable()) c.thread.join();
        }
        listener_.reset();
    }

private:
    struct Connection {
        detail::Socket socket;
        std::thread thread;
    };

    void accept_loop() {
        while (!stopping_) {
            int fd = ::accept(listener_.fd(), nullptr, nullptr);
            if (fd < 0) {
                if (stopping_) return;
                continue;
            }
            std::lock_guard lock(mutex_);
            if (stopping_) {
                ::close(fd);
                return;
            }
            auto& conn = connections_.emplace_back();
            conn.socket = detail::Socket(fd);
            conn.thread = std::thread([this, fd] { serve(fd); });
        }
    }

    void serve(int fd) {
        FrameDecoder decoder;
        bool eof = false;
        try {
            while (!stopping_ && !eof) {
                while (auto frame = decoder.pop()) {
                    if (frame->topic == kSubscribeTopic) {
                        stream(fd, frame->payload, decoder);
                        return;
                    }
                    core_.publish(frame->topic, frame->payload);
                }
                detail::receive_some(fd, decoder, std::chrono::milliseconds(100), eof);
            }
        } catch (std::exception const&) {
            // malformed frame or publish after stop: drop the connection
        }
        ::shutdown(fd, SHUT_RDWR);
    }

    void stream(int fd, std::string const& topic, FrameDecoder&) {
        auto sub = core_.subscribe(topic);
        while (!stopping_) {
            if (auto msg = sub->next(std::chrono::milliseconds(50))) {
                if (!detail::send_all(fd, encode_frame(topic, *msg))) break;
                continue;
            }
            if (sub->closed()) break;
            pollfd p{fd, POLLIN, 0};
            if (::poll(&p, 1, 0) > 0) {
                char buf[256];
                if (::recv(fd, buf, sizeof buf, MSG_DONTWAIT) <= 0) break;
            }
        }
        ::shutdown(fd, SHUT_RDWR);
    }

    InProcessBroker core_;
    detail::Socket listener_;
    BrokerAddress address_;
    std::thread acceptor_;
    std::atomic<bool> stopping_{false};
    std::mutex mutex_;
    std::list<Connection> connections_;
};

class TcpBroker final : public Broker {
    class Sub final : public Subscription {
    public:
        explicit Sub(detail::Socket s) : socket_(std::move(s)) {}

        std::optional<std::string> next(std::chrono::milliseconds timeout) override {
            auto deadline = std::chrono::steady_clock::now() + timeout;
            while (true) {
                try {
                    if (auto f = decoder_.pop()) return std::move(f->payload);
                } catch (BrokerError const&) {
                    closed_ = true;
                }
                if (closed_) return std::nullopt;
                auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                    deadline - std::chrono::steady_clock::now());
                if (left.count() <= 0) return std::nullopt;
                bool eof = false;
                detail::receive_some(socket_.fd(), decoder_, left, eof);
                if (eof) closed_ = true;
            }
        }

        [[nodiscard]] bool closed() const override { return closed_; }

    private:
        detail::Socket socket_;
        FrameDecoder decoder_;
        bool closed_ = false;
    };

public:
    explicit TcpBroker(BrokerAddress addr) : addr_(std::move(addr)) {}

    void publish(std::string const& topic, std::string const& payload) override {
        check_topic(topic);
        std::lock_guard lock(mutex_);
        if (stopped_) throw BrokerError("publish on a stopped broker");
        if (!publisher_.valid()) publisher_ = detail::connect_to(addr_);
        if (!detail::send_all(publisher_.fd(), encode_frame(topic, payload))) {
            publisher_.reset();
            throw BrokerError("connection to broker lost");
        }
    }

    std::unique_ptr<Subscription> subscribe(std::string const& topic) override {
        check_topic(topic);
        auto s = detail::connect_to(addr_);
        if (!detail::send_all(s.fd(), encode_frame(kSubscribeTopic, topic)))
            throw BrokerError("connection to broker lost");
        return std::make_unique<Sub>(std::move(s));
    }

    void stop() override {
        std::lock_guard lock(mutex_);
        stopped_ = true;
        publisher_.reset();
    }

private:
    BrokerAddress addr_;
    std::mutex mutex_;
    detail::Socket publisher_;
    bool stopped_ = false;
};

} // namespace kitchenforge
