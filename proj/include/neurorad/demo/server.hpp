#pragma once

// WebSocket host for demo sessions. Each connection owns one Session and runs
// on its own strand; inbound frames are staged in a bounded queue and consumed
// by a periodic pipeline tick.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <boost/asio/bind_executor.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "neurorad/demo/bounded_queue.hpp"
#include "neurorad/demo/protocol.hpp"
#include "neurorad/demo/session.hpp"

namespace neurorad::demo {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

struct ServerConfig {
  std::string address = "127.0.0.1";
  std::uint16_t port = 8765;  // 0 picks a free port
  std::chrono::milliseconds tick{20};
  double speed = 1.0;  // simulated seconds per wall second
  std::size_t inbound_capacity = 256;
  std::size_t max_sessions = 16;
  SessionConfig session{};
  std::function<void(const std::string&)> log;
};

class Server;

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, const ServerConfig& cfg,
             std::shared_ptr<const QuantModel> model, std::shared_ptr<SessionRegistry> registry,
             std::uint64_t seed)
      : ws_(std::move(socket)),
        timer_(ws_.get_executor()),
        cfg_(cfg),
        inbound_(cfg.inbound_capacity),
        session_(cfg.session, std::move(model), std::move(registry), seed) {}

  void start() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->last_tick_ = std::chrono::steady_clock::now();
      self->read();
      self->schedule_tick();
    });
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->shut();
        return;
      }
      std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      for (auto line : split_lines(text)) {
        if (!self->inbound_.push(std::string(line))) self->overflowed_ = true;
      }
      self->read();
    });
  }

  static std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> out;
    if (text.empty()) return {text};  // an empty message still gets an answer
    std::size_t start = 0;
    while (start <= text.size()) {
      auto nl = text.find('\n', start);
      if (nl == std::string_view::npos) nl = text.size();
      auto line = text.substr(start, nl - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!line.empty() || nl < text.size()) out.push_back(line);
      start = nl + 1;
    }
    return out;
  }

  void schedule_tick() {
    timer_.expires_after(cfg_.tick);
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (ec || self->closing_) return;
      self->on_tick();
    });
  }

  void on_tick() {
    if (overflowed_) {
      overflowed_ = false;
      send(warn_frame("overflow", "inbound queue full, dropped " +
                                      std::to_string(inbound_.dropped()) + " frames total"));
    }
    for (const auto& line : inbound_.drain()) {
      HandleResult r;
      try {
        r = session_.handle(line);
      } catch (const std::exception& e) {
        r.frames = {err_frame("internal", e.what())};
      }
      for (auto& f : r.frames) send(std::move(f));
      if (r.close) {
        closing_ = true;
        break;
      }
    }
    const auto now = std::chrono::steady_clock::now();
    const double dt = std::chrono::duration<double>(now - last_tick_).count();
    last_tick_ = now;
    if (!closing_) {
      for (auto& f : session_.tick(dt * cfg_.speed)) send(std::move(f));
      schedule_tick();
    } else if (!writing_) {
      close();
    }
  }

  void send(std::string frame) {
    outbox_.push_back(std::move(frame));
    if (!writing_) write_next();
  }

  void write_next() {
    if (outbox_.empty()) {
      writing_ = false;
      if (closing_) close();
      return;
    }
    writing_ = true;
    ws_.text(true);
    ws_.async_write(net::buffer(outbox_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) {
                        self->shut();
                        return;
                      }
                      self->outbox_.pop_front();
                      self->write_next();
                    });
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    ws_.async_close(websocket::close_code::normal,
                    [self = shared_from_this()](beast::error_code) {});
  }

  void shut() {
    closing_ = true;
    timer_.cancel();
  }

  websocket::stream<beast::tcp_stream> ws_;
  net::steady_timer timer_;
  const ServerConfig& cfg_;
  beast::flat_buffer buffer_;
  BoundedQueue<std::string> inbound_;
  Session session_;
  std::deque<std::string> outbox_;
  std::chrono::steady_clock::time_point last_tick_{};
  bool writing_ = false;
  bool closing_ = false;
  bool closed_ = false;
  bool overflowed_ = false;
};

class Server {
 public:
  Server(ServerConfig cfg, std::shared_ptr<const QuantModel> model)
      : cfg_(std::move(cfg)),
        model_(std::move(model)),
        registry_(std::make_shared<SessionRegistry>(cfg_.max_sessions)),
        acceptor_(ioc_) {
    tcp::endpoint ep(net::ip::make_address(cfg_.address), cfg_.port);
    acceptor_.open(ep.protocol());
    acceptor_.set_option(net::socket_base::reuse_address(true));
    acceptor_.bind(ep);
    acceptor_.listen(net::socket_base::max_listen_connections);
  }

  ~Server() { stop(); }

  std::uint16_t port() const { return acceptor_.local_endpoint().port(); }
  const SessionRegistry& registry() const noexcept { return *registry_; }

  /// Runs the event loop on `threads` workers until stop().
  void run(unsigned threads = 1) {
    accept();
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back([this] { ioc_.run(); });
    ioc_.run();
    for (auto& t : pool) t.join();
  }

  /// Starts the loop on background threads and returns.
  void start(unsigned threads = 1) {
    accept();
    for (unsigned i = 0; i < threads; ++i) workers_.emplace_back([this] { ioc_.run(); });
  }

  void stop() {
    ioc_.stop();
    for (auto& t : workers_)
      if (t.joinable()) t.join();
    workers_.clear();
  }

 private:
  void accept() {
    acceptor_.async_accept(net::make_strand(ioc_), [this](beast::error_code ec, tcp::socket s) {
      if (!ec) {
        if (cfg_.log) cfg_.log("connection from " + s.remote_endpoint(ec).address().to_string());
        std::make_shared<Connection>(std::move(s), cfg_, model_, registry_, ++connections_)
            ->start();
      }
      if (acceptor_.is_open()) accept();
    });
  }

  ServerConfig cfg_;
  std::shared_ptr<const QuantModel> model_;
  std::shared_ptr<SessionRegistry> registry_;
  net::io_context ioc_;
  tcp::acceptor acceptor_;
  std::vector<std::thread> workers_;
  std::uint64_t connections_ = 0;
};

}  // namespace neurorad::demo
