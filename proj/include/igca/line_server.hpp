/* Copyright 2026 The IGCA Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <boost/asio.hpp>

namespace igca {

/// Newline-delimited request/response server. Each received line is passed
/// to the handler and its result is written back followed by '\n'; replies
/// on one connection keep request order.
class LineServer {
 public:
  using Handler = std::function<std::string(std::string_view)>;

  /// Port 0 binds an ephemeral port; see port().
  LineServer(Handler handler, const std::string& host, unsigned short port, unsigned threads = 4)
      : handler_(std::move(handler)),
        acceptor_(io_, boost::asio::ip::tcp::endpoint(boost::asio::ip::make_address(host), port)),
        threads_(threads == 0 ? 1 : threads) {}

  ~LineServer() { stop(); }

  LineServer(const LineServer&) = delete;
  LineServer& operator=(const LineServer&) = delete;

  unsigned short port() const { return acceptor_.local_endpoint().port(); }

  void start() {
    accept();
    for (unsigned i = 0; i < threads_; ++i) workers_.emplace_back([this] { io_.run(); });
  }

  void stop() {
    if (stopped_) return;
    stopped_ = true;
    io_.stop();
    for (auto& t : workers_) {
      if (t.joinable()) t.join();
    }
  }

 private:
  class Session : public std::enable_shared_from_this<Session> {
   public:
    Session(boost::asio::ip::tcp::socket socket, Handler& handler)
        : socket_(std::move(socket)), handler_(handler) {}

    void read() {
      auto self = shared_from_this();
      boost::asio::async_read_until(socket_, buffer_, '\n', [self](boost::system::error_code ec, std::size_t n) {
        if (ec) return;
        std::string line(boost::asio::buffers_begin(self->buffer_.data()),
                         boost::asio::buffers_begin(self->buffer_.data()) + static_cast<std::ptrdiff_t>(n));
        self->buffer_.consume(n);
        while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
        if (line.empty()) {
          self->read();
          return;
        }
        self->reply_ = self->handler_(line) + "\n";
        boost::asio::async_write(self->socket_, boost::asio::buffer(self->reply_),
                                 [self](boost::system::error_code wec, std::size_t) {
                                   if (!wec) self->read();
                                 });
      });
    }

   private:
    boost::asio::ip::tcp::socket socket_;
    boost::asio::streambuf buffer_;
    std::string reply_;
    Handler& handler_;
  };

  void accept() {
    acceptor_.async_accept([this](boost::system::error_code ec, boost::asio::ip::tcp::socket socket) {
      if (!ec) std::make_shared<Session>(std::move(socket), handler_)->read();
      if (acceptor_.is_open()) accept();
    });
  }

  Handler handler_;
  boost::asio::io_context io_;
  boost::asio::ip::tcp::acceptor acceptor_;
  unsigned threads_;
  std::vector<std::thread> workers_;
  bool stopped_ = false;
};

/// Blocking client for the line protocol; one request in flight at a time.
class LineClient {
 public:
  LineClient(const std::string& host, unsigned short port) : socket_(io_) {
    boost::asio::ip::tcp::resolver resolver(io_);
    boost::asio::connect(socket_, resolver.resolve(host, std::to_string(port)));
  }

  std::string request(std::string_view line) {
    std::string out(line);
    out += '\n';
    boost::asio::write(socket_, boost::asio::buffer(out));
    const std::size_t n = boost::asio::read_until(socket_, buffer_, '\n');
    std::string reply(boost::asio::buffers_begin(buffer_.data()),
                      boost::asio::buffers_begin(buffer_.data()) + static_cast<std::ptrdiff_t>(n) - 1);
    buffer_.consume(n);
    return reply;
  }

 private:
  boost::asio::io_context io_;
  boost::asio::ip::tcp::socket socket_;
  boost::asio::streambuf buffer_;
};

}  // namespace igca
