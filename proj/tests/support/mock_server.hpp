#pragma once

#include <atomic>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

namespace evalkit::testing {

// Local HTTP server answering POST /invoke with a scripted handler. The
// handler gets the 0-based request number.
class MockServer {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&, int request)>;

  explicit MockServer(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/invoke", [this](const httplib::Request& req, httplib::Response& res) {
      int n = 0;
      {
        std::lock_guard lock(mutex_);
        n = static_cast<int>(bodies_.size());
        bodies_.push_back(req.body);
      }
      handler_(req, res, n);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MockServer() {
    server_.stop();
    thread_.join();
  }

  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/invoke"; }
  int port() const { return port_; }

  int requests() const {
    std::lock_guard lock(mutex_);
    return static_cast<int>(bodies_.size());
  }

  std::vector<std::string> bodies() const {
    std::lock_guard lock(mutex_);
    return bodies_;
  }

 private:
  Handler handler_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  mutable std::mutex mutex_;
  std::vector<std::string> bodies_;
};

}  // namespace evalkit::testing
