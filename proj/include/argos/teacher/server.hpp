#pragma once

#include <memory>
#include <string>
#include <thread>

#include "argos/teacher/mock.hpp"

namespace argos::teacher {

/// Serves a MockTeacher over the wire protocol so the remote-client code
/// paths can be exercised without real teacher models.
class MockTeacherServer {
  public:
    explicit MockTeacherServer(nlohmann::json fixtures);
    ~MockTeacherServer();

    MockTeacherServer(const MockTeacherServer&) = delete;
    MockTeacherServer& operator=(const MockTeacherServer&) = delete;

    /// Binds to `port` (0 picks a free port) and serves on a background
    /// thread. Returns the bound port.
    int start(const std::string& host = "127.0.0.1", int port = 0);

    /// Serves on the calling thread until stop() (used by the CLI).
    bool serve_blocking(const std::string& host, int port);

    void stop();

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::thread thread_;
};

}  // namespace argos::teacher
