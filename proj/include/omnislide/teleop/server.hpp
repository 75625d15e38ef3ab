#pragma once

// HTTP + WebSocket front end for a TeleopSimulation.
//
//   GET  /healthz  -> 200 {"status":"ok","name":"omnislide","version":...}
//   GET  /...      -> static files from `static_dir` (404 when unset)
//   WS   /teleop   -> wire protocol; first client in control, others observe

#include "omnislide/teleop/simulation.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace omnislide::teleop {

inline constexpr const char* kServerName = "omnislide";
inline constexpr const char* kVersion = "0.1.0";

struct ServerOptions {
  std::string host = "127.0.0.1";
  unsigned short port = 8765;  // 0 picks a free port
  std::optional<std::filesystem::path> static_dir;
  std::size_t max_queued_frames = 256;  // per client; a slower client is dropped
};

/// Thrown by start() when the listening socket cannot be bound.
class BindError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TeleopServer {
 public:
  TeleopServer(std::shared_ptr<TeleopSimulation> sim, ServerOptions options);
  ~TeleopServer();

  TeleopServer(const TeleopServer&) = delete;
  TeleopServer& operator=(const TeleopServer&) = delete;

  /// Binds and listens; returns the bound port. Throws BindError.
  unsigned short start();
  /// Serves on the calling thread until stop() or, if `handle_signals`, SIGINT/SIGTERM.
  void run(bool handle_signals = false);
  /// Thread-safe; closes all connections and makes run() return.
  void stop();

  std::size_t client_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace omnislide::teleop
