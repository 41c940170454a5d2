#pragma once

#include <iosfwd>
#include <memory>

namespace socnav {

struct ServeOptions
{
  unsigned short port = 8765;
  double speed = 1.0;  // simulated seconds per wall-clock second
  double dt = 0.0;     // > 0 overrides every loaded scenario's step
};

/// Web socket front end: one Session per connection, ticked by a timer on a
/// single I/O thread. Binds in the constructor, so port() is valid at once.
class WsServer
{
public:
  explicit WsServer(const ServeOptions& opts);
  ~WsServer();
  WsServer(const WsServer&) = delete;
  WsServer& operator=(const WsServer&) = delete;

  unsigned short port() const;
  /// Serves until stop() is called from any thread.
  void run();
  void stop();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

int cmd_serve(const ServeOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace socnav
