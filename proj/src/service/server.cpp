#include "socnav/server.hpp"

#include <chrono>
#include <deque>
#include <ostream>

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "socnav/session.hpp"

namespace socnav {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

class Connection : public std::enable_shared_from_this<Connection>
{
public:
  Connection(tcp::socket socket, const ServeOptions& opts)
      : ws_(std::move(socket)), timer_(ws_.get_executor()), speed_(opts.speed), session_(session_options(opts))
  {
  }

  void start()
  {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->read();
      self->next_tick_ = std::chrono::steady_clock::now();
      self->schedule_tick();
    });
  }

private:
  static Session::Options session_options(const ServeOptions& opts)
  {
    Session::Options o;
    if (opts.dt > 0.0) o.dt = opts.dt;
    return o;
  }

  void read()
  {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->close();
        return;
      }
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      for (const auto& frame : self->session_.handle_text(text)) self->send(frame.dump());
      self->read();
    });
  }

  void schedule_tick()
  {
    const auto period = std::chrono::duration<double>(session_.dt() / speed_);
    next_tick_ += std::chrono::duration_cast<std::chrono::steady_clock::duration>(period);
    timer_.expires_at(next_tick_);
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (ec || self->closed_) return;
      for (const auto& frame : self->session_.tick()) self->send(frame.dump());
      self->schedule_tick();
    });
  }

  void send(std::string frame)
  {
    if (closed_) return;
    outbox_.push_back(std::move(frame));
    if (!writing_) write();
  }

  void write()
  {
    writing_ = true;
    ws_.text(true);
    ws_.async_write(net::buffer(outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->close();
        return;
      }
      self->outbox_.pop_front();
      if (self->outbox_.empty()) self->writing_ = false;
      else self->write();
    });
  }

  void close()
  {
    closed_ = true;
    timer_.cancel();
  }

  websocket::stream<beast::tcp_stream> ws_;
  net::steady_timer timer_;
  std::chrono::steady_clock::time_point next_tick_;
  double speed_;
  Session session_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  bool writing_ = false;
  bool closed_ = false;
};

}  // namespace

struct WsServer::Impl
{
  explicit Impl(const ServeOptions& o) : opts(o), acceptor(ioc, tcp::endpoint(net::ip::address_v4::any(), o.port)) {}

  void accept()
  {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<Connection>(std::move(socket), opts)->start();
      accept();
    });
  }

  ServeOptions opts;
  net::io_context ioc;
  tcp::acceptor acceptor;
};

WsServer::WsServer(const ServeOptions& opts) : impl_(std::make_unique<Impl>(opts)) {}

WsServer::~WsServer() = default;

unsigned short WsServer::port() const
{
  return impl_->acceptor.local_endpoint().port();
}

void WsServer::run()
{
  impl_->accept();
  impl_->ioc.run();
}

void WsServer::stop()
{
  impl_->ioc.stop();
}

int cmd_serve(const ServeOptions& opts, std::ostream& out, std::ostream& err)
{
  try {
    WsServer server(opts);
    out << "socnav: serving on ws://0.0.0.0:" << server.port() << "\n" << std::flush;
    server.run();
  } catch (const std::exception& e) {
    err << "socnav: serve: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace socnav
