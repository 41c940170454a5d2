#include <thread>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "socnav/server.hpp"
#include "support/fixtures.hpp"

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using nlohmann::json;

namespace {

class Client
{
public:
  explicit Client(unsigned short port) : ws_(ioc_)
  {
    tcp::resolver resolver(ioc_);
    net::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("127.0.0.1", "/");
  }

  void send(const json& msg) { ws_.write(net::buffer(msg.dump())); }

  json receive()
  {
    beast::flat_buffer buf;
    ws_.read(buf);
    return json::parse(beast::buffers_to_string(buf.data()));
  }

  /// Reads until a frame of `kind` arrives.
  json until(const std::string& kind, int limit = 500)
  {
    for (int i = 0; i < limit; ++i) {
      json f = receive();
      if (f.at("kind") == kind) return f;
    }
    throw std::runtime_error("no " + kind + " frame");
  }

  void close() { ws_.close(websocket::close_code::normal); }

private:
  net::io_context ioc_;
  websocket::stream<tcp::socket> ws_;
};

}  // namespace

TEST(WsServer, LoadRunAndReject)
{
  socnav::ServeOptions opts;
  opts.port = 0;
  opts.speed = 20.0;
  socnav::WsServer server(opts);
  ASSERT_NE(server.port(), 0);
  std::thread io([&] { server.run(); });

  {
    Client c(server.port());
    const auto path = (fixtures::scenario_dir() / "a_free_corridor.json").string();
    c.send({{"id", 1}, {"cmd", "load_scenario"}, {"path", path}});
    const json ack = c.receive();
    EXPECT_EQ(ack.at("kind"), "ack");
    EXPECT_EQ(ack.at("id"), 1);
    const json snap = c.until("snapshot");
    EXPECT_EQ(snap.at("tick"), 0);

    c.send({{"id", 2}, {"cmd", "bogus"}});
    const json err = c.until("error");
    EXPECT_EQ(err.at("id"), 2);

    c.send({{"id", 3}, {"cmd", "resume"}});
    EXPECT_EQ(c.until("ack").at("id"), 3);
    const json moving = c.until("snapshot");
    EXPECT_GT(moving.at("tick").get<int>(), 0);
    EXPECT_EQ(moving.at("running"), true);
    c.close();
  }

  server.stop();
  io.join();
}
