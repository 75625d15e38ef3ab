#include "omnislide/teleop/server.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <atomic>
#include <chrono>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace omnislide::teleop {
namespace {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

using Frame = std::shared_ptr<const std::string>;

Frame make_frame(const nlohmann::json& doc) { return std::make_shared<const std::string>(doc.dump()); }

class WsSession;

// Shared state of the server. Touched only from the io thread, except for
// `client_count` and the simulation (which has its own synchronisation).
struct Hub : std::enable_shared_from_this<Hub> {
  Hub(std::shared_ptr<TeleopSimulation> s, ServerOptions o)
      : sim(std::move(s)), options(std::move(o)), acceptor(ioc), broadcast_timer(ioc), stop_deadline(ioc) {}

  std::shared_ptr<TeleopSimulation> sim;
  ServerOptions options;
  net::io_context ioc{1};
  tcp::acceptor acceptor;
  net::steady_timer broadcast_timer;
  net::steady_timer stop_deadline;
  std::map<std::uint64_t, std::shared_ptr<WsSession>> clients;
  std::optional<std::uint64_t> controller;
  std::uint64_t next_id = 1;
  std::atomic<std::size_t> client_count{0};
  bool stopping = false;

  void accept();
  void schedule_broadcast();
  std::uint64_t join(const std::shared_ptr<WsSession>& session);
  void leave(std::uint64_t id);
  void on_message(std::uint64_t id, const std::string& text);
  void shutdown();
};

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, std::shared_ptr<Hub> hub) : ws_(std::move(socket)), hub_(std::move(hub)) {}

  void start(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.set_option(websocket::stream_base::decorator(
        [](websocket::response_type& res) { res.set(http::field::server, kServerName); }));
    ws_.text(true);
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

  void send(Frame frame) {
    if (closed_) return;
    if (queue_.size() >= hub_->options.max_queued_frames) {
      spdlog::warn("client {} is not keeping up; dropping it", id_);
      close();
      return;
    }
    queue_.push_back(std::move(frame));
    if (queue_.size() == 1) do_write();
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    ws_.async_close(websocket::close_code::normal, [self = shared_from_this()](beast::error_code) {});
  }

  std::uint64_t id() const { return id_; }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) {
      spdlog::debug("websocket handshake failed: {}", ec.message());
      return;
    }
    id_ = hub_->join(shared_from_this());
    if (id_ == 0) {
      close();
      return;
    }
    do_read();
  }

  void do_read() { ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this())); }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      hub_->leave(id_);
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    if (!ws_.got_text()) {
      send(make_frame(error_frame(kErrMalformed, "binary frames are not accepted")));
    } else {
      hub_->on_message(id_, text);
    }
    do_read();
  }

  void do_write() {
    ws_.async_write(net::buffer(*queue_.front()), beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) {
      queue_.clear();
      hub_->leave(id_);
      return;
    }
    queue_.pop_front();
    if (!queue_.empty()) do_write();
  }

  websocket::stream<beast::tcp_stream> ws_;
  std::shared_ptr<Hub> hub_;
  beast::flat_buffer buffer_;
  std::deque<Frame> queue_;
  std::uint64_t id_ = 0;
  bool closed_ = false;
};

std::string mime_type(const std::filesystem::path& p) {
  static const std::map<std::string, std::string> types = {
      {".html", "text/html; charset=utf-8"}, {".htm", "text/html; charset=utf-8"},
      {".js", "text/javascript"},             {".mjs", "text/javascript"},
      {".css", "text/css"},                   {".json", "application/json"},
      {".svg", "image/svg+xml"},              {".png", "image/png"},
      {".ico", "image/x-icon"},               {".wasm", "application/wasm"},
      {".map", "application/json"},           {".txt", "text/plain; charset=utf-8"},
  };
  const auto it = types.find(p.extension().string());
  return it == types.end() ? "application/octet-stream" : it->second;
}

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, std::shared_ptr<Hub> hub) : stream_(std::move(socket)), hub_(std::move(hub)) {}

  void run() { do_read(); }

 private:
  using Response = http::response<http::string_body>;

  void do_read() {
    parser_.emplace();
    parser_->body_limit(64 * 1024);
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, *parser_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec == http::error::end_of_stream) {
      beast::error_code ignored;
      stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
      return;
    }
    if (ec) return;
    auto req = parser_->release();
    if (websocket::is_upgrade(req)) {
      if (target_path(req) == "/teleop" && !hub_->stopping) {
        stream_.expires_never();
        std::make_shared<WsSession>(stream_.release_socket(), hub_)->start(std::move(req));
        return;
      }
      return write(text_response(req, http::status::not_found, "no websocket endpoint here\n"));
    }
    write(handle(req));
  }

  static std::string target_path(const http::request<http::string_body>& req) {
    std::string target(req.target());
    if (const auto q = target.find('?'); q != std::string::npos) target.resize(q);
    return target;
  }

  static Response text_response(const http::request<http::string_body>& req, http::status status, std::string body,
                                const std::string& type = "text/plain; charset=utf-8") {
    Response res{status, req.version()};
    res.set(http::field::server, kServerName);
    res.set(http::field::content_type, type);
    res.keep_alive(req.keep_alive());
    res.body() = std::move(body);
    res.prepare_payload();
    if (req.method() == http::verb::head) res.body().clear();
    return res;
  }

  Response handle(const http::request<http::string_body>& req) {
    if (req.method() != http::verb::get && req.method() != http::verb::head) {
      return text_response(req, http::status::method_not_allowed, "only GET and HEAD are supported\n");
    }
    const std::string path = target_path(req);
    if (path == "/healthz") {
      const nlohmann::json body = {{"status", "ok"},
                                   {"name", kServerName},
                                   {"version", kVersion},
                                   {"clients", hub_->client_count.load()},
                                   {"sim_steps", hub_->sim->steps()}};
      return text_response(req, http::status::ok, body.dump(), "application/json");
    }
    if (!hub_->options.static_dir) return text_response(req, http::status::not_found, "no UI assets configured\n");

    std::filesystem::path rel = path.substr(1);
    if (path.back() == '/') rel /= "index.html";
    for (const auto& part : rel) {
      if (part == "..") return text_response(req, http::status::bad_request, "invalid path\n");
    }
    const auto file = *hub_->options.static_dir / rel;
    std::ifstream in(file, std::ios::binary);
    if (!in || std::filesystem::is_directory(file)) return text_response(req, http::status::not_found, "not found\n");
    std::ostringstream body;
    body << in.rdbuf();
    return text_response(req, http::status::ok, body.str(), mime_type(file));
  }

  void write(Response res) {
    auto sp = std::make_shared<Response>(std::move(res));
    http::async_write(stream_, *sp, [self = shared_from_this(), sp](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (!sp->keep_alive()) {
        beast::error_code ignored;
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
        return;
      }
      self->do_read();
    });
  }

  beast::tcp_stream stream_;
  std::shared_ptr<Hub> hub_;
  beast::flat_buffer buffer_;
  std::optional<http::request_parser<http::string_body>> parser_;
};

void Hub::accept() {
  acceptor.async_accept([self = shared_from_this()](beast::error_code ec, tcp::socket socket) {
    if (ec) {
      if (ec != net::error::operation_aborted) spdlog::warn("accept failed: {}", ec.message());
      if (self->stopping) return;
    } else {
      std::make_shared<HttpSession>(std::move(socket), self)->run();
    }
    if (!self->stopping) self->accept();
  });
}

void Hub::schedule_broadcast() {
  const auto period = std::chrono::duration_cast<net::steady_timer::duration>(
      std::chrono::duration<double>(1.0 / sim->options().broadcast_hz));
  broadcast_timer.expires_at(broadcast_timer.expiry() + period);
  broadcast_timer.async_wait([self = shared_from_this()](beast::error_code ec) {
    if (ec || self->stopping) return;
    const Broadcast b = self->sim->drain();
    const Frame state = make_frame(state_frame(b.state, b.events));
    const Frame delta = b.cells.empty() ? nullptr : make_frame(scan_delta_frame(b.cells));
    // Copy: send() may drop a client and mutate the map.
    const auto targets = self->clients;
    for (const auto& [id, client] : targets) {
      client->send(state);
      if (delta) client->send(delta);
    }
    self->schedule_broadcast();
  });
}

std::uint64_t Hub::join(const std::shared_ptr<WsSession>& session) {
  if (stopping) return 0;
  const std::uint64_t id = next_id++;
  const bool in_control = !controller.has_value();
  if (in_control) controller = id;
  clients[id] = session;
  client_count = clients.size();
  spdlog::info("client {} connected ({})", id, in_control ? "in control" : "observer");
  session->send(make_frame(config_frame(sim->config(in_control))));
  session->send(make_frame(scan_delta_frame(sim->full_grid())));
  return id;
}

void Hub::leave(std::uint64_t id) {
  const auto it = clients.find(id);
  if (it == clients.end()) return;
  clients.erase(it);
  client_count = clients.size();
  spdlog::info("client {} disconnected", id);
  if (controller != id) return;
  // Fail-safe: stop commanding motion; the rate limiter brings the EE to rest.
  sim->command({0.0, 0.0});
  controller.reset();
  if (!clients.empty() && !stopping) {
    const auto& [next, session] = *clients.begin();
    controller = next;
    spdlog::info("control passed to client {}", next);
    session->send(make_frame(control_frame(true)));
  }
}

void Hub::on_message(std::uint64_t id, const std::string& text) {
  const auto it = clients.find(id);
  if (it == clients.end()) return;
  const auto& session = it->second;
  try {
    const ClientMessage msg = parse_client_message(text);
    if (controller != id) {
      session->send(make_frame(error_frame(kErrNotInControl, "another client holds control")));
      return;
    }
    if (const auto* v = std::get_if<CmdVel>(&msg)) {
      sim->command({v->vx, v->vy});
    } else if (const auto* f = std::get_if<SetForce>(&msg)) {
      sim->set_force(f->f_N);
    } else {
      sim->request_reset();
    }
  } catch (const WireError& e) {
    session->send(make_frame(error_frame(e.code(), e.what())));
  }
}

void Hub::shutdown() {
  if (stopping) return;
  stopping = true;
  spdlog::info("shutting down teleop server");
  beast::error_code ignored;
  acceptor.close(ignored);
  broadcast_timer.cancel();
  const auto targets = clients;
  for (const auto& [id, client] : targets) client->close();
  clients.clear();
  client_count = 0;
  controller.reset();
  // Clients that never answer the close handshake do not hold the process.
  stop_deadline.expires_after(std::chrono::seconds(2));
  stop_deadline.async_wait([self = shared_from_this()](beast::error_code) { self->ioc.stop(); });
}

}  // namespace

struct TeleopServer::Impl {
  std::shared_ptr<Hub> hub;
  std::atomic<bool> started{false};
};

TeleopServer::TeleopServer(std::shared_ptr<TeleopSimulation> sim, ServerOptions options)
    : impl_(std::make_unique<Impl>()) {
  if (!sim) throw std::invalid_argument("teleop server needs a simulation");
  impl_->hub = std::make_shared<Hub>(std::move(sim), std::move(options));
}

TeleopServer::~TeleopServer() = default;

unsigned short TeleopServer::start() {
  auto& hub = *impl_->hub;
  beast::error_code ec;
  const auto address = net::ip::make_address(hub.options.host, ec);
  if (ec) throw BindError(fmt::format("invalid listen address '{}': {}", hub.options.host, ec.message()));
  const tcp::endpoint endpoint{address, hub.options.port};
  hub.acceptor.open(endpoint.protocol(), ec);
  if (!ec) hub.acceptor.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) hub.acceptor.bind(endpoint, ec);
  if (!ec) hub.acceptor.listen(net::socket_base::max_listen_connections, ec);
  if (ec) {
    throw BindError(fmt::format("cannot listen on {}:{}: {}", hub.options.host, hub.options.port, ec.message()));
  }
  impl_->started = true;
  const auto port = hub.acceptor.local_endpoint().port();
  spdlog::info("teleop server listening on {}:{}", hub.options.host, port);
  return port;
}

void TeleopServer::run(bool handle_signals) {
  if (!impl_->started) throw std::logic_error("TeleopServer::run() before start()");
  auto hub = impl_->hub;
  std::optional<net::signal_set> signals;
  if (handle_signals) {
    signals.emplace(hub->ioc, SIGINT, SIGTERM);
    signals->async_wait([hub](beast::error_code ec, int sig) {
      if (ec) return;
      spdlog::info("received signal {}", sig);
      hub->shutdown();
    });
  }
  std::jthread sim_thread([sim = hub->sim](std::stop_token stop) { sim->run_realtime(stop); });
  hub->accept();
  hub->broadcast_timer.expires_after(std::chrono::milliseconds(0));
  hub->schedule_broadcast();
  hub->ioc.run();
  if (signals) {
    beast::error_code ignored;
    signals->cancel(ignored);
  }
}

void TeleopServer::stop() {
  auto hub = impl_->hub;
  net::post(hub->ioc, [hub] { hub->shutdown(); });
}

std::size_t TeleopServer::client_count() const { return impl_->hub->client_count.load(); }

}  // namespace omnislide::teleop
