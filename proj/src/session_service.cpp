#include "vrtravel/session_service.hpp"

#include <atomic>
#include <chrono>
#include <deque>
#include <fstream>
#include <iostream>

#include <boost/asio/signal_set.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "vrtravel/config.hpp"
#include "vrtravel/errors.hpp"
#include "vrtravel/wire.hpp"
#include "vrtravel/world_io.hpp"

namespace vrtravel {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using nlohmann::json;

std::pair<std::string, unsigned short> parse_bind(std::string_view bind) {
    const auto colon = bind.rfind(':');
    if (colon == std::string_view::npos) throw ConfigError("bind address must look like host:port");
    std::string host(bind.substr(0, colon));
    if (host.empty()) host = "0.0.0.0";
    const std::string port_text(bind.substr(colon + 1));
    try {
        std::size_t used = 0;
        const int port = std::stoi(port_text, &used);
        if (used != port_text.size() || port < 0 || port > 65535) throw std::out_of_range("port");
        return {host, static_cast<unsigned short>(port)};
    } catch (const std::exception&) {
        throw ConfigError("bad port in bind address '" + std::string(bind) + "'");
    }
}

namespace {

struct Shared {
    ServiceOptions opts;
    std::atomic<std::uint64_t> next_connection{1};
};

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

class WsSession : public std::enable_shared_from_this<WsSession> {
public:
    WsSession(tcp::socket&& socket, std::shared_ptr<Shared> shared)
        : ws_(std::move(socket)), timer_(ws_.get_executor()), shared_(std::move(shared)),
          id_(shared_->next_connection++) {}

    void run(http::request<http::string_body> req) {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
    }

private:
    using Clock = std::chrono::steady_clock;

    void on_accept(beast::error_code ec) {
        if (ec) return;
        do_read();
    }

    void do_read() { ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this())); }

    void on_read(beast::error_code ec, std::size_t) {
        if (ec) {
            // connection gone: keep what was played
            if (session_) finish_session(false);
            timer_.cancel();
            return;
        }
        const std::string text = beast::buffers_to_string(buffer_.data());
        buffer_.consume(buffer_.size());
        handle(text);
        if (!closing_) do_read();
    }

    void handle(const std::string& text) {
        wire::ClientMessage msg;
        try {
            msg = wire::parse_client_message(text);
        } catch (const std::exception& e) {
            send(wire::error_message(e.what()).dump(), false);
            close_after_flush();
            return;
        }
        switch (msg.type) {
            case wire::ClientType::ping:
                send(wire::pong_message(session_ ? session_->tick() : 0).dump(), false);
                break;
            case wire::ClientType::start:
                try {
                    start_session(msg.config);
                } catch (const std::exception& e) {
                    session_.reset();
                    send(wire::error_message(std::string("start failed: ") + e.what()).dump(), false);
                }
                break;
            case wire::ClientType::input:
                if (!session_) {
                    send(wire::error_message("no session; send start first").dump(), false);
                    break;
                }
                pending_.push_back(msg.event);
                break;
            case wire::ClientType::finish:
                if (session_)
                    finish_session(true);
                else
                    send(wire::error_message("no session to finish").dump(), false);
                break;
        }
    }

    void start_session(json cfg) {
        std::uint64_t every = 1;
        if (cfg.contains("state_every")) {
            every = cfg["state_every"].get<std::uint64_t>();
            if (every < 1) throw ConfigError("state_every must be >= 1");
            cfg.erase("state_every");
        }
        std::shared_ptr<const WorldModel> world = shared_->opts.world;
        if (cfg.contains("world")) {
            WorldRef ref;
            const json& w = cfg["world"];
            ref.seed = w.value("seed", std::uint64_t{1});
            if (w.contains("spec")) ref.spec = spec_from_json(w["spec"]);
            world = resolve_world(ref);
            cfg.erase("world");
        }
        if (!world) throw ConfigError("server has no default world and start named none");
        const EngineConfig ec = engine_config_from_json(cfg, shared_->opts.engine);

        session_ = std::make_unique<Session>(world, ec);
        report_ = {};
        script_ = {};
        pending_.clear();
        state_every_ = every;
        ++generation_;
        ++session_count_;
        send(wire::world_message(*world).dump(), false);
        dt_ = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(ec.dt()));
        next_deadline_ = Clock::now() + dt_;
        arm_timer();
    }

    void arm_timer() {
        timer_.expires_at(next_deadline_);
        timer_.async_wait([self = shared_from_this(), gen = generation_](beast::error_code ec) {
            if (ec || gen != self->generation_ || !self->session_) return;
            self->on_tick();
        });
    }

    void on_tick() {
        const auto now = Clock::now();
        bool due = false;
        try {
            // never skip simulation ticks; only the state stream thins out when late
            while (now >= next_deadline_) {
                for (auto& e : pending_) e.tick = session_->tick();
                script_.events.insert(script_.events.end(), pending_.begin(), pending_.end());
                session_->step(pending_);
                pending_.clear();
                if (session_->tick() % state_every_ == 0) due = true;
                next_deadline_ += dt_;
            }
        } catch (const std::exception& e) {
            send(wire::error_message(std::string("session error: ") + e.what()).dump(), false);
            session_.reset();
            ++generation_;
            return;
        }
        report_.update(session_->log());
        if (due) send(wire::state_message(*session_, report_).dump(), true);
        arm_timer();
    }

    void finish_session(bool reply) {
        script_.end_tick = session_->tick();
        session_->finish();
        const std::string script = script_.to_jsonl();
        if (const auto& dir = shared_->opts.record_dir) {
            try {
                std::filesystem::create_directories(*dir);
                const std::string stem =
                    "conn-" + std::to_string(id_) + "_session-" + std::to_string(session_count_);
                write_file(*dir / (stem + ".script.jsonl"), script);
                write_file(*dir / (stem + ".events.jsonl"), session_->log().to_jsonl());
            } catch (const std::exception& e) {
                std::cerr << "recording failed: " << e.what() << '\n';
            }
        }
        if (reply) send(wire::finished_message(*session_, script).dump(), false);
        session_.reset();
        ++generation_;
        timer_.cancel();
    }

    void send(std::string text, bool droppable) {
        if (closing_) return;
        if (droppable && queue_.size() >= shared_->opts.max_pending_states) return;
        queue_.push_back(std::move(text));
        if (!writing_) do_write();
    }

    void do_write() {
        writing_ = true;
        ws_.text(true);
        ws_.async_write(net::buffer(queue_.front()), beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
    }

    void on_write(beast::error_code ec, std::size_t) {
        if (ec) {
            writing_ = false;
            queue_.clear();
            return;
        }
        queue_.pop_front();
        if (!queue_.empty()) {
            do_write();
            return;
        }
        writing_ = false;
        if (closing_) do_close();
    }

    void close_after_flush() {
        session_.reset();
        ++generation_;
        timer_.cancel();
        closing_ = true;
        if (!writing_) do_close();
    }

    void do_close() {
        ws_.async_close(websocket::close_code::policy_error, [self = shared_from_this()](beast::error_code) {});
    }

    websocket::stream<beast::tcp_stream> ws_;
    net::steady_timer timer_;
    std::shared_ptr<Shared> shared_;
    std::uint64_t id_;
    beast::flat_buffer buffer_;
    std::deque<std::string> queue_;
    bool writing_ = false;
    bool closing_ = false;

    std::unique_ptr<Session> session_;
    wire::LiveReport report_;
    InputScript script_;
    std::vector<InputEvent> pending_;
    std::uint64_t state_every_ = 1;
    std::uint64_t generation_ = 0;
    std::uint64_t session_count_ = 0;
    Clock::duration dt_{};
    Clock::time_point next_deadline_{};
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
public:
    HttpSession(tcp::socket&& socket, std::shared_ptr<Shared> shared)
        : stream_(std::move(socket)), shared_(std::move(shared)) {}

    void run() {
        net::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpSession::do_read, shared_from_this()));
    }

private:
    void do_read() {
        req_ = {};
        stream_.expires_after(std::chrono::seconds(30));
        http::async_read(stream_, buffer_, req_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
    }

    void on_read(beast::error_code ec, std::size_t) {
        if (ec == http::error::end_of_stream) {
            stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
            return;
        }
        if (ec) return;
        if (websocket::is_upgrade(req_) && req_.target() == "/session") {
            stream_.expires_never();
            std::make_shared<WsSession>(stream_.release_socket(), shared_)->run(std::move(req_));
            return;
        }
        res_ = {};
        res_.version(req_.version());
        res_.keep_alive(req_.keep_alive());
        res_.set(http::field::content_type, "text/plain");
        if (req_.method() == http::verb::get && req_.target() == "/healthz") {
            res_.result(http::status::ok);
            res_.body() = "ok\n";
        } else {
            res_.result(http::status::not_found);
            res_.body() = "not found\n";
        }
        res_.prepare_payload();
        http::async_write(stream_, res_, beast::bind_front_handler(&HttpSession::on_write, shared_from_this()));
    }

    void on_write(beast::error_code ec, std::size_t) {
        if (ec) return;
        if (res_.keep_alive()) {
            do_read();
            return;
        }
        stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
    }

    beast::tcp_stream stream_;
    beast::flat_buffer buffer_;
    http::request<http::string_body> req_;
    http::response<http::string_body> res_;
    std::shared_ptr<Shared> shared_;
};

}  // namespace

struct SessionServer::Impl : std::enable_shared_from_this<SessionServer::Impl> {
    Impl(net::io_context& ioc, ServiceOptions opts)
        : ioc(ioc), acceptor(net::make_strand(ioc)), shared(std::make_shared<Shared>()) {
        shared->opts = std::move(opts);
        shared->opts.engine.validate();
        const tcp::endpoint ep{net::ip::make_address(shared->opts.address), shared->opts.port};
        acceptor.open(ep.protocol());
        acceptor.set_option(net::socket_base::reuse_address(true));
        acceptor.bind(ep);
        acceptor.listen(net::socket_base::max_listen_connections);
    }

    void do_accept() {
        acceptor.async_accept(net::make_strand(ioc), [self = shared_from_this()](beast::error_code ec, tcp::socket s) {
            if (ec) {
                if (ec == net::error::operation_aborted || !self->acceptor.is_open()) return;
            } else {
                std::make_shared<HttpSession>(std::move(s), self->shared)->run();
            }
            self->do_accept();
        });
    }

    net::io_context& ioc;
    tcp::acceptor acceptor;
    std::shared_ptr<Shared> shared;
};

SessionServer::SessionServer(net::io_context& ioc, ServiceOptions opts)
    : impl_(std::make_shared<Impl>(ioc, std::move(opts))) {}

SessionServer::~SessionServer() = default;

unsigned short SessionServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void SessionServer::start() { net::dispatch(impl_->acceptor.get_executor(), [impl = impl_] { impl->do_accept(); }); }

void SessionServer::stop() {
    net::dispatch(impl_->acceptor.get_executor(), [impl = impl_] {
        beast::error_code ec;
        impl->acceptor.close(ec);
    });
}

void serve(ServiceOptions opts) {
    net::io_context ioc;
    SessionServer server(ioc, std::move(opts));
    server.start();
    std::cerr << "listening on port " << server.port() << '\n';
    net::signal_set signals(ioc, SIGINT, SIGTERM);
    signals.async_wait([&](beast::error_code, int) { ioc.stop(); });
    ioc.run();
}

}  // namespace vrtravel
