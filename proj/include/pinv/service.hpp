#pragma once

#include "pinv/pipeline.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace httplib {
class Server;
}

namespace pinv {

struct HttpReply {
    int status = 200;
    std::string body; ///< JSON
};

/**
 * JSON API over a ComputePipeline.
 *
 *   POST /matrices          {"text": ...} | {"coo": {...}} | {"test": name}  -> 201 {"id"}
 *   POST /matrices/upload   raw matrix text                                   -> 201 {"id"}
 *   GET  /matrices/{id}                                                      -> record
 *   POST /compute           {"operation", "operands", "r", "s", "p", "q"}     -> 200 response
 *   GET  /results/{id}                                                       -> record
 *
 * Failures answer 400 with {"error": <code name>, "detail": <text>}.
 */
class Service {
public:
    explicit Service(ComputePipeline& pipeline);
    ~Service();

    /// Routes one request without going through a socket.
    HttpReply handle(std::string_view method, std::string_view path, std::string_view body) const;

    /// Blocks serving on host:port until stop() is called.
    bool listen(const std::string& host, int port);
    /// Binds an ephemeral port and returns it; serve with listen_after_bind().
    int bind_any_port(const std::string& host);
    bool listen_after_bind();
    void stop();
    void wait_until_ready() const;

private:
    ComputePipeline& pipeline_;
    std::unique_ptr<httplib::Server> server_;
};

} // namespace pinv
