#pragma once

#include "kkm/session.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace httplib {
class Server;
}

namespace kkm {

struct ServiceOptions {
    std::optional<std::filesystem::path> static_dir;  // UI bundle mounted at /
    std::string cors_origin = "*";
};

/// POST /sessions, GET /sessions/{id}, GET /sessions/{id}/query,
/// POST /sessions/{id}/answer, GET /sessions/{id}/result.
void register_routes(httplib::Server& server, SessionStore& store, const ServiceOptions& options = {});

/// Blocks serving on host:port.  Returns false when the port cannot be bound.
bool serve(const std::string& host, int port, SessionStore& store, const ServiceOptions& options = {});

} // namespace kkm
