#pragma once

#include <string>

#include "phishbowl/platform.hpp"

namespace httplib {
class Server;
}

namespace phishbowl {

/// Installs the JSON API on `server`:
///
///   POST /api/classify      {sender?, subject?, body} | {ocr_table}
///   POST /api/submit        {sender?, subject?, body}
///   GET  /api/search?q=&n=  ranked anonymized records with distances
///   GET  /api/trends        groups by decayed score
///   GET  /api/alerts        newest first
///   GET  /api/emails/{id}   one stored record
///
/// Failures answer {"stage", "message"}: 400 for unparseable JSON, 404 for
/// unknown ids, 422 for validation errors, 502 for upstream model failures,
/// 500 otherwise.
void register_routes(httplib::Server& server, Platform& platform);

/// Blocks serving on host:port until the server is stopped.
bool serve(Platform& platform, const std::string& host, int port);

}  // namespace phishbowl
