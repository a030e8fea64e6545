#include "phishbowl/service.hpp"

#include <charconv>

#include <httplib.h>

#include "phishbowl/corpus.hpp"
#include "phishbowl/errors.hpp"

namespace phishbowl {

namespace {

using json = nlohmann::json;

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(-1, ' ', false, json::error_handler_t::replace), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& stage,
                 const std::string& message) {
  reply(res, status, {{"stage", stage}, {"message", message}});
}

template <class F>
void guarded(httplib::Response& res, F&& handler) {
  try {
    handler();
  } catch (const ValidationError& e) {
    reply_error(res, 422, e.stage(), e.what());
  } catch (const ParseError& e) {
    reply_error(res, 422, e.stage(), e.what());
  } catch (const TransportError& e) {
    reply_error(res, 502, e.stage(), e.what());
  } catch (const Error& e) {
    reply_error(res, 500, e.stage(), e.what());
  } catch (const std::exception& e) {
    reply_error(res, 500, "internal", e.what());
  }
}

std::optional<json> parse_body(const httplib::Request& req, httplib::Response& res) {
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    reply_error(res, 400, "request", std::string("malformed JSON: ") + e.what());
    return std::nullopt;
  }
}

}  // namespace

void register_routes(httplib::Server& server, Platform& platform) {
  server.Post("/api/classify", [&platform](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req, res);
    if (!body) return;
    guarded(res, [&] {
      reply(res, 200, to_json(platform.classify(parse_classify_request(*body))));
    });
  });

  server.Post("/api/submit", [&platform](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req, res);
    if (!body) return;
    guarded(res, [&] {
      if (body->is_object() && body->contains("label") && (*body)["label"] != 1) {
        throw ValidationError("request", "submissions are phishing by definition");
      }
      reply(res, 200, to_json(platform.submit(email_from_json(*body, "request"))));
    });
  });

  server.Get("/api/search", [&platform](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string q = req.get_param_value("q");
      std::size_t n = 10;
      if (req.has_param("n")) {
        const std::string raw = req.get_param_value("n");
        auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), n);
        if (ec != std::errc() || ptr != raw.data() + raw.size()) {
          throw ValidationError("search", "n must be an integer");
        }
      }
      json results = json::array();
      for (const auto& hit : platform.search(q, n)) results.push_back(to_json(hit));
      reply(res, 200, {{"results", results}});
    });
  });

  server.Get("/api/trends", [&platform](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] {
      json groups = json::array();
      for (const auto& g : platform.trends()) groups.push_back(to_json(g));
      reply(res, 200, {{"groups", groups}});
    });
  });

  server.Get("/api/alerts", [&platform](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] {
      json alerts = json::array();
      for (const auto& a : platform.alerts()) alerts.push_back(to_json(a));
      reply(res, 200, {{"alerts", alerts}});
    });
  });

  server.Get(R"(/api/emails/([^/]+))", [&platform](const httplib::Request& req,
                                                    httplib::Response& res) {
    guarded(res, [&] {
      const std::string id = req.matches[1];
      if (auto record = platform.email(id)) {
        reply(res, 200, to_json(*record, false));
      } else {
        reply_error(res, 404, "bowl", "no record with id '" + id + "'");
      }
    });
  });
}

bool serve(Platform& platform, const std::string& host, int port) {
  httplib::Server server;
  register_routes(server, platform);
  return server.listen(host, port);
}

}  // namespace phishbowl
