#include "kkm/service.hpp"

#include "kkm/error.hpp"

#include <httplib.h>

namespace kkm {

namespace {

void send(httplib::Response& res, int status, const Json& body)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

Json error_body(ErrorCode code, const std::string& message, const std::string& field = {})
{
    return error_json(Error(code, message, field));
}

} // namespace

void register_routes(httplib::Server& server, SessionStore& store, const ServiceOptions& options)
{
    server.set_default_headers({{"Access-Control-Allow-Origin", options.cors_origin},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(/sessions.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Post("/sessions", [&store](const httplib::Request& req, httplib::Response& res) {
        try {
            const auto config = session_config_from_json(Json::parse(req.body));
            send(res, 201, Json{{"id", store.create(config)}});
        } catch (const Json::exception& e) {
            send(res, 400, error_body(ErrorCode::InputError, std::string("malformed JSON: ") + e.what(), "body"));
        } catch (const Error& e) {
            send(res, 400, error_json(e));
        }
    });

    const auto with_session = [&store](auto handler) {
        return [&store, handler](const httplib::Request& req, httplib::Response& res) {
            const auto session = store.find(req.matches[1]);
            if (!session) {
                send(res, 404, error_body(ErrorCode::InputError, "no such session", "id"));
                return;
            }
            handler(*session, req, res);
        };
    };

    server.Get(R"(/sessions/([A-Za-z0-9_-]+))",
               with_session([](Session& s, const httplib::Request&, httplib::Response& res) { send(res, 200, s.state()); }));

    server.Get(R"(/sessions/([A-Za-z0-9_-]+)/query)",
               with_session([](Session& s, const httplib::Request&, httplib::Response& res) {
                   const auto q = s.pending_json();
                   if (q.is_null()) {
                       res.status = 204;
                       return;
                   }
                   send(res, 200, q);
               }));

    server.Post(R"(/sessions/([A-Za-z0-9_-]+)/answer)",
                with_session([](Session& s, const httplib::Request& req, httplib::Response& res) {
                    Json body;
                    try {
                        body = Json::parse(req.body);
                    } catch (const Json::exception& e) {
                        send(res, 400, error_body(ErrorCode::InputError, std::string("malformed JSON: ") + e.what(), "body"));
                        return;
                    }
                    const auto outcome = s.answer(body);
                    switch (outcome.status) {
                    case AnswerStatus::Accepted:
                    case AnswerStatus::Duplicate: {
                        Json out{{"recorded", outcome.status == AnswerStatus::Accepted}};
                        const auto state = s.state();
                        out["state"] = state["state"];
                        out["pending_query"] = state["pending_query"];
                        send(res, 200, out);
                        break;
                    }
                    case AnswerStatus::Conflict:
                        send(res, 409, error_body(ErrorCode::InputError, outcome.message, outcome.field));
                        break;
                    case AnswerStatus::Invalid:
                        send(res, 422, error_body(ErrorCode::InputError, outcome.message, outcome.field));
                        break;
                    }
                }));

    server.Get(R"(/sessions/([A-Za-z0-9_-]+)/result)",
               with_session([](Session& s, const httplib::Request&, httplib::Response& res) {
                   const auto r = s.result();
                   if (!r) {
                       send(res, 404, Json{{"state", s.state()["state"]}});
                       return;
                   }
                   send(res, r->contains("error") ? 422 : 200, *r);
               }));

    if (options.static_dir) server.set_mount_point("/", options.static_dir->string());
}

bool serve(const std::string& host, int port, SessionStore& store, const ServiceOptions& options)
{
    httplib::Server server;
    register_routes(server, store, options);
    return server.listen(host, port);
}

} // namespace kkm
