#include "engine/http_api.hpp"

#include "httplib.h"

namespace engine {

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::Infeasible:
    case ErrorCode::Unbounded:
    case ErrorCode::EmptyExchangePolyhedron:
    case ErrorCode::IncompatibleBudget:
    case ErrorCode::TraderPolyhedronInfeasible:
    case ErrorCode::MissingInputs:
    case ErrorCode::NoTrials:
      return 422;
    case ErrorCode::NumericalFailure:
    case ErrorCode::RepairFailure:
    case ErrorCode::StorageFailure:
      return 500;
    default:
      return 400;
  }
}

namespace {

constexpr const char* kJson = "application/json";

void reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", kJson);
}

Json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  try {
    return Json::parse(req.body);
  } catch (const Json::parse_error& e) {
    throw EngineError(ErrorCode::ValidationError, std::string("request body is not valid JSON: ") + e.what(), "");
  }
}

// Wraps a handler so every failure becomes the error document.
template <class F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const EngineError& e) {
      reply(res, http_status_for(e.code()), error_json(e));
    } catch (const std::exception& e) {
      reply(res, 500, error_json(EngineError(ErrorCode::NumericalFailure, e.what())));
    }
  };
}

}  // namespace

void install_routes(httplib::Server& server, Service& service) {
  Service* svc = &service;

  server.Post("/api/scenarios", guarded([svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, 201, svc->create_scenario(parse_body(req)));
  }));
  server.Get("/api/scenarios", guarded([svc](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, svc->list_scenarios());
  }));
  server.Get(R"(/api/scenarios/([^/]+))", guarded([svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, 200, svc->get_scenario(req.matches[1]));
  }));
  server.Delete(R"(/api/scenarios/([^/]+))", guarded([svc](const httplib::Request& req, httplib::Response& res) {
    svc->delete_scenario(req.matches[1]);
    reply(res, 200, Json{{"deleted", std::string(req.matches[1])}});
  }));
  server.Post(R"(/api/scenarios/([^/]+)/solve)", guarded([svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, 201, svc->solve(req.matches[1], parse_body(req)));
  }));
  server.Get(R"(/api/solves/([^/]+))", guarded([svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, 200, svc->get_solve(req.matches[1]));
  }));
  server.Post("/api/ability/sessions", guarded([svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, 201, svc->open_session(parse_body(req)));
  }));
  server.Post(R"(/api/ability/sessions/([^/]+)/answer)", guarded([svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, 200, svc->answer(req.matches[1], parse_body(req)));
  }));
  server.Get(R"(/api/ability/sessions/([^/]+)/estimate)", guarded([svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, 200, svc->session_estimate(req.matches[1]));
  }));

  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    const ErrorCode code = res.status == 404 ? ErrorCode::NotFound : ErrorCode::ValidationError;
    reply(res, res.status, error_json(EngineError(code, "no such route")));
  });
}

}  // namespace engine
