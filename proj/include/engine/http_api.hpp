#pragma once

#include "engine/errors.hpp"
#include "engine/service.hpp"

namespace httplib {
class Server;
}

namespace engine {

// 400 malformed or invalid input, 404 unknown id, 422 well-formed input the
// models reject (infeasible, missing sections), 500 solver or storage failure.
int http_status_for(ErrorCode code);

void install_routes(httplib::Server& server, Service& service);

}  // namespace engine
