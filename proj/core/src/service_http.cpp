#include "dosefind/service_http.hpp"

#include "httplib.h"

namespace dosefind {

using nlohmann::json;

struct HttpFrontend::Impl {
  TrialService& service;
  Logger log;
  httplib::Server server;

  Impl(TrialService& s, Logger l) : service(s), log(std::move(l)) {}

  static void send(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  template <typename F>
  void guarded(const httplib::Request& req, httplib::Response& res, F&& f) {
    try {
      send(res, 200, f());
    } catch (const ServiceError& e) {
      send(res, e.status(), json{{"error", e.what()}});
    } catch (const json::parse_error& e) {
      send(res, 400, json{{"error", std::string("malformed JSON: ") + e.what()}});
    } catch (const std::exception& e) {
      send(res, 500, json{{"error", e.what()}});
    }
    if (log && req.method == "POST") {
      log(req.method + " " + req.path + " -> " + std::to_string(res.status) +
          " " + req.body);
    }
  }

  void routes() {
    server.Post("/trials", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(req, res, [&] {
        return service.create(req.body.empty() ? json::object() : json::parse(req.body));
      });
    });
    server.Get(R"(/trials/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(req, res, [&] { return service.view(req.matches[1]); });
    });
    server.Post(R"(/trials/([^/]+)/cohorts)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  guarded(req, res, [&] {
                    return service.post_cohort(req.matches[1], json::parse(req.body));
                  });
                });
    server.Get(R"(/trials/([^/]+)/recommendation)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 guarded(req, res, [&] { return service.recommendation(req.matches[1]); });
               });
    server.Get(R"(/trials/([^/]+)/whatif)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 guarded(req, res, [&] {
                   std::optional<int> dose;
                   if (req.has_param("dose")) {
                     try {
                       dose = std::stoi(req.get_param_value("dose"));
                     } catch (const std::exception&) {
                       throw ServiceError(422, "dose must be an integer");
                     }
                   }
                   return service.whatif(req.matches[1], dose);
                 });
               });
    server.Get(R"(/trials/([^/]+)/mtd)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 guarded(req, res, [&] { return service.mtd(req.matches[1]); });
               });
  }
};

HttpFrontend::HttpFrontend(TrialService& service, Logger log)
    : impl_(std::make_unique<Impl>(service, std::move(log))) {
  impl_->routes();
}

HttpFrontend::~HttpFrontend() = default;

bool HttpFrontend::listen(const std::string& host, int port) {
  return impl_->server.listen(host, port);
}

int HttpFrontend::bind_any(const std::string& host) {
  return impl_->server.bind_to_any_port(host);
}

bool HttpFrontend::serve() { return impl_->server.listen_after_bind(); }

void HttpFrontend::stop() { impl_->server.stop(); }

void HttpFrontend::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace dosefind
