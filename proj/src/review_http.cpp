/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#include <colmatch/review_http.hpp>

#include <charconv>
#include <functional>

#include <httplib.h>

#include <colmatch/error.hpp>
#include <colmatch/report_json.hpp>

namespace colmatch::review
{
namespace
{

constexpr const char* json_type = "application/json";

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message)
{
    nlohmann::json body{{"error", {{"code", code}, {"message", message}}}};
    res.status = status;
    res.set_content(dump_stable(body, 0), json_type);
}

void send_json(httplib::Response& res, int status, const nlohmann::ordered_json& body)
{
    res.status = status;
    res.set_content(dump_stable(body, 0), json_type);
}

/// Maps library errors onto HTTP statuses.
void guarded(httplib::Response& res, const std::function<void()>& handler)
{
    try
    {
        handler();
    }
    catch (const NotFoundError& e)
    {
        send_error(res, 404, "not_found", e.what());
    }
    catch (const ConflictError& e)
    {
        send_error(res, 409, "conflict", e.what());
    }
    catch (const ValidationError& e)
    {
        send_error(res, 400, "validation", e.what());
    }
    catch (const nlohmann::json::exception& e)
    {
        send_error(res, 400, "bad_json", e.what());
    }
    catch (const std::exception& e)
    {
        send_error(res, 500, "internal", e.what());
    }
}

std::optional<int> query_k(const httplib::Request& req)
{
    if (!req.has_param("k"))
        return std::nullopt;
    const auto text = req.get_param_value("k");
    int k = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), k);
    if (ec != std::errc{} || ptr != text.data() + text.size() || k < 1)
        throw ValidationError("k must be a positive integer");
    return k;
}

bool query_flag(const httplib::Request& req, const char* name)
{
    if (!req.has_param(name))
        return false;
    const auto v = req.get_param_value(name);
    return v == "1" || v == "true";
}

nlohmann::json parse_body(const httplib::Request& req)
{
    try
    {
        return nlohmann::json::parse(req.body);
    }
    catch (const nlohmann::json::exception& e)
    {
        throw ValidationError(std::string("request body is not JSON: ") + e.what());
    }
}

}

struct ReviewServer::Impl
{
    ReviewService& service;
    httplib::Server server;

    explicit Impl(ReviewService& s) : service(s) { }
};

ReviewServer::ReviewServer(ReviewService& service, std::optional<std::filesystem::path> ui_dir)
    : impl_(std::make_unique<Impl>(service))
{
    auto& server = impl_->server;
    auto& svc = impl_->service;

    server.Post(
        "/api/sessions",
        [&svc](const httplib::Request& req, httplib::Response& res)
        {
            guarded(
                res,
                [&]
                {
                    const auto body = parse_body(req);
                    if (!body.is_object() || !body.contains("base_path") || !body.contains("new_path")
                        || !body.at("base_path").is_string() || !body.at("new_path").is_string())
                        throw ValidationError("body needs string fields base_path and new_path");
                    MatchConfig config;
                    if (body.contains("config") && !body.at("config").is_null())
                        config = config_from_json(body.at("config"));
                    Session session;
                    try
                    {
                        session = svc.create_session(
                            body.at("base_path").get<std::string>(), body.at("new_path").get<std::string>(), config);
                    }
                    catch (const ParseError& e)
                    {
                        nlohmann::json err{
                            {"error", {{"code", "load_failed"}, {"message", e.what()}, {"row", e.row()}}}};
                        res.status = 422;
                        res.set_content(dump_stable(err, 0), json_type);
                        return;
                    }
                    catch (const IoError& e)
                    {
                        send_error(res, 422, "load_failed", e.what());
                        return;
                    }
                    send_json(res, 201, nlohmann::ordered_json{{"id", session.id}});
                });
        });

    server.Get(
        "/api/sessions",
        [&svc](const httplib::Request&, httplib::Response& res)
        {
            guarded(
                res,
                [&]
                {
                    nlohmann::ordered_json out = nlohmann::ordered_json::array();
                    for (const auto& s : svc.list_sessions())
                        out.push_back(
                            {{"id", s.id},
                             {"base_release", s.base_release},
                             {"new_release", s.new_release},
                             {"decided", s.decided},
                             {"total", s.total}});
                    send_json(res, 200, out);
                });
        });

    server.Get(
        R"(/api/sessions/([0-9A-Za-z]+)/suggestions)",
        [&svc](const httplib::Request& req, httplib::Response& res)
        {
            guarded(
                res,
                [&] { send_json(res, 200, svc.get_suggestions(req.matches[1], query_k(req), query_flag(req, "histograms"))); });
        });

    server.Post(
        R"(/api/sessions/([0-9A-Za-z]+)/decisions)",
        [&svc](const httplib::Request& req, httplib::Response& res)
        {
            guarded(
                res,
                [&]
                {
                    const auto decision = decision_from_json(parse_body(req));
                    send_json(res, 200, svc.record_decision(req.matches[1], decision, query_k(req)));
                });
        });

    server.Get(
        R"(/api/sessions/([0-9A-Za-z]+)/export)",
        [&svc](const httplib::Request& req, httplib::Response& res)
        {
            guarded(
                res,
                [&]
                {
                    res.status = 200;
                    res.set_content(svc.export_mapping(req.matches[1]), "text/csv");
                });
        });

    if (ui_dir)
    {
        if (!server.set_mount_point("/", ui_dir->string()))
            throw IoError("cannot serve UI directory '" + ui_dir->string() + "'");
    }
}

ReviewServer::~ReviewServer() = default;

int ReviewServer::bind(const std::string& host, int port)
{
    if (port == 0)
        return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool ReviewServer::listen_after_bind()
{
    return impl_->server.listen_after_bind();
}

void ReviewServer::stop()
{
    impl_->server.stop();
}

void ReviewServer::wait_until_ready() const
{
    impl_->server.wait_until_ready();
}

}
