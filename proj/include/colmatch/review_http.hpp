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
#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <colmatch/review.hpp>

namespace colmatch::review
{

/// JSON-over-HTTP binding of ReviewService. Errors are returned as {"error": {"code", "message"}}.
class ReviewServer
{
public:
    explicit ReviewServer(ReviewService& service, std::optional<std::filesystem::path> ui_dir = std::nullopt);
    ~ReviewServer();

    ReviewServer(const ReviewServer&) = delete;
    ReviewServer& operator=(const ReviewServer&) = delete;

    /// Binds and returns the port, or -1. Port 0 picks a free port.
    int bind(const std::string& host, int port);

    /// Blocks serving requests until stop() is called.
    bool listen_after_bind();

    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}
