#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "kgrag/transport.hpp"

#include "kgrag/errors.hpp"

#include <cmath>
#include <thread>

namespace kgrag {

namespace {

struct SplitUrl {
    std::string origin; // scheme://host[:port]
    std::string path;   // /path?query
};

SplitUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw TransportError("malformed URL: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

} // namespace

HttplibTransport::HttplibTransport(std::chrono::seconds timeout) : timeout_(timeout) {}

HttpResponse HttplibTransport::send(const HttpRequest& request) {
    auto [origin, path] = split_url(request.url);
    httplib::Client client(origin);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);

    httplib::Headers headers;
    std::string content_type = "application/json";
    for (const auto& [k, v] : request.headers) {
        if (k == "Content-Type")
            content_type = v;
        else
            headers.emplace(k, v);
    }

    httplib::Result res = request.method == "GET"
                              ? client.Get(path, headers)
                              : client.Post(path, headers, request.body, content_type);
    if (!res) throw TransportError("request to " + origin + " failed: " + httplib::to_string(res.error()));
    return {res->status, res->body};
}

Sleeper real_sleeper() {
    return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::chrono::milliseconds RetryPolicy::delay_after(int attempt) const {
    double factor = std::pow(multiplier, attempt - 1);
    return std::chrono::milliseconds(
        static_cast<long long>(std::llround(static_cast<double>(initial_delay.count()) * factor)));
}

HttpResponse send_with_retry(Transport& transport, const HttpRequest& request,
                             const RetryPolicy& policy, const Sleeper& sleep) {
    std::string last_error;
    for (int attempt = 1; attempt <= policy.max_attempts; ++attempt) {
        try {
            auto response = transport.send(request);
            if (response.status >= 200 && response.status < 300) return response;
            if (!is_retryable_status(response.status))
                throw HttpStatusError(response.status, response.body.substr(0, 300));
            last_error = "HTTP " + std::to_string(response.status);
        } catch (const TransportError& e) {
            last_error = e.what();
        }
        if (attempt < policy.max_attempts) sleep(policy.delay_after(attempt));
    }
    throw RetryExhaustedError(policy.max_attempts, last_error);
}

InFlightLimiter::InFlightLimiter(int limit) : limit_(limit) {
    if (limit < 1) throw PreconditionError("in-flight limit must be >= 1");
}

void InFlightLimiter::acquire() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return in_flight_ < limit_; });
    ++in_flight_;
}

void InFlightLimiter::release() {
    {
        std::lock_guard lock(mutex_);
        --in_flight_;
    }
    cv_.notify_one();
}

RateLimiter::RateLimiter(double requests_per_second)
    : interval_(std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          std::chrono::duration<double>(1.0 / requests_per_second))),
      next_slot_(std::chrono::steady_clock::now()) {
    if (!(requests_per_second > 0)) throw PreconditionError("requests per second must be > 0");
}

void RateLimiter::acquire() {
    std::chrono::steady_clock::time_point slot;
    {
        std::lock_guard lock(mutex_);
        auto now = std::chrono::steady_clock::now();
        slot = std::max(now, next_slot_);
        next_slot_ = slot + interval_;
    }
    std::this_thread::sleep_until(slot);
}

} // namespace kgrag
