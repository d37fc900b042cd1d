#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace kgrag {

struct HttpRequest {
    std::string method = "POST";
    std::string url;
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
};

struct HttpResponse {
    int status = 0;
    std::string body;
};

// One HTTP exchange. Implementations throw TransportError when no response
// was received at all; any received status is returned, never thrown.
class Transport {
public:
    virtual ~Transport() = default;
    virtual HttpResponse send(const HttpRequest& request) = 0;
};

// cpp-httplib backed transport; supports http:// and https:// URLs.
class HttplibTransport final : public Transport {
public:
    explicit HttplibTransport(std::chrono::seconds timeout = std::chrono::seconds(120));
    HttpResponse send(const HttpRequest& request) override;

private:
    std::chrono::seconds timeout_;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

Sleeper real_sleeper();

// Exponential backoff: attempt n (1-based) waits initial * multiplier^(n-1)
// before attempt n+1.
struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_delay{1000};
    double multiplier = 2.0;

    std::chrono::milliseconds delay_after(int attempt) const;
};

inline bool is_retryable_status(int status) {
    return status == 429 || status >= 500;
}

// Sends `request`, retrying transport failures and 429/5xx per `policy`.
// Returns the first 2xx response. Throws HttpStatusError on other statuses,
// RetryExhaustedError once attempts run out.
HttpResponse send_with_retry(Transport& transport, const HttpRequest& request,
                             const RetryPolicy& policy, const Sleeper& sleep);

// Counting semaphore with a runtime limit.
class InFlightLimiter {
public:
    explicit InFlightLimiter(int limit);

    void acquire();
    void release();
    int limit() const noexcept { return limit_; }

    class Guard {
    public:
        explicit Guard(InFlightLimiter& l) : l_(l) { l_.acquire(); }
        ~Guard() { l_.release(); }
        Guard(const Guard&) = delete;
        Guard& operator=(const Guard&) = delete;

    private:
        InFlightLimiter& l_;
    };

private:
    int limit_;
    int in_flight_ = 0;
    std::mutex mutex_;
    std::condition_variable cv_;
};

// Requests-per-second ceiling; callers block until their slot comes up.
class RateLimiter {
public:
    explicit RateLimiter(double requests_per_second);
    void acquire();

private:
    std::chrono::steady_clock::duration interval_;
    std::chrono::steady_clock::time_point next_slot_;
    std::mutex mutex_;
};

} // namespace kgrag
