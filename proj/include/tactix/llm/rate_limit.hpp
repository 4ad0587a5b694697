// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <string>

namespace tactix {

/// Token bucket. acquire() blocks until a token is available.
class TokenBucket {
public:
    using Clock = std::chrono::steady_clock;
    TokenBucket(double rate_per_sec, double burst);
    void acquire();
    /// Non-blocking variant; true if a token was taken.
    bool try_acquire();
    double rate() const { return rate_; }

private:
    void refill(Clock::time_point now);
    double rate_;
    double burst_;
    double tokens_;
    Clock::time_point last_;
    std::mutex mu_;
};

/// Shared bucket per provider id, created on first use. rate <= 0 disables limiting.
std::shared_ptr<TokenBucket> limiter_for(const std::string& provider_id, double rate_per_sec);

}  // namespace tactix
