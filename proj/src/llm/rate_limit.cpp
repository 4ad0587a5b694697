// SPDX-License-Identifier: Apache-2.0
#include "tactix/llm/rate_limit.hpp"

#include <algorithm>
#include <map>
#include <thread>

namespace tactix {

TokenBucket::TokenBucket(double rate_per_sec, double burst)
    : rate_(rate_per_sec), burst_(std::max(1.0, burst)), tokens_(std::max(1.0, burst)), last_(Clock::now()) {}

void TokenBucket::refill(Clock::time_point now) {
    std::chrono::duration<double> dt = now - last_;
    tokens_ = std::min(burst_, tokens_ + dt.count() * rate_);
    last_ = now;
}

bool TokenBucket::try_acquire() {
    std::lock_guard lock(mu_);
    refill(Clock::now());
    if (tokens_ < 1.0) return false;
    tokens_ -= 1.0;
    return true;
}

void TokenBucket::acquire() {
    while (true) {
        std::chrono::duration<double> wait{0};
        {
            std::lock_guard lock(mu_);
            refill(Clock::now());
            if (tokens_ >= 1.0) {
                tokens_ -= 1.0;
                return;
            }
            wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
        }
        std::this_thread::sleep_for(wait);
    }
}

std::shared_ptr<TokenBucket> limiter_for(const std::string& provider_id, double rate_per_sec) {
    if (rate_per_sec <= 0) return nullptr;
    static std::mutex mu;
    static std::map<std::string, std::shared_ptr<TokenBucket>> buckets;
    std::lock_guard lock(mu);
    auto& b = buckets[provider_id];
    if (!b) b = std::make_shared<TokenBucket>(rate_per_sec, 1.0);
    return b;
}

}  // namespace tactix
