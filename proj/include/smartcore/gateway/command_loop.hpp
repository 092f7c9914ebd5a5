#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <thread>
#include <type_traits>

#include <json.hpp>

#include "smartcore/gateway/gateway.hpp"
#include "smartcore/gateway/management_api.hpp"

namespace smartcore::gateway {

/// Serializes every gateway mutation onto one worker thread. Any number of
/// producers may post commands concurrently; each gets a future for its
/// result. Commands run in the order they were posted.
class CommandLoop {
public:
    explicit CommandLoop(Gateway& gw);
    ~CommandLoop();

    CommandLoop(const CommandLoop&) = delete;
    CommandLoop& operator=(const CommandLoop&) = delete;

    std::future<nlohmann::json> post(nlohmann::json command);

    /// Runs an arbitrary function against the gateway on the loop thread.
    template <class F>
    auto exec(F&& f) -> std::future<std::invoke_result_t<F, Gateway&>> {
        using R = std::invoke_result_t<F, Gateway&>;
        auto task = std::make_shared<std::packaged_task<R()>>([this, fn = std::forward<F>(f)]() mutable { return fn(gw_); });
        auto fut = task->get_future();
        enqueue([task] { (*task)(); });
        return fut;
    }

    /// Drains pending commands and joins the worker. Idempotent.
    void stop();

private:
    void enqueue(std::function<void()> job);
    void worker();

    Gateway& gw_;
    ManagementApi api_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<std::function<void()>> jobs_;
    bool stopping_ = false;
    std::thread thread_;
};

}  // namespace smartcore::gateway
