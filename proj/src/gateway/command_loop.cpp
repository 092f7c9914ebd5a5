#include "smartcore/gateway/command_loop.hpp"

#include <stdexcept>

namespace smartcore::gateway {

CommandLoop::CommandLoop(Gateway& gw) : gw_(gw), api_(gw), thread_([this] { worker(); }) {}

CommandLoop::~CommandLoop() { stop(); }

std::future<nlohmann::json> CommandLoop::post(nlohmann::json command) {
    auto task = std::make_shared<std::packaged_task<nlohmann::json()>>(
        [this, cmd = std::move(command)] { return api_.handle(cmd); });
    auto fut = task->get_future();
    enqueue([task] { (*task)(); });
    return fut;
}

void CommandLoop::enqueue(std::function<void()> job) {
    {
        std::lock_guard lock(mu_);
        if (stopping_) throw std::logic_error("command loop is stopped");
        jobs_.push_back(std::move(job));
    }
    cv_.notify_one();
}

void CommandLoop::stop() {
    {
        std::lock_guard lock(mu_);
        stopping_ = true;
    }
    cv_.notify_all();
    if (thread_.joinable()) thread_.join();
}

void CommandLoop::worker() {
    for (;;) {
        std::function<void()> job;
        {
            std::unique_lock lock(mu_);
            cv_.wait(lock, [this] { return stopping_ || !jobs_.empty(); });
            if (jobs_.empty()) return;
            job = std::move(jobs_.front());
            jobs_.pop_front();
        }
        job();
    }
}

}  // namespace smartcore::gateway
