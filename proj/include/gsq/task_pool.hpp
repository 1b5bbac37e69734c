#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace gsq {

// Minimal fork-join helper: run job(i) for i in [0, count) across a fixed set
// of workers plus the calling thread, blocking until every job finished.
// With zero workers everything runs inline on the caller.
class TaskPool {
 public:
  explicit TaskPool(unsigned workers = 0) {
    for (unsigned i = 0; i < workers; ++i)
      threads_.emplace_back([this] { worker_loop(); });
  }

  ~TaskPool() {
    {
      std::lock_guard<std::mutex> lock(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  TaskPool(const TaskPool&) = delete;
  TaskPool& operator=(const TaskPool&) = delete;

  unsigned workers() const { return static_cast<unsigned>(threads_.size()); }

  template <class F>
  void run(std::uint32_t count, F&& job) {
    if (threads_.empty() || count <= 1) {
      for (std::uint32_t i = 0; i < count; ++i) job(i);
      return;
    }
    {
      std::lock_guard<std::mutex> lock(mu_);
      job_ = job;
      total_ = count;
      next_ = 0;
      pending_ = count;
    }
    cv_.notify_all();
    help();
    std::unique_lock<std::mutex> lock(mu_);
    done_cv_.wait(lock, [this] { return pending_ == 0; });
    job_ = nullptr;
  }

 private:
  void help() {
    for (;;) {
      std::uint32_t i;
      {
        std::lock_guard<std::mutex> lock(mu_);
        if (next_ >= total_) return;
        i = next_++;
      }
      job_(i);
      finish_one();
    }
  }

  void worker_loop() {
    for (;;) {
      std::uint32_t i;
      {
        std::unique_lock<std::mutex> lock(mu_);
        cv_.wait(lock, [this] { return stop_ || next_ < total_; });
        if (stop_) return;
        i = next_++;
      }
      job_(i);
      finish_one();
    }
  }

  void finish_one() {
    std::lock_guard<std::mutex> lock(mu_);
    if (--pending_ == 0) done_cv_.notify_all();
  }

  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable cv_, done_cv_;
  std::function<void(std::uint32_t)> job_;
  std::uint32_t total_ = 0, next_ = 0, pending_ = 0;
  bool stop_ = false;
};

}  // namespace gsq
