#pragma once

#include <algorithm>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

namespace pasw {

namespace detail {

/// Serial loop with the pool's error contract: every index runs, then the
/// first failure is rethrown.
inline void run_inline(std::size_t n, const std::function<void(std::size_t)>& fn) {
  std::exception_ptr first;
  for (std::size_t i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace detail

/// Fixed-size pool running index-parallel loops.
///
/// The calling thread takes part in its own loop, so parallel_for may be
/// nested (a sweep over runs, each averaging over nodes) without deadlock.
/// A pool of size 1 runs everything inline on the caller.
class WorkerPool {
 public:
  explicit WorkerPool(unsigned workers = 1) : size_(std::max(1u, workers)) {
    for (unsigned n = 1; n < size_; ++n) threads_.emplace_back([this] { worker_loop(); });
  }

  ~WorkerPool() {
    {
      std::lock_guard lock(m_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  unsigned size() const { return size_; }

  /// Calls fn(i) for i in [0, n). If any call throws, the exception from
  /// the lowest failing index is rethrown after all calls finish.
  void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    if (size_ == 1 || n == 1) {
      detail::run_inline(n, fn);
      return;
    }
    auto job = std::make_shared<Job>(n, fn);
    {
      std::lock_guard lock(m_);
      queue_.push_back(job);
    }
    cv_.notify_all();
    run(*job);
    retire(job);
    std::unique_lock lock(job->m);
    job->cv.wait(lock, [&] { return job->done == job->n; });
    if (job->error) std::rethrow_exception(job->error);
  }

 private:
  struct Job {
    Job(std::size_t count, const std::function<void(std::size_t)>& f) : n(count), fn(f) {}
    const std::size_t n;
    const std::function<void(std::size_t)>& fn;
    std::size_t next = 0;  // guarded by m
    std::size_t done = 0;  // guarded by m
    std::size_t error_index = 0;
    std::exception_ptr error;
    std::mutex m;
    std::condition_variable cv;
  };

  static void run(Job& job) {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lock(job.m);
        if (job.next >= job.n) return;
        i = job.next++;
      }
      std::exception_ptr err;
      try {
        job.fn(i);
      } catch (...) {
        err = std::current_exception();
      }
      bool last;
      {
        std::lock_guard lock(job.m);
        if (err && (!job.error || i < job.error_index)) {
          job.error = err;
          job.error_index = i;
        }
        last = ++job.done == job.n;
      }
      if (last) job.cv.notify_all();
    }
  }

  void retire(const std::shared_ptr<Job>& job) {
    std::lock_guard lock(m_);
    auto it = std::find(queue_.begin(), queue_.end(), job);
    if (it != queue_.end()) queue_.erase(it);
  }

  void worker_loop() {
    for (;;) {
      std::shared_ptr<Job> job;
      {
        std::unique_lock lock(m_);
        cv_.wait(lock, [&] { return stop_ || !queue_.empty(); });
        if (stop_ && queue_.empty()) return;
        job = queue_.front();
      }
      run(*job);
      retire(job);
    }
  }

  unsigned size_;
  std::vector<std::thread> threads_;
  std::mutex m_;
  std::condition_variable cv_;
  std::deque<std::shared_ptr<Job>> queue_;
  bool stop_ = false;
};

/// Runs fn over [0, n) on pool, or inline when pool is null.
inline void parallel_for(WorkerPool* pool, std::size_t n, const std::function<void(std::size_t)>& fn) {
  if (pool)
    pool->parallel_for(n, fn);
  else
    detail::run_inline(n, fn);
}

}  // namespace pasw
