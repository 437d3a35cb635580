#pragma once

#include <condition_variable>
#include <deque>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace tilegp {

/// A static DAG of tasks. Built single-threaded, then handed to a WorkerPool
/// for execution. Dependencies only gate scheduling; any floating-point
/// ordering that matters must be fixed by the dependency chains themselves.
class TaskGraph {
 public:
  int add(std::function<void()> fn) {
    nodes_.push_back(Node{std::move(fn), 0, {}});
    return static_cast<int>(nodes_.size()) - 1;
  }

  /// `task` becomes runnable only after `after` has finished. after < 0 is
  /// ignored, which lets callers chain against "no previous writer".
  void add_dependency(int task, int after) {
    if (after < 0) return;
    nodes_[after].successors.push_back(task);
    ++nodes_[task].deps;
  }

  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  friend class WorkerPool;
  struct Node {
    std::function<void()> fn;
    int deps;
    std::vector<int> successors;
  };
  std::vector<Node> nodes_;
};

/// Fixed-size pool executing task DAGs with per-worker deques and work
/// stealing. The constructing thread takes part in every run, so a pool with
/// one worker spawns no threads and runs everything inline. The first
/// exception thrown by a task cancels the remaining tasks and is rethrown
/// from run().
class WorkerPool {
 public:
  explicit WorkerPool(int workers);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  int workers() const { return workers_; }

  void run(TaskGraph& graph);

  /// Splits [begin, end) into chunks and runs body(first, last) per chunk.
  void parallel_for(int begin, int end, const std::function<void(int, int)>& body);

 private:
  struct RunState;

  void worker_loop(int self);
  bool try_execute_one(RunState& st, int self, std::unique_lock<std::mutex>& lock);

  int workers_;
  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable work_cv_;
  RunState* active_ = nullptr;
  bool stop_ = false;
};

}  // namespace tilegp
