#include "tilegp/task_pool.hpp"

#include <atomic>
#include <stdexcept>

namespace tilegp {

struct WorkerPool::RunState {
  TaskGraph* graph = nullptr;
  std::vector<int> deps;
  std::vector<std::deque<int>> ready;  // one deque per worker
  int remaining = 0;
  std::atomic<bool> cancelled{false};
  std::exception_ptr error;
};

WorkerPool::WorkerPool(int workers) : workers_(workers) {
  if (workers < 1) throw std::invalid_argument("WorkerPool: workers must be >= 1");
  threads_.reserve(workers_ - 1);
  for (int w = 1; w < workers_; ++w) threads_.emplace_back([this, w] { worker_loop(w); });
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  work_cv_.notify_all();
  for (auto& t : threads_) t.join();
}

bool WorkerPool::try_execute_one(RunState& st, int self, std::unique_lock<std::mutex>& lock) {
  int task = -1;
  if (!st.ready[self].empty()) {
    task = st.ready[self].back();  // own queue: LIFO for locality
    st.ready[self].pop_back();
  } else {
    for (int off = 1; off < workers_ && task < 0; ++off) {
      auto& victim = st.ready[(self + off) % workers_];
      if (!victim.empty()) {
        task = victim.front();  // steal the oldest
        victim.pop_front();
      }
    }
  }
  if (task < 0) return false;

  lock.unlock();
  std::exception_ptr err;
  if (!st.cancelled.load(std::memory_order_relaxed)) {
    try {
      st.graph->nodes_[task].fn();
    } catch (...) {
      err = std::current_exception();
    }
  }
  lock.lock();

  if (err && !st.error) {
    st.error = err;
    st.cancelled.store(true, std::memory_order_relaxed);
  }
  bool pushed = false;
  for (int succ : st.graph->nodes_[task].successors) {
    if (--st.deps[succ] == 0) {
      st.ready[self].push_back(succ);
      pushed = true;
    }
  }
  if (--st.remaining == 0 || pushed) work_cv_.notify_all();
  return true;
}

void WorkerPool::worker_loop(int self) {
  std::unique_lock lock(mu_);
  while (true) {
    if (stop_) return;
    if (active_ && active_->remaining > 0) {
      if (!try_execute_one(*active_, self, lock)) work_cv_.wait(lock);
    } else {
      work_cv_.wait(lock);
    }
  }
}

void WorkerPool::run(TaskGraph& graph) {
  if (graph.size() == 0) return;

  if (workers_ == 1) {
    // Inline execution in dependency order, no scheduling machinery.
    std::vector<int> deps(graph.size());
    std::deque<int> ready;
    for (int i = 0; i < graph.size(); ++i) {
      deps[i] = graph.nodes_[i].deps;
      if (deps[i] == 0) ready.push_back(i);
    }
    int done = 0;
    while (!ready.empty()) {
      int t = ready.front();
      ready.pop_front();
      graph.nodes_[t].fn();
      ++done;
      for (int succ : graph.nodes_[t].successors)
        if (--deps[succ] == 0) ready.push_back(succ);
    }
    if (done != graph.size()) throw std::logic_error("TaskGraph: dependency cycle");
    return;
  }

  RunState st;
  st.graph = &graph;
  st.deps.resize(graph.size());
  st.ready.resize(workers_);
  st.remaining = graph.size();
  int seeded = 0;
  for (int i = 0; i < graph.size(); ++i) {
    st.deps[i] = graph.nodes_[i].deps;
    if (st.deps[i] == 0) st.ready[seeded++ % workers_].push_back(i);
  }
  if (seeded == 0) throw std::logic_error("TaskGraph: dependency cycle");

  std::unique_lock lock(mu_);
  active_ = &st;
  work_cv_.notify_all();
  while (st.remaining > 0) {
    if (!try_execute_one(st, 0, lock)) {
      work_cv_.wait(lock, [&] {
        if (st.remaining == 0) return true;
        for (const auto& q : st.ready)
          if (!q.empty()) return true;
        return false;
      });
    }
  }
  active_ = nullptr;
  if (st.error) std::rethrow_exception(st.error);
}

void WorkerPool::parallel_for(int begin, int end, const std::function<void(int, int)>& body) {
  if (begin >= end) return;
  const int span = end - begin;
  const int chunks = std::min(span, workers_ * 4);
  if (chunks <= 1) {
    body(begin, end);
    return;
  }
  TaskGraph g;
  for (int c = 0; c < chunks; ++c) {
    const int lo = begin + static_cast<int>(static_cast<long long>(span) * c / chunks);
    const int hi = begin + static_cast<int>(static_cast<long long>(span) * (c + 1) / chunks);
    if (lo < hi) g.add([&body, lo, hi] { body(lo, hi); });
  }
  run(g);
}

}  // namespace tilegp
