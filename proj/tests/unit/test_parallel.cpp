#include <gtest/gtest.h>

#include <atomic>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "pasw/parallel.hpp"

using namespace pasw;

TEST(WorkerPool, VisitsEveryIndexOnce) {
  for (unsigned workers : {1u, 3u, 8u}) {
    WorkerPool pool(workers);
    std::vector<std::atomic<int>> hits(1000);
    pool.parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(WorkerPool, EmptyAndSingleRanges) {
  WorkerPool pool(4);
  int calls = 0;
  pool.parallel_for(0, [&](std::size_t) { ++calls; });
  pool.parallel_for(1, [&](std::size_t) { ++calls; });
  EXPECT_EQ(calls, 1);
}

TEST(WorkerPool, NestedLoopsComplete) {
  WorkerPool pool(4);
  std::vector<std::vector<int>> out(6, std::vector<int>(17, 0));
  pool.parallel_for(out.size(), [&](std::size_t i) {
    pool.parallel_for(out[i].size(), [&](std::size_t j) { out[i][j] = static_cast<int>(i * 100 + j); });
  });
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = 0; j < out[i].size(); ++j) EXPECT_EQ(out[i][j], static_cast<int>(i * 100 + j));
}

TEST(WorkerPool, LowestFailingIndexWins) {
  for (unsigned workers : {1u, 8u}) {
    WorkerPool pool(workers);
    std::atomic<int> ran{0};
    try {
      pool.parallel_for(50, [&](std::size_t i) {
        ++ran;
        if (i == 7 || i == 31) throw std::runtime_error("index " + std::to_string(i));
      });
      FAIL() << "expected an exception";
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "index 7");
    }
    EXPECT_EQ(ran.load(), 50);
  }
  std::atomic<int> ran{0};
  EXPECT_THROW(parallel_for(nullptr, 5,
                            [&](std::size_t i) {
                              ++ran;
                              if (i == 2) throw std::runtime_error("x");
                            }),
               std::runtime_error);
  EXPECT_EQ(ran.load(), 5);
}

TEST(WorkerPool, SizeIsAtLeastOne) {
  EXPECT_EQ(WorkerPool(0).size(), 1u);
  EXPECT_EQ(WorkerPool(5).size(), 5u);
}
