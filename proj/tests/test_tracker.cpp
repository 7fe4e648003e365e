#include <doctest.h>

#include <stdexcept>
#include <map>

#include "steprl/rng.hpp"
#include "steprl/tracker.hpp"

using namespace steprl;

namespace {

std::vector<TaskId> ids(std::initializer_list<std::int32_t> values) {
  std::vector<TaskId> out;
  for (std::int32_t v : values) out.push_back(TaskId{v});
  return out;
}

// Straight transcription of the update rule, kept deliberately separate from
// the implementation under test.
double oracle_update(double prior, int sampled, int successes, int group) {
  const double alpha =
      sampled < group ? 1.0 - static_cast<double>(sampled) / group : 0.0;
  return (successes + alpha * prior * group) / (sampled + alpha * group);
}

}  // namespace

TEST_CASE("init_table stores uniform estimates and parameters") {
  const SuccessRateTable table = init_table(ids({2, 0, 1}), 16, 0.6, 0.0);
  CHECK(table.records.size() == 3);
  CHECK(table.round == 0);
  CHECK(table.group_size == 16);
  CHECK(table.success_threshold == 0.6);
  // records sorted ascending regardless of input order
  CHECK(table.records[0].task == TaskId{0});
  CHECK(table.records[2].task == TaskId{2});
  for (const TaskRecord& record : table.records) {
    CHECK(record.success_rate == 0.0);
    CHECK(record.sampled == 0);
    CHECK(record.successes == 0);
  }
}

TEST_CASE("init_table validates its inputs") {
  CHECK_THROWS_AS(init_table(ids({1, 1}), 16, 0.6, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(init_table(ids({1}), 1, 0.6, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(init_table(ids({1}), 16, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(init_table(ids({1}), 16, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(init_table(ids({1}), 16, 0.6, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(init_table(ids({1}), 16, 0.6, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(init_table({}, 16, 0.6, 0.0), std::invalid_argument);
}

TEST_CASE("success_rate rejects unknown tasks") {
  const SuccessRateTable table = init_table(ids({0, 1}), 16, 0.6, 0.0);
  CHECK(table.find(TaskId{5}) == nullptr);
  CHECK_THROWS_AS(table.success_rate(TaskId{5}), std::invalid_argument);
}

TEST_CASE("update_round matches the worked examples") {
  SuccessRateTable table = init_table(ids({0, 1, 2}), 16, 0.6, 0.0);

  SUBCASE("a full round replaces the estimate with the plain ratio") {
    const auto next = update_round(table, {{TaskId{0}, {16, 8}}});
    CHECK(next.success_rate(TaskId{0}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(next.round == 1);
  }
  SUBCASE("no data leaves the estimate fixed") {
    table.records[1].success_rate = 0.37;
    const auto next = update_round(table, {});
    CHECK(next.success_rate(TaskId{1}) == doctest::Approx(0.37).epsilon(1e-12));
  }
  SUBCASE("partial round blends by the discount") {
    table.records[0].success_rate = 0.5;
    // (2 + 0.75 * 0.5 * 16) / (4 + 0.75 * 16) = 8 / 16
    const auto next = update_round(table, {{TaskId{0}, {4, 2}}});
    CHECK(next.success_rate(TaskId{0}) == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("update_round keeps last-round counts per record") {
  SuccessRateTable table = init_table(ids({0, 1}), 16, 0.6, 0.0);
  const auto next = update_round(table, {{TaskId{0}, {5, 3}}});
  CHECK(next.find(TaskId{0})->sampled == 5);
  CHECK(next.find(TaskId{0})->successes == 3);
  CHECK(next.find(TaskId{1})->sampled == 0);
}

TEST_CASE("update_round validates counts") {
  const SuccessRateTable table = init_table(ids({0}), 16, 0.6, 0.0);
  CHECK_THROWS_AS(update_round(table, {{TaskId{0}, {4, 5}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(update_round(table, {{TaskId{0}, {-1, 0}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(update_round(table, {{TaskId{0}, {4, -1}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(update_round(table, {{TaskId{9}, {4, 4}}}),
                  std::invalid_argument);
}

TEST_CASE("update algebra holds over randomized inputs") {
  Rng rng(2024);
  const int group = 16;
  for (int trial = 0; trial < 10000; ++trial) {
    SuccessRateTable table = init_table(ids({0}), group, 0.6, 0.0);
    const double prior = rng.next_double();
    table.records[0].success_rate = prior;
    const int sampled = static_cast<int>(rng.uniform_index(2 * group + 1));
    const int successes = static_cast<int>(rng.uniform_index(sampled + 1));
    const auto next = update_round(table, {{TaskId{0}, {sampled, successes}}});
    const double updated = next.success_rate(TaskId{0});

    // matches the independent transcription
    CHECK(updated ==
          doctest::Approx(oracle_update(prior, sampled, successes, group))
              .epsilon(1e-12));
    // always a valid probability
    CHECK(updated >= 0.0);
    CHECK(updated <= 1.0);
    // full rounds reduce to the plain ratio
    if (sampled >= group) {
      CHECK(updated == doctest::Approx(static_cast<double>(successes) / sampled)
                           .epsilon(1e-12));
    }
    // empty rounds are the identity
    if (sampled == 0) {
      CHECK(updated == doctest::Approx(prior).epsilon(1e-12));
    }
    // monotone in the success count
    if (successes < sampled) {
      SuccessRateTable again = init_table(ids({0}), group, 0.6, 0.0);
      again.records[0].success_rate = prior;
      const auto more =
          update_round(again, {{TaskId{0}, {sampled, successes + 1}}});
      CHECK(more.success_rate(TaskId{0}) > updated);
    }
  }
}

TEST_CASE("cache selects the intermediate band") {
  SuccessRateTable table = init_table(ids({0, 1, 2}), 16, 0.6, 0.0);
  table.records[0].success_rate = 0.0;
  table.records[1].success_rate = 0.3;
  table.records[2].success_rate = 0.9;
  CHECK(cache(table) == ids({1}));

  SUBCASE("all zero rates give an empty cache") {
    table.records[1].success_rate = 0.0;
    table.records[2].success_rate = 0.0;
    CHECK(cache(table).empty());
  }
  SUBCASE("the upper bound is strict") {
    table.records[0].success_rate = 0.2;
    table.records[1].success_rate = 0.59;
    table.records[2].success_rate = 0.6;
    CHECK(cache(table) == ids({0, 1}));
  }
}

TEST_CASE("cache never contains excluded rates under random tables") {
  Rng rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    SuccessRateTable table = init_table(ids({0, 1, 2, 3, 4}), 16, 0.6, 0.0);
    for (TaskRecord& record : table.records) {
      record.success_rate = rng.next_double();
    }
    for (TaskId task : cache(table)) {
      const double rate = table.success_rate(task);
      CHECK(rate > 0.0);
      CHECK(rate < table.success_threshold);
    }
  }
}
