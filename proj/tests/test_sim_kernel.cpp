#include <stdexcept>
#include <string>
#include <vector>

#include "dgsim/event_queue.hpp"
#include "dgsim/time.hpp"
#include "doctest.h"

using namespace dgsim;

TEST_CASE("events dequeue in time order") {
  EventQueue eq;
  std::vector<int> order;
  eq.schedule(5, 0, 0, [&] { order.push_back(5); });
  eq.schedule(3, 0, 0, [&] { order.push_back(3); });
  eq.run_all();
  CHECK(order == std::vector<int>{3, 5});
}

TEST_CASE("equal-time events keep insertion order") {
  EventQueue eq;
  std::vector<char> order;
  eq.schedule(7, 0, 0, [&] { order.push_back('A'); });
  eq.schedule(7, 0, 0, [&] { order.push_back('B'); });
  eq.run_all();
  CHECK(order == std::vector<char>{'A', 'B'});
}

TEST_CASE("scheduling in the past is a logic error") {
  EventQueue eq;
  eq.schedule(10, 0, 0, [&] {
    CHECK_THROWS_AS(eq.schedule(9, 0, 0, [] {}), std::logic_error);
    eq.schedule(10, 0, 0, [] {});  // now is allowed
  });
  eq.run_all();
}

TEST_CASE("run_until advances the clock to the limit on an empty queue") {
  EventQueue eq;
  CHECK(eq.run_until(100) == 100);
  CHECK(eq.now() == 100);
}

TEST_CASE("run_until leaves future events untouched") {
  EventQueue eq;
  bool ran = false;
  eq.schedule(10, 0, 0, [&] { ran = true; });
  CHECK(eq.run_until(5) == 5);
  CHECK(!ran);
  eq.run_all();
  CHECK(ran);
  CHECK(eq.now() == 10);
}

TEST_CASE("cancelled events do not run") {
  EventQueue eq;
  bool ran = false;
  EventId id = eq.schedule(4, 0, 0, [&] { ran = true; });
  eq.cancel(id);
  eq.run_all();
  CHECK(!ran);
}

TEST_CASE("identical schedules give byte-identical event logs") {
  auto run_once = [] {
    EventQueue eq;
    std::string log;
    eq.set_log(&log);
    for (int i = 0; i < 50; ++i) {
      eq.schedule((i * 37) % 11, i % 3, i % 5, [&eq, i] {
        if (i % 4 == 0) eq.schedule_in(3, 9, 9, [] {});
      });
    }
    eq.run_all();
    return log;
  };
  CHECK(run_once() == run_once());
}

TEST_CASE("cycle conversion rounds to the nearest picosecond") {
  CHECK(cycle_ticks(3.6e9) == 278);
  CHECK(ns_to_ticks(100) == 100000);
}
