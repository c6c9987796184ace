#include "doctest.h"

#include <bit>
#include <set>

#include "covertree/rng.hpp"

using namespace covertree;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using B = Philox4x32::Block;
  using K = Philox4x32::Key;
  CHECK(Philox4x32::block(B{0, 0, 0, 0}, K{0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::block(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
        B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::block(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
        B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  Rng a = make_stream(7, stream_id("tstar", 10, 3));
  Rng b = make_stream(7, stream_id("tstar", 10, 3));
  Rng c = make_stream(7, stream_id("tstar", 10, 4));
  Rng d = make_stream(8, stream_id("tstar", 10, 3));
  bool differ_c = false, differ_d = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    REQUIRE(x == b());
    differ_c = differ_c || x != c();
    differ_d = differ_d || x != d();
  }
  CHECK(differ_c);
  CHECK(differ_d);
  CHECK(a.blocks_used() == 50);
}

TEST_CASE("stream ids separate kinds and arguments") {
  std::set<std::uint64_t> ids;
  for (const char* kind : {"cover", "tstar", "brw_xprime", "event", "gamma_tilde"}) {
    for (std::uint64_t n = 0; n < 20; ++n) {
      for (std::uint64_t r = 0; r < 50; ++r) ids.insert(stream_id(kind, n, r));
    }
  }
  CHECK(ids.size() == 5 * 20 * 50);
  CHECK(stream_id("x", 1, 2) != stream_id("x", 2, 1));
}

TEST_CASE("output bits are balanced") {
  Rng g = make_stream(1, 2);
  std::uint64_t ones = 0;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) ones += static_cast<std::uint64_t>(std::popcount(g()));
  const double mean = static_cast<double>(ones) / (64.0 * draws);
  CHECK(mean == doctest::Approx(0.5).epsilon(0.002));
}
