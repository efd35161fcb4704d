// Copyright 2026 The combkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <functional>

#include "combkit/combs.hpp"
#include "combkit/random.hpp"
#include "combkit/scenarios.hpp"
#include "oracles.hpp"

using namespace combkit;

namespace {

TimeSet ts(std::vector<std::string> labels) { return TimeSet(std::move(labels)); }

ComplexMatrix plusState() {
  return ComplexMatrix::fromRows({{0.5, 0.5}, {0.5, 0.5}});
}

ChoiChannel depolarizing(std::size_t d, double p) {
  return combine(1.0 - p, identityChannel(d), p,
                 replacementChannel(d, ComplexMatrix::identity(d) * (1.0 / d)));
}

// Sum of contract over every outcome sequence of the given instruments.
double bornTotal(const Comb& comb, const std::vector<Instrument>& instruments) {
  const auto& times = comb.times().labels();
  double total = 0.0;
  std::function<void(std::size_t, MapSequence&)> walk = [&](std::size_t k,
                                                           MapSequence& maps) {
    if (k == times.size()) {
      total += contract(comb, maps);
      return;
    }
    for (const auto& o : instruments[k].outcomes()) {
      maps.insert_or_assign(times[k], o.channel);
      walk(k + 1, maps);
    }
  };
  MapSequence maps;
  walk(0, maps);
  return total;
}

}  // namespace

TEST_CASE("time sets") {
  CHECK_THROWS_AS(ts({"t2", "t1"}), ValidationError);
  CHECK_THROWS_AS(ts({"t1", "t1"}), ValidationError);
  CHECK(TimeSet::fromUnordered({"t10", "t2", "t1"}) == ts({"t1", "t2", "t10"}));
  CHECK(ts({"t1", "t3"}).isSubsetOf(ts({"t1", "t2", "t3"})));
  CHECK_FALSE(ts({"t1", "t4"}).isSubsetOf(ts({"t1", "t2", "t3"})));
  CHECK(ts({"t1", "t2", "t3"}).minus(ts({"t2"})) == ts({"t1", "t3"}));
  CHECK(ts({"t1", "t3"}).str() == "{t1,t3}");
  CHECK(nonemptySubsets(ts({"t1", "t2", "t3", "t4"})).size() == 15);
}

TEST_CASE("Stern-Gerlach comb equals the identity-link chain") {
  const Comb sg = sternGerlachComb();
  const Comb chain = fromMarkovChain(plusState(), {identityChannel(2), identityChannel(2)});
  CHECK(maxAbsDiff(sg.choi(), chain.choi()) < 1e-14);
  // 1_{o3} (x) Phi+_{i3,o2} (x) Phi+_{i2,o1} (x) rho_{i1}
  const std::vector<ComplexMatrix> factors{ComplexMatrix::identity(2), maxEntangled(2),
                                           maxEntangled(2), plusState()};
  CHECK(maxAbsDiff(sg.choi(), kronAll(factors)) < 1e-14);
}

TEST_CASE("contract reproduces one eighth for up, right, up") {
  const Instrument jz = projectiveInstrument(ReferenceBasis::z());
  const Instrument jx = projectiveInstrument(ReferenceBasis::x());
  const MapSequence maps{{"t1", jz.channel(0)}, {"t2", jx.channel(0)}, {"t3", jz.channel(0)}};
  CHECK(contract(sternGerlachComb(), maps) == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("contract checks its inputs") {
  const Comb sg = sternGerlachComb();
  const MapSequence missing{{"t1", identityChannel(2)}, {"t2", identityChannel(2)}};
  CHECK_THROWS_AS(contract(sg, missing), DimensionError);
  const MapSequence wrongDim{{"t1", identityChannel(2)},
                             {"t2", identityChannel(3)},
                             {"t3", identityChannel(2)}};
  CHECK_THROWS_AS(contract(sg, wrongDim), DimensionError);
}

TEST_CASE("dilation combs contracted with identities give one") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t steps = 1 + rng.index(4);
    const Dilation d = randomDilation(2, 2, steps, rng);
    const Comb c = fromDilation(d, defaultTimes(steps));
    CHECK(contract(c, padWithIdentity({}, c)) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("Markov comb of depolarizing channels matches step-wise simulation") {
  Rng rng(31);
  const ComplexMatrix rho0 = randomDensityMatrix(2, rng);
  const std::vector<ChoiChannel> links{depolarizing(2, 0.3), depolarizing(2, 0.6)};
  const Comb c = fromMarkovChain(rho0, links);
  const Instrument z = projectiveInstrument(ReferenceBasis::z());
  const Instrument x = projectiveInstrument(ReferenceBasis::x());
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t e = 0; e < 2; ++e) {
        const std::vector<ChoiChannel> maps{z.channel(a), x.channel(b), z.channel(e)};
        CHECK(std::abs(contract(c, oracle::sequence(c.times(), maps)) -
                       oracle::simulateChain(rho0, links, maps)) < 1e-11);
      }
}

TEST_CASE("restricting to every time is a no-op") {
  Rng rng(2);
  const Comb c = fromDilation(randomDilation(2, 2, 3, rng), defaultTimes(3));
  CHECK(maxAbsDiff(restrict(c, c.times()).choi(), c.choi()) < 1e-12);
}

TEST_CASE("restricted Stern-Gerlach comb gives one half") {
  const Comb outer = restrict(sternGerlachComb(), ts({"t1", "t3"}));
  const Instrument jz = projectiveInstrument(ReferenceBasis::z());
  const MapSequence maps{{"t1", jz.channel(0)}, {"t3", jz.channel(0)}};
  CHECK(contract(outer, maps) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("restricting a Markov comb composes its links") {
  Rng rng(41);
  const ComplexMatrix rho0 = randomDensityMatrix(2, rng);
  const ChoiChannel phi1 = randomChannel(2, 2, 2, rng);
  const ChoiChannel phi2 = randomChannel(2, 2, 2, rng);
  const Comb c = fromMarkovChain(rho0, {phi1, phi2});
  const Comb direct = fromMarkovChain(rho0, {compose(phi2, phi1)}, ts({"t1", "t3"}));
  CHECK(maxAbsDiff(restrict(c, ts({"t1", "t3"})).choi(), direct.choi()) < 1e-12);

  // Dropping the first time evolves the initial state instead.
  const Comb late = fromMarkovChain(applyChannel(phi1, rho0), {phi2}, ts({"t2", "t3"}));
  CHECK(maxAbsDiff(restrict(c, ts({"t2", "t3"})).choi(), late.choi()) < 1e-12);
}

TEST_CASE("restrict checks its subset") {
  const Comb sg = sternGerlachComb();
  CHECK_THROWS_AS(restrict(sg, ts({"t1", "t4"})), LookupError);
}

TEST_CASE("unequal slot dimensions need a generalized identity") {
  Rng rng(43);
  const ComplexMatrix rho0 = randomDensityMatrix(2, rng);
  const ComplexMatrix eta = randomDensityMatrix(2, rng);
  // t1 hands a 4-dimensional system to a link that maps it back to 2.
  const ChoiChannel link = randomChannel(4, 2, 3, rng);
  const Comb bare = fromMarkovChain(rho0, {link});
  REQUIRE(bare.slot("t1").dimOut == 4);
  CHECK_THROWS_AS(restrict(bare, ts({"t2"})), LookupError);
  CHECK_THROWS_AS(padWithIdentity({}, bare), LookupError);

  const ChoiChannel g = generalizedIdentity(2, 4, eta, {});
  const Comb c(bare.slots(), bare.choi(), {{"t1", g}});
  const Comb expect = fromMarkovChain(applyChannel(link, kron(rho0, eta)), {}, ts({"t2"}));
  CHECK(maxAbsDiff(restrict(c, ts({"t2"})).choi(), expect.choi()) < 1e-12);

  const Instrument z = projectiveInstrument(ReferenceBasis::z());
  const MapSequence only{{"t2", z.channel(1)}};
  CHECK(std::abs(contract(c, padWithIdentity(only, c)) -
                 contract(restrict(c, ts({"t2"})), only)) < 1e-11);

  CHECK_THROWS_AS(Comb(bare.slots(), bare.choi(), {{"t1", identityChannel(2)}}),
                  DimensionError);
}

TEST_CASE("padding with identities") {
  const std::vector<Slot> one{{"t1", 2, 2}};
  const MapSequence padded = padWithIdentity({}, ts({"t1"}), one);
  REQUIRE(padded.size() == 1);
  CHECK(padded.at("t1") == identityChannel(2));

  const Comb sg = sternGerlachComb();
  const Instrument jx = projectiveInstrument(ReferenceBasis::x());
  const MapSequence mid{{"t2", jx.channel(1)}};
  const MapSequence full = padWithIdentity(mid, sg);
  REQUIRE(full.size() == 3);
  CHECK(full.at("t1") == identityChannel(2));
  CHECK(full.at("t2") == jx.channel(1));
  CHECK(full.at("t3") == identityChannel(2));

  // Two subsets padding to the same full sequence agree.
  const MapSequence left{{"t1", identityChannel(2)}, {"t2", jx.channel(1)}};
  const MapSequence right{{"t2", jx.channel(1)}, {"t3", identityChannel(2)}};
  CHECK(padWithIdentity(left, sg) == padWithIdentity(right, sg));
  CHECK(contract(restrict(sg, ts({"t1", "t2"})), left) ==
        doctest::Approx(contract(restrict(sg, ts({"t2", "t3"})), right)).epsilon(1e-12));

  const MapSequence stray{{"t9", identityChannel(2)}};
  CHECK_THROWS_AS(padWithIdentity(stray, sg), LookupError);
}

TEST_CASE("a single-step dilation is the propagated state") {
  Rng rng(17);
  const ComplexMatrix u = randomUnitary(2, rng);
  const ComplexMatrix rho = randomDensityMatrix(2, rng);
  const Comb c = fromDilation(Dilation{2, 1, rho, {u}}, ts({"t1"}));
  const ComplexMatrix moved = oracle::naiveMatmul(oracle::naiveMatmul(u, rho), oracle::dagger(u));
  CHECK(maxAbsDiff(c.choi(), kron(ComplexMatrix::identity(2), moved)) < 1e-13);
}

TEST_CASE("dilation validation") {
  const ComplexMatrix rho = plusState();
  CHECK_THROWS_AS(fromDilation(Dilation{2, 1, rho, {ComplexMatrix::fromRows({{1, 1}, {0, 1}})}},
                               ts({"t1"})),
                  ValidationError);
  CHECK_THROWS_AS(fromDilation(Dilation{2, 1, rho, {ComplexMatrix::identity(2)}},
                               ts({"t1", "t2"})),
                  DimensionError);
  CHECK_THROWS_AS(fromDilation(Dilation{2, 2, rho, {ComplexMatrix::identity(4)}}, ts({"t1"})),
                  DimensionError);
}

TEST_CASE("random dilations agree with sequential simulation") {
  Rng rng(1234);
  for (int trial = 0; trial < 10; ++trial) {
    const Dilation d = randomDilation(2, 2, 3, rng);
    const Comb c = fromDilation(d, defaultTimes(3));
    for (int seq = 0; seq < 20; ++seq) {
      std::vector<ChoiChannel> maps;
      for (int k = 0; k < 3; ++k) {
        const Instrument inst = randomInstrument(2, 2, 2, rng);
        maps.push_back(inst.channel(rng.index(2)));
      }
      CHECK(std::abs(contract(c, oracle::sequence(c.times(), maps)) -
                     oracle::simulateDilation(d, maps)) < 1e-10);
    }
  }
}

TEST_CASE("zero links give the one-step comb") {
  Rng rng(3);
  const ComplexMatrix rho = randomDensityMatrix(3, rng);
  const Comb c = fromMarkovChain(rho, {});
  REQUIRE(c.times() == ts({"t1"}));
  CHECK(c.choi() == kron(ComplexMatrix::identity(3), rho));
}

TEST_CASE("identity links restrict to identity links") {
  Rng rng(5);
  const ComplexMatrix rho = randomDensityMatrix(2, rng);
  const std::vector<ChoiChannel> ids(3, identityChannel(2));
  const Comb c = fromMarkovChain(rho, ids);
  for (const TimeSet& sub : nonemptySubsets(c.times())) {
    const std::vector<ChoiChannel> shorter(sub.size() - 1, identityChannel(2));
    CHECK(maxAbsDiff(restrict(c, sub).choi(), fromMarkovChain(rho, shorter, sub).choi()) <
          1e-12);
  }
}

TEST_CASE("fully depolarizing links give uniform outcomes") {
  Rng rng(6);
  const std::size_t d = 3;
  const ComplexMatrix rho = randomDensityMatrix(d, rng);
  const Comb c = fromMarkovChain(rho, {depolarizing(d, 1.0), depolarizing(d, 1.0)});
  const Instrument z = projectiveInstrument(ReferenceBasis::computational(d));
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      for (std::size_t e = 0; e < d; ++e) {
        const MapSequence maps{{"t1", z.channel(a)}, {"t2", z.channel(b)}, {"t3", z.channel(e)}};
        CHECK(contract(c, maps) ==
              doctest::Approx(rho(a, a).real() / (d * d)).epsilon(1e-12));
      }
}

TEST_CASE("markov chain validation") {
  CHECK_THROWS_AS(fromMarkovChain(plusState(), {identityChannel(2)}, ts({"t1"})),
                  DimensionError);
  const Instrument z = projectiveInstrument(ReferenceBasis::z());
  CHECK_THROWS_AS(fromMarkovChain(plusState(), {z.channel(0)}), ValidationError);
}

TEST_CASE("causal order of dilation combs") {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t steps = 1 + rng.index(4);
    const Comb c = fromDilation(randomDilation(2, 2, steps, rng), defaultTimes(steps));
    const CausalOrderReport r = checkCausalOrder(c);
    CHECK(r.ok);
    CHECK(r.deviation < 1e-10);
  }
}

TEST_CASE("swapping slot storage breaks causal order") {
  const ComplexMatrix zero = ComplexMatrix::fromRows({{1, 0}, {0, 0}});
  const Comb c = fromMarkovChain(zero, {identityChannel(2)});
  REQUIRE(checkCausalOrder(c).ok);
  const std::vector<std::string> order{"t1.out", "t1.in", "t2.out", "t2.in"};
  const Comb swapped(c.slots(), permuteLegs(c.choi(), c.legs(), order));
  const CausalOrderReport r = checkCausalOrder(swapped);
  CHECK_FALSE(r.ok);
  CHECK(r.failedTime == "t2");

  // Operationally: the t2 intervention now changes the t1 statistics.
  const Instrument z = projectiveInstrument(ReferenceBasis::z());
  const ComplexMatrix one = ComplexMatrix::fromRows({{0, 0}, {0, 1}});
  const MapSequence a{{"t1", z.channel(0)}, {"t2", identityChannel(2)}};
  const MapSequence b{{"t1", z.channel(0)}, {"t2", replacementChannel(2, one)}};
  CHECK(contract(swapped, a) == doctest::Approx(1.0));
  CHECK(contract(swapped, b) == doctest::Approx(0.0));
}

TEST_CASE("a diagonal classical comb is causally ordered") {
  // 1 (x) diag(p(i2|i1)) (x) diag(p(i1)) written out by hand.
  const double p1[2] = {0.3, 0.7};
  const double t[2][2] = {{0.9, 0.1}, {0.4, 0.6}};  // t[from][to]
  ComplexMatrix choi(16, 16);
  for (std::size_t o2 = 0; o2 < 2; ++o2)
    for (std::size_t i2 = 0; i2 < 2; ++i2)
      for (std::size_t o1 = 0; o1 < 2; ++o1)
        for (std::size_t i1 = 0; i1 < 2; ++i1) {
          const std::size_t k = ((o2 * 2 + i2) * 2 + o1) * 2 + i1;
          choi(k, k) = (o1 == i1 ? 1.0 : 0.0) * p1[i1] * t[i1][i2];
        }
  // The t1 output is measured: only o1 == i1 survives, which is a valid
  // comb only once the link is written on (i2, o1).
  ComplexMatrix link(16, 16);
  for (std::size_t o2 = 0; o2 < 2; ++o2)
    for (std::size_t i2 = 0; i2 < 2; ++i2)
      for (std::size_t o1 = 0; o1 < 2; ++o1)
        for (std::size_t i1 = 0; i1 < 2; ++i1) {
          const std::size_t k = ((o2 * 2 + i2) * 2 + o1) * 2 + i1;
          link(k, k) = p1[i1] * t[o1][i2];
        }
  const std::vector<Slot> slots{{"t1", 2, 2}, {"t2", 2, 2}};
  CHECK(checkCausalOrder(Comb(slots, link)).ok);
  // Fixing o1 to i1 inside the comb is not a valid process.
  CHECK_FALSE(checkCausalOrder(Comb(slots, choi)).ok);
}

TEST_CASE("Born normalization over random instruments") {
  Rng rng(55);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t steps = 1 + rng.index(3);
    const Comb c = fromDilation(randomDilation(2, 2, steps, rng), defaultTimes(steps));
    std::vector<Instrument> inst;
    for (std::size_t k = 0; k < steps; ++k)
      inst.push_back(randomInstrument(2, 2 + rng.index(2), 2, rng));
    CHECK(std::abs(bornTotal(c, inst) - 1.0) < 1e-9);
  }
}

TEST_CASE("contract is linear in each slot") {
  Rng rng(66);
  for (int trial = 0; trial < 10; ++trial) {
    const Comb c = fromDilation(randomDilation(2, 2, 3, rng), defaultTimes(3));
    const ChoiChannel a = randomInstrument(2, 2, 2, rng).channel(0);
    const ChoiChannel b = randomInstrument(2, 2, 2, rng).channel(1);
    const double alpha = rng.uniform(0.0, 0.5), beta = rng.uniform(0.0, 0.5);
    const ChoiChannel rest = randomInstrument(2, 2, 2, rng).channel(0);
    for (const std::string t : {"t1", "t2", "t3"}) {
      MapSequence base{{"t1", rest}, {"t2", rest}, {"t3", rest}};
      MapSequence mix = base, withA = base, withB = base;
      mix.insert_or_assign(t, combine(alpha, a, beta, b));
      withA.insert_or_assign(t, a);
      withB.insert_or_assign(t, b);
      CHECK(std::abs(contract(c, mix) -
                     (alpha * contract(c, withA) + beta * contract(c, withB))) < 1e-11);
    }
  }
}

TEST_CASE("restriction is transitive") {
  Rng rng(77);
  for (int trial = 0; trial < 5; ++trial) {
    const Comb c = fromDilation(randomDilation(2, 2, 4, rng), defaultTimes(4));
    for (const TimeSet& mid : nonemptySubsets(c.times())) {
      const Comb once = restrict(c, mid);
      for (const TimeSet& low : nonemptySubsets(mid)) {
        CHECK(maxAbsDiff(restrict(once, low).choi(), restrict(c, low).choi()) < 1e-11);
      }
    }
  }
}

TEST_CASE("restriction agrees with identity padding") {
  Rng rng(88);
  const Comb c = fromDilation(randomDilation(2, 2, 3, rng), defaultTimes(3));
  for (const TimeSet& sub : nonemptySubsets(c.times())) {
    MapSequence maps;
    for (const auto& t : sub) maps.emplace(t, randomInstrument(2, 2, 2, rng).channel(0));
    CHECK(std::abs(contract(restrict(c, sub), maps) -
                   contract(c, padWithIdentity(maps, c))) < 1e-11);
  }
}
