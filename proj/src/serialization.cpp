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

#include "combkit/serialization.hpp"

#include <fmt/format.h>
#include <fstream>
#include <sstream>

namespace combkit {

namespace {

std::string at(const std::string& path, const std::string& key) {
  return path + "/" + key;
}

std::string at(const std::string& path, std::size_t index) {
  return path + "/" + std::to_string(index);
}

const Json& field(const Json& j, const std::string& key,
                  const std::string& path) {
  if (!j.is_object()) throw SchemaError(path.empty() ? "/" : path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw SchemaError(at(path, key), "missing required field");
  return *it;
}

const Json& array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  return j;
}

std::size_t positive(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned() || j.get<std::uint64_t>() == 0) {
    throw SchemaError(path, "expected a positive integer");
  }
  return j.get<std::size_t>();
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  return j.get<double>();
}

std::string string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected a string");
  return j.get<std::string>();
}

std::vector<std::string> stringList(const Json& j, const std::string& path) {
  std::vector<std::string> out;
  const Json& a = array(j, path);
  for (std::size_t k = 0; k < a.size(); ++k) out.push_back(string(a[k], at(path, k)));
  return out;
}

Complex complexFromJson(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) {
    throw SchemaError(path, "expected [re, im]");
  }
  return {number(j[0], at(path, 0)), number(j[1], at(path, 1))};
}

Json complexToJson(Complex z) { return Json::array({z.real(), z.imag()}); }

// Runs a domain constructor, re-reporting its validation errors at `path`.
template <typename F>
auto validated(const std::string& path, F&& make) {
  try {
    return make();
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(path.empty() ? "/" : path, e.what());
  }
}

std::vector<Slot> slotsFromJson(const Json& j, const std::string& path) {
  std::vector<Slot> slots;
  const Json& a = array(j, path);
  for (std::size_t k = 0; k < a.size(); ++k) {
    const std::string p = at(path, k);
    slots.push_back({string(field(a[k], "time", p), at(p, "time")),
                     positive(field(a[k], "dim_in", p), at(p, "dim_in")),
                     positive(field(a[k], "dim_out", p), at(p, "dim_out"))});
  }
  return slots;
}

}  // namespace

Json toJson(const TimeSet& t) { return Json(t.labels()); }

TimeSet timeSetFromJson(const Json& j, const std::string& path) {
  auto labels = stringList(j, path);
  return validated(path, [&] { return TimeSet(std::move(labels)); });
}

// ---------------------------------------------------------------------------
// Matrices and channels

Json toJson(const ComplexMatrix& m) {
  Json data = Json::array();
  for (const auto& z : m.data()) data.push_back(complexToJson(z));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

ComplexMatrix matrixFromJson(const Json& j, const std::string& path) {
  const std::size_t rows = positive(field(j, "rows", path), at(path, "rows"));
  const std::size_t cols = positive(field(j, "cols", path), at(path, "cols"));
  const std::string dp = at(path, "data");
  const Json& data = array(field(j, "data", path), dp);
  if (rows > dimensionCap() / cols) {
    throw SchemaError(path, "matrix exceeds the dimension cap");
  }
  if (data.size() != rows * cols) {
    throw SchemaError(dp, fmt::format("expected {} entries, got {}",
                                      rows * cols, data.size()));
  }
  std::vector<Complex> values;
  values.reserve(data.size());
  for (std::size_t k = 0; k < data.size(); ++k) {
    values.push_back(complexFromJson(data[k], at(dp, k)));
  }
  return validated(path, [&] {
    return ComplexMatrix(rows, cols, std::move(values));
  });
}

Json toJson(const ChoiChannel& c) {
  return {{"dim_in", c.dimIn()},
          {"dim_out", c.dimOut()},
          {"label", c.label()},
          {"choi", toJson(c.choi())}};
}

ChoiChannel channelFromJson(const Json& j, const std::string& path) {
  const std::size_t dimIn = positive(field(j, "dim_in", path), at(path, "dim_in"));
  const std::size_t dimOut =
      positive(field(j, "dim_out", path), at(path, "dim_out"));
  std::string label;
  if (j.contains("label")) label = string(j["label"], at(path, "label"));
  ComplexMatrix choi = matrixFromJson(field(j, "choi", path), at(path, "choi"));
  return validated(path, [&] {
    return ChoiChannel(dimIn, dimOut, std::move(choi), std::move(label));
  });
}

Json toJson(const Instrument& instrument) {
  Json outcomes = Json::array();
  for (const auto& o : instrument.outcomes()) {
    outcomes.push_back({{"label", o.label}, {"channel", toJson(o.channel)}});
  }
  return {{"outcomes", std::move(outcomes)}};
}

Instrument instrumentFromJson(const Json& j, const std::string& path) {
  const std::string op = at(path, "outcomes");
  const Json& a = array(field(j, "outcomes", path), op);
  std::vector<InstrumentOutcome> outcomes;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const std::string p = at(op, k);
    outcomes.push_back(
        {string(field(a[k], "label", p), at(p, "label")),
         channelFromJson(field(a[k], "channel", p), at(p, "channel"))});
  }
  return validated(path, [&] { return Instrument(std::move(outcomes)); });
}

// ---------------------------------------------------------------------------
// Combs

Json toJson(const Comb& comb) {
  Json slots = Json::array();
  for (const auto& s : comb.slots()) {
    slots.push_back({{"time", s.time}, {"dim_in", s.dimIn}, {"dim_out", s.dimOut}});
  }
  Json j{{"leg_order", kLegOrder},
         {"times", toJson(comb.times())},
         {"slots", std::move(slots)},
         {"choi", toJson(comb.choi())}};
  if (!comb.generalizedIdentities().empty()) {
    Json g = Json::array();
    for (const auto& [time, channel] : comb.generalizedIdentities()) {
      g.push_back({{"time", time}, {"channel", toJson(channel)}});
    }
    j["generalized_identities"] = std::move(g);
  }
  return j;
}

Comb combFromJson(const Json& j, const std::string& path) {
  if (j.contains("leg_order") &&
      string(j["leg_order"], at(path, "leg_order")) != kLegOrder) {
    throw SchemaError(at(path, "leg_order"),
                      fmt::format("unsupported leg order; expected \"{}\"",
                                  kLegOrder));
  }
  const TimeSet times =
      timeSetFromJson(field(j, "times", path), at(path, "times"));
  std::vector<Slot> slots =
      slotsFromJson(field(j, "slots", path), at(path, "slots"));
  std::vector<std::string> slotTimes;
  for (const auto& s : slots) slotTimes.push_back(s.time);
  if (slotTimes != times.labels()) {
    throw SchemaError(at(path, "slots"),
                      "slots must list the times in the same ascending order");
  }
  ComplexMatrix choi = matrixFromJson(field(j, "choi", path), at(path, "choi"));
  std::map<std::string, ChoiChannel, TimeLess> generalized;
  if (j.contains("generalized_identities")) {
    const std::string gp = at(path, "generalized_identities");
    const Json& a = array(j["generalized_identities"], gp);
    for (std::size_t k = 0; k < a.size(); ++k) {
      const std::string p = at(gp, k);
      generalized.emplace(
          string(field(a[k], "time", p), at(p, "time")),
          channelFromJson(field(a[k], "channel", p), at(p, "channel")));
    }
  }
  return validated(path, [&] {
    return Comb(std::move(slots), std::move(choi), std::move(generalized));
  });
}

Json toJson(const Dilation& d) {
  Json us = Json::array();
  for (const auto& u : d.unitaries) us.push_back(toJson(u));
  return {{"system_dim", d.systemDim},
          {"env_dim", d.envDim},
          {"initial_state", toJson(d.initialState)},
          {"unitaries", std::move(us)}};
}

Dilation dilationFromJson(const Json& j, const std::string& path) {
  Dilation d{positive(field(j, "system_dim", path), at(path, "system_dim")),
             positive(field(j, "env_dim", path), at(path, "env_dim")),
             matrixFromJson(field(j, "initial_state", path),
                            at(path, "initial_state")),
             {}};
  const std::string up = at(path, "unitaries");
  const Json& a = array(field(j, "unitaries", path), up);
  for (std::size_t k = 0; k < a.size(); ++k) {
    d.unitaries.push_back(matrixFromJson(a[k], at(up, k)));
  }
  validated(path, [&] {
    validateDilation(d);
    return 0;
  });
  return d;
}

// ---------------------------------------------------------------------------
// Distributions and families

Json toJson(const JointDistribution& d) {
  Json probs = Json::array();
  for (std::size_t flat = 0; flat < d.probs().size(); ++flat) {
    const auto idx = d.outcomeAt(flat);
    Json outcome = Json::array();
    for (std::size_t j = 0; j < idx.size(); ++j) {
      outcome.push_back(d.alphabets()[j][idx[j]]);
    }
    probs.push_back({{"outcome", std::move(outcome)}, {"p", d.probs()[flat]}});
  }
  return {{"times", toJson(d.times())},
          {"alphabets", d.alphabets()},
          {"probs", std::move(probs)}};
}

JointDistribution distributionFromJson(const Json& j, const std::string& path) {
  TimeSet times = timeSetFromJson(field(j, "times", path), at(path, "times"));
  const std::string ap = at(path, "alphabets");
  const Json& a = array(field(j, "alphabets", path), ap);
  std::vector<std::vector<std::string>> alphabets;
  for (std::size_t k = 0; k < a.size(); ++k) {
    alphabets.push_back(stringList(a[k], at(ap, k)));
  }
  if (alphabets.size() != times.size()) {
    throw SchemaError(ap, "expected one alphabet per time");
  }
  std::size_t total = 1;
  for (const auto& al : alphabets) {
    if (al.empty()) throw SchemaError(ap, "alphabets must be nonempty");
    total *= al.size();
  }
  std::vector<double> probs(total, 0.0);
  std::vector<bool> seen(total, false);
  const std::string pp = at(path, "probs");
  const Json& entries = array(field(j, "probs", path), pp);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const std::string p = at(pp, k);
    const auto outcome = stringList(field(entries[k], "outcome", p), at(p, "outcome"));
    if (outcome.size() != alphabets.size()) {
      throw SchemaError(at(p, "outcome"), "outcome length does not match times");
    }
    std::size_t idx = 0;
    for (std::size_t t = 0; t < outcome.size(); ++t) {
      const auto& al = alphabets[t];
      const auto it = std::find(al.begin(), al.end(), outcome[t]);
      if (it == al.end()) {
        throw SchemaError(at(at(p, "outcome"), t),
                          fmt::format("'{}' is not in the alphabet", outcome[t]));
      }
      idx = idx * al.size() + static_cast<std::size_t>(it - al.begin());
    }
    if (seen[idx]) throw SchemaError(p, "duplicate outcome");
    seen[idx] = true;
    probs[idx] = number(field(entries[k], "p", p), at(p, "p"));
  }
  return validated(path, [&] {
    return JointDistribution(std::move(times), std::move(alphabets),
                             std::move(probs));
  });
}

namespace {

template <typename FamilyT>
Json familyToJson(const char* kind, const FamilyT& f) {
  Json members = Json::array();
  for (const auto& [key, member] : f.members) {
    members.push_back({{"times", toJson(key)}, {"payload", toJson(member)}});
  }
  return {{"kind", kind},
          {"ground_times", toJson(f.ground)},
          {"members", std::move(members)}};
}

template <typename Member, typename Parse>
std::pair<TimeSet, std::map<TimeSet, Member>> familyFromJson(
    const Json& j, const std::string& path, const char* kind, Parse parse) {
  if (j.contains("kind") && string(j["kind"], at(path, "kind")) != kind) {
    throw SchemaError(at(path, "kind"), fmt::format("expected \"{}\"", kind));
  }
  TimeSet ground =
      timeSetFromJson(field(j, "ground_times", path), at(path, "ground_times"));
  const std::string mp = at(path, "members");
  const Json& a = array(field(j, "members", path), mp);
  std::map<TimeSet, Member> members;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const std::string p = at(mp, k);
    TimeSet key = timeSetFromJson(field(a[k], "times", p), at(p, "times"));
    Member m = parse(field(a[k], "payload", p), at(p, "payload"));
    if (!(m.times() == key)) {
      throw SchemaError(at(p, "payload"), "payload times differ from member times");
    }
    if (!members.emplace(key, std::move(m)).second) {
      throw SchemaError(at(p, "times"), "duplicate member");
    }
  }
  return {std::move(ground), std::move(members)};
}

}  // namespace

Json toJson(const DistributionFamily& f) {
  return familyToJson("distribution_family", f);
}

Json toJson(const CombFamily& f) { return familyToJson("comb_family", f); }

DistributionFamily distributionFamilyFromJson(const Json& j,
                                              const std::string& path) {
  auto [ground, members] = familyFromJson<JointDistribution>(
      j, path, "distribution_family",
      [](const Json& x, const std::string& p) { return distributionFromJson(x, p); });
  return validated(path, [&] {
    return DistributionFamily(std::move(ground), std::move(members));
  });
}

CombFamily combFamilyFromJson(const Json& j, const std::string& path) {
  auto [ground, members] = familyFromJson<Comb>(
      j, path, "comb_family",
      [](const Json& x, const std::string& p) { return combFromJson(x, p); });
  return validated(path, [&] {
    return CombFamily(std::move(ground), std::move(members));
  });
}

// ---------------------------------------------------------------------------
// Bases and map sequences

Json toJson(const ReferenceBasis& b) {
  Json vectors = Json::array();
  for (const auto& v : b.vectors) {
    Json vec = Json::array();
    for (const auto& z : v) vec.push_back(complexToJson(z));
    vectors.push_back(std::move(vec));
  }
  return {{"labels", b.labels}, {"vectors", std::move(vectors)}};
}

ReferenceBasis basisFromJson(const Json& j, const std::string& path) {
  ReferenceBasis b;
  b.labels = stringList(field(j, "labels", path), at(path, "labels"));
  const std::string vp = at(path, "vectors");
  const Json& vs = array(field(j, "vectors", path), vp);
  for (std::size_t k = 0; k < vs.size(); ++k) {
    const std::string p = at(vp, k);
    const Json& v = array(vs[k], p);
    std::vector<Complex> vec;
    for (std::size_t i = 0; i < v.size(); ++i) {
      vec.push_back(complexFromJson(v[i], at(p, i)));
    }
    b.vectors.push_back(std::move(vec));
  }
  validated(path, [&] {
    validateBasis(b);
    return 0;
  });
  return b;
}

BasisMap basisMapFromJson(const Json& j, const TimeSet& times,
                          const std::string& path) {
  if (j.is_object() && j.contains("vectors")) {
    return uniformBasis(times, basisFromJson(j, path));
  }
  if (!j.is_object()) throw SchemaError(path.empty() ? "/" : path, "expected an object");
  BasisMap out;
  for (const auto& t : times) {
    out.emplace(t, basisFromJson(field(j, t, path), at(path, t)));
  }
  return out;
}

Json toJson(const MapSequence& maps) {
  Json a = Json::array();
  for (const auto& [time, channel] : maps) {
    a.push_back({{"time", time}, {"channel", toJson(channel)}});
  }
  return {{"maps", std::move(a)}};
}

MapSequence mapSequenceFromJson(const Json& j, const std::string& path) {
  const std::string mp = at(path, "maps");
  const Json& a = array(field(j, "maps", path), mp);
  MapSequence maps;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const std::string p = at(mp, k);
    const std::string time = string(field(a[k], "time", p), at(p, "time"));
    if (!maps.emplace(time, channelFromJson(field(a[k], "channel", p),
                                            at(p, "channel")))
             .second) {
      throw SchemaError(at(p, "time"), "duplicate time");
    }
  }
  return maps;
}

// ---------------------------------------------------------------------------
// Reports

Json toJson(const ConsistencyReport& r) {
  Json pairs = Json::array();
  for (const auto& p : r.pairs) {
    pairs.push_back({{"sub", toJson(p.sub)},
                     {"super", toJson(p.super)},
                     {"deviation", p.deviation}});
  }
  Json j{{"pairs", std::move(pairs)}, {"pass", r.pass}, {"tol", r.tol}};
  if (r.witness) {
    j["witness"] = {{"sub", toJson(r.witness->sub)},
                    {"super", toJson(r.witness->super)},
                    {"outcome", r.witness->outcome},
                    {"direct", r.witness->direct},
                    {"marginal", r.witness->marginal}};
  }
  return j;
}

Json toJson(const CausalOrderReport& r) {
  return {{"pass", r.ok},
          {"failed_time", r.failedTime},
          {"deviation", r.deviation}};
}

Json toJson(const std::vector<ExpectationResult>& results) {
  Json a = Json::array();
  for (const auto& r : results) {
    Json e{{"query", r.query},
           {"expected", r.expected},
           {"actual", r.actual},
           {"provenance", toString(r.provenance)},
           {"tolerance", r.tolerance},
           {"pass", r.pass}};
    if (!r.oracle.empty()) e["oracle"] = r.oracle;
    a.push_back(std::move(e));
  }
  return a;
}

Json readJsonFile(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw Error(fmt::format("cannot open '{}'", file));
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const Json::parse_error& e) {
    throw SchemaError("/", fmt::format("malformed JSON in '{}': {}", file, e.what()));
  }
}

void writeJsonFile(const std::string& file, const Json& j) {
  std::ofstream out(file);
  if (!out) throw Error(fmt::format("cannot write '{}'", file));
  out << j.dump(2) << '\n';
  if (!out) throw Error(fmt::format("failed writing '{}'", file));
}

}  // namespace combkit
