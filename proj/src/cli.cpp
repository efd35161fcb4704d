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

#include "combkit/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fmt/format.h>
#include <fstream>
#include <optional>
#include <sstream>

#include "combkit/serialization.hpp"

namespace combkit::cli {

namespace {

// Raised for argument combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double x) { return fmt::format("{:.17g}", x); }

struct Options {
  std::string family;
  std::string comb;
  std::string dist;
  std::string maps;
  std::string subset;
  std::string basis;
  std::string outcome;
  std::string out;
  std::string emit;
  std::string format = "table";
  std::string scenario;
  double tol = kFamilyTol;
  std::uint64_t seed = 1;
  std::size_t steps = 3;
  std::size_t systemDim = 2;
  std::size_t envDim = 2;
};

std::vector<std::string> splitList(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

ReferenceBasis namedBasis(const std::string& name) {
  if (name == "z") return ReferenceBasis::z();
  if (name == "x") return ReferenceBasis::x();
  throw UsageError(fmt::format("unknown basis '{}'", name));
}

// "z", "x", a comma list naming one basis per time, or a JSON file.
BasisMap resolveBases(const std::string& arg, const TimeSet& times) {
  if (arg.empty()) throw UsageError("--basis is required");
  if (arg == "z" || arg == "x") return uniformBasis(times, namedBasis(arg));
  if (arg.find(',') != std::string::npos) {
    const auto names = splitList(arg);
    if (names.size() != times.size()) {
      throw UsageError(fmt::format("--basis lists {} bases for {} times",
                                   names.size(), times.size()));
    }
    BasisMap out;
    for (std::size_t k = 0; k < names.size(); ++k) {
      out.emplace(times.labels()[k], namedBasis(names[k]));
    }
    return out;
  }
  return basisMapFromJson(readJsonFile(arg), times);
}

void emitJson(const Options& o, const Json& j, std::ostream& out) {
  if (!o.out.empty()) {
    writeJsonFile(o.out, j);
  } else {
    out << j.dump(2) << '\n';
  }
}

void printReport(const Options& o, const std::string& title,
                 const ConsistencyReport& r, std::ostream& out) {
  if (o.format == "json") {
    out << toJson(r).dump(2) << '\n';
    return;
  }
  std::size_t w1 = 3;
  std::size_t w2 = 5;
  for (const auto& p : r.pairs) {
    w1 = std::max(w1, p.sub.str().size());
    w2 = std::max(w2, p.super.str().size());
  }
  out << title << '\n';
  out << fmt::format("{:<{}}  {:<{}}  {}\n", "sub", w1, "super", w2, "deviation");
  for (const auto& p : r.pairs) {
    out << fmt::format("{:<{}}  {:<{}}  {}\n", p.sub.str(), w1, p.super.str(),
                       w2, num(p.deviation));
  }
  if (r.witness) {
    out << fmt::format("witness: {} within {} at ({}): direct {} vs marginal {}\n",
                       r.witness->sub.str(), r.witness->super.str(),
                       fmt::join(r.witness->outcome, ","), num(r.witness->direct),
                       num(r.witness->marginal));
  }
  out << fmt::format("max deviation {}  tol {}  {}\n", num(r.maxDeviation()),
                     num(r.tol), r.pass ? "PASS" : "FAIL");
}

int reportExit(const ConsistencyReport& r) { return r.pass ? kOk : kCheckFailed; }

// --- verbs -------------------------------------------------------------

int runScenario(const Options& o, std::ostream& out) {
  ScenarioParams params;
  params.seed = o.seed;
  params.steps = o.steps;
  params.systemDim = o.systemDim;
  params.envDim = o.envDim;
  if (!o.basis.empty()) params.basis = namedBasis(o.basis);
  const Scenario s = buildScenario(o.scenario, params);
  const auto results = s.evaluate();
  const bool ok = std::all_of(results.begin(), results.end(),
                              [](const auto& r) { return r.pass; });

  if (!o.out.empty()) {
    std::string name = o.emit;
    if (name.empty()) {
      if (s.combFamilies.size() + s.distributionFamilies.size() != 1) {
        std::vector<std::string> names;
        for (const auto& [n, f] : s.combFamilies) names.push_back(n);
        for (const auto& [n, f] : s.distributionFamilies) names.push_back(n);
        throw UsageError(fmt::format(
            "scenario has several families; choose one with --emit ({})",
            fmt::join(names, ", ")));
      }
      name = s.combFamilies.empty() ? s.distributionFamilies.begin()->first
                                    : s.combFamilies.begin()->first;
    }
    if (auto c = s.combFamilies.find(name); c != s.combFamilies.end()) {
      writeJsonFile(o.out, toJson(c->second));
    } else if (auto d = s.distributionFamilies.find(name);
               d != s.distributionFamilies.end()) {
      writeJsonFile(o.out, toJson(d->second));
    } else {
      throw UsageError(fmt::format("scenario '{}' has no family '{}'", s.name, name));
    }
  }

  if (o.format == "json") {
    out << Json{{"scenario", s.name},
                {"description", s.description},
                {"expectations", toJson(results)},
                {"pass", ok}}
               .dump(2)
        << '\n';
  } else {
    std::size_t wq = 5;
    for (const auto& r : results) wq = std::max(wq, r.query.size());
    out << s.name << ": " << s.description << '\n';
    out << fmt::format("{:<{}}  {:<24}  {:<24}  {:<8}  {:<7}  {}\n", "query", wq,
                       "expected", "actual", "source", "tol", "status");
    for (const auto& r : results) {
      out << fmt::format("{:<{}}  {:<24}  {:<24}  {:<8}  {:<7}  {}\n", r.query,
                         wq, num(r.expected), num(r.actual),
                         toString(r.provenance), fmt::format("{:.0e}", r.tolerance),
                         r.pass ? "ok" : "MISMATCH");
    }
    out << (ok ? "all expectations met" : "expectations not met") << '\n';
  }
  return ok ? kOk : kCheckFailed;
}

int runContract(const Options& o, std::ostream& out) {
  if (o.comb.empty()) throw UsageError("--comb is required");
  const Comb comb = combFromJson(readJsonFile(o.comb));
  MapSequence maps;
  if (!o.maps.empty()) {
    maps = mapSequenceFromJson(readJsonFile(o.maps));
  } else {
    if (o.outcome.empty()) {
      throw UsageError("give --maps, or --basis with --outcome");
    }
    const BasisMap bases = resolveBases(o.basis, comb.times());
    const auto labels = splitList(o.outcome);
    if (labels.size() != comb.times().size()) {
      throw UsageError(fmt::format("--outcome needs {} labels",
                                   comb.times().size()));
    }
    for (std::size_t k = 0; k < labels.size(); ++k) {
      const std::string& t = comb.times().labels()[k];
      const Instrument inst = projectiveInstrument(bases.at(t));
      const auto& outs = inst.outcomes();
      const auto it = std::find_if(outs.begin(), outs.end(),
                                   [&](const auto& x) { return x.label == labels[k]; });
      if (it == outs.end()) {
        throw UsageError(fmt::format("no outcome '{}' at time '{}'", labels[k], t));
      }
      maps.emplace(t, it->channel);
    }
  }
  const MapSequence padded = padWithIdentity(maps, comb);
  const double p = contract(comb, padded);
  if (o.format == "json") {
    out << Json{{"probability", p}}.dump(2) << '\n';
  } else {
    out << num(p) << '\n';
  }
  return kOk;
}

int runRestrict(const Options& o, std::ostream& out) {
  if (o.comb.empty()) throw UsageError("--comb is required");
  if (o.subset.empty()) throw UsageError("--subset is required");
  const Comb comb = combFromJson(readJsonFile(o.comb));
  emitJson(o, toJson(restrict(comb, TimeSet::fromUnordered(splitList(o.subset)))),
           out);
  return kOk;
}

int runCheckGet(const Options& o, std::ostream& out) {
  if (o.family.empty()) throw UsageError("--family is required");
  const auto r = checkGET(combFamilyFromJson(readJsonFile(o.family)), o.tol);
  printReport(o, "GET consistency (restriction by identity insertion)", r, out);
  return reportExit(r);
}

int runCheckKet(const Options& o, std::ostream& out) {
  if (o.family.empty()) throw UsageError("--family is required");
  const auto r =
      checkKET(distributionFamilyFromJson(readJsonFile(o.family)), o.tol);
  printReport(o, "KET consistency (marginalization)", r, out);
  return reportExit(r);
}

int runClassical(const Options& o, std::ostream& out) {
  if (o.family.empty()) throw UsageError("--family is required");
  const CombFamily f = combFamilyFromJson(readJsonFile(o.family));
  const auto r = isClassical(f, resolveBases(o.basis, f.ground), o.tol);
  printReport(o, "classicality in the reference basis", r, out);
  return reportExit(r);
}

int runEmbed(const Options& o, std::ostream& out) {
  if (o.dist.empty()) throw UsageError("--dist is required");
  const Json j = readJsonFile(o.dist);
  if (j.is_object() && j.contains("members")) {
    const DistributionFamily f = distributionFamilyFromJson(j);
    std::map<TimeSet, Comb> members;
    for (const auto& [key, d] : f.members) members.emplace(key, classicalEmbed(d));
    emitJson(o, toJson(CombFamily(f.ground, std::move(members))), out);
  } else {
    emitJson(o, toJson(classicalEmbed(distributionFromJson(j))), out);
  }
  return kOk;
}

int runVerifyExtension(const Options& o, std::ostream& out) {
  if (o.comb.empty() || o.family.empty()) {
    throw UsageError("--comb and --family are required");
  }
  const Comb candidate = combFromJson(readJsonFile(o.comb));
  const CombFamily f = combFamilyFromJson(readJsonFile(o.family));
  const auto r = verifyExtension(candidate, f, o.tol);
  printReport(o, "extension check (candidate restricted to each member)", r, out);
  return reportExit(r);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"combkit: multi-time processes with interventions"};
  app.require_subcommand(1);
  Options o;

  auto tolOpt = [&](CLI::App* sub) {
    sub->add_option("--tol", o.tol, "comparison tolerance")
        ->check(CLI::PositiveNumber);
  };
  auto formatOpt = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"json", "table"}));
  };

  auto* scenario = app.add_subcommand("scenario", "build and evaluate a named scenario");
  scenario->add_option("name", o.scenario, "scenario name")->required();
  scenario->add_option("--seed", o.seed, "random seed");
  scenario->add_option("--steps", o.steps, "number of times")
      ->check(CLI::PositiveNumber);
  scenario->add_option("--sys-dim", o.systemDim, "system dimension")
      ->check(CLI::PositiveNumber);
  scenario->add_option("--env-dim", o.envDim, "environment dimension")
      ->check(CLI::PositiveNumber);
  scenario->add_option("--basis", o.basis, "reference basis (z|x)");
  scenario->add_option("--out", o.out, "write a family to this file");
  scenario->add_option("--emit", o.emit, "family to write with --out");
  formatOpt(scenario);

  auto* contractCmd = app.add_subcommand("contract", "probability of a map sequence");
  contractCmd->add_option("--comb", o.comb, "comb file");
  contractCmd->add_option("--maps", o.maps, "per-time maps file");
  contractCmd->add_option("--basis", o.basis, "z|x|z,x,...|file");
  contractCmd->add_option("--outcome", o.outcome, "outcome labels, ascending time");
  formatOpt(contractCmd);

  auto* restrictCmd = app.add_subcommand("restrict", "restrict a comb to fewer times");
  restrictCmd->add_option("--comb", o.comb, "comb file");
  restrictCmd->add_option("--subset", o.subset, "times to keep, e.g. t1,t3");
  restrictCmd->add_option("--out", o.out, "output file");

  auto* getCmd = app.add_subcommand("check-get", "consistency of a comb family");
  getCmd->add_option("--family", o.family, "comb family file");
  tolOpt(getCmd);
  formatOpt(getCmd);

  auto* ketCmd = app.add_subcommand("check-ket", "consistency of a distribution family");
  ketCmd->add_option("--family", o.family, "distribution family file");
  tolOpt(ketCmd);
  formatOpt(ketCmd);

  auto* classicalCmd = app.add_subcommand("classical", "classicality of a comb family");
  classicalCmd->add_option("--family", o.family, "comb family file");
  classicalCmd->add_option("--basis", o.basis, "z|x|z,x,...|file");
  tolOpt(classicalCmd);
  formatOpt(classicalCmd);

  auto* embedCmd = app.add_subcommand("embed", "classical comb(s) of distribution(s)");
  embedCmd->add_option("--dist", o.dist, "distribution or distribution family file");
  embedCmd->add_option("--out", o.out, "output file");

  auto* extCmd = app.add_subcommand("verify-extension",
                                    "check a candidate comb against a family");
  extCmd->add_option("--comb", o.comb, "candidate comb file");
  extCmd->add_option("--family", o.family, "comb family file");
  tolOpt(extCmd);
  formatOpt(extCmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }

  try {
    if (scenario->parsed()) return runScenario(o, out);
    if (contractCmd->parsed()) return runContract(o, out);
    if (restrictCmd->parsed()) return runRestrict(o, out);
    if (getCmd->parsed()) return runCheckGet(o, out);
    if (ketCmd->parsed()) return runCheckKet(o, out);
    if (classicalCmd->parsed()) return runClassical(o, out);
    if (embedCmd->parsed()) return runEmbed(o, out);
    if (extCmd->parsed()) return runVerifyExtension(o, out);
  } catch (const SchemaError& e) {
    err << "schema error at " << e.what() << '\n';
    return kUsageError;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace combkit::cli
