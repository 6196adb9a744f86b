// Copyright 2026 The allocdp Authors
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

#include "allocdp/cli.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "allocdp/accountant.h"
#include "allocdp/core_dp.h"
#include "allocdp/mc_oracle.h"
#include "allocdp/parallel.h"
#include "allocdp/utility_sim.h"
#include "json.hpp"

namespace allocdp {
namespace {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Flag holders.

struct SpecFlags {
  std::string scheme = "allocation";
  double sigma = 1.0;
  int64_t t = 1;
  int64_t k = 1;
  int64_t epochs = 1;
  double lambda = 0.0;
  CLI::Option* lambda_option = nullptr;
  std::string direction = "both";
  std::vector<std::string> methods;
  int max_alpha = kDefaultMaxAlpha;
};

struct QueryFlags {
  SpecFlags spec;
  double delta = 0.0;
  double epsilon = 0.0;
};

struct SweepFlags {
  SpecFlags spec;
  std::string vary;
  std::vector<double> values;
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
  std::string spacing = "linear";
  std::string solve_for = "epsilon";
  double delta = 0.0;
  double epsilon = 0.0;
  std::string out;
  int threads = 0;
};

struct McFlags {
  double sigma = 1.0;
  int64_t t = 1;
  double epsilon = 1.0;
  std::string direction = "both";
  int64_t n = 1000000;
  uint64_t seed = 0;
  double confidence = 0.99;
  int threads = 0;
};

struct UtilityFlags {
  double p = 0.9;
  int64_t t = 1000;
  double sigma = 1.0;
  std::vector<int64_t> n_values = {100, 1000, 10000};
  std::vector<std::string> schemes = {"allocation", "poisson"};
  int64_t trials = 10000;
  uint64_t seed = 0;
  int64_t dim = 1;
  double calibrate_epsilon = 0.0;
  double calibrate_delta = 1e-6;
  std::string out;
  int threads = 0;
};

// A failed command: exit code plus message for stderr.
struct Failure {
  int code;
  std::string message;
};

Failure FromStatus(const absl::Status& status) {
  const int code = status.code() == absl::StatusCode::kInvalidArgument
                       ? kExitUsage
                       : kExitInfeasible;
  return Failure{code, std::string(status.message())};
}

void AddSpecOptions(CLI::App* app, SpecFlags& f) {
  app->add_option("--scheme", f.scheme, "local | poisson | allocation")
      ->check(CLI::IsMember({"local", "poisson", "allocation"}));
  app->add_option("--sigma", f.sigma, "noise multiplier")->required();
  app->add_option("--t", f.t, "number of steps")->required();
  app->add_option("--k", f.k, "participations per element");
  app->add_option("--epochs", f.epochs, "number of epochs");
  f.lambda_option =
      app->add_option("--lambda", f.lambda, "Poisson rate (default k/t)");
  app->add_option("--direction", f.direction, "remove | add | both")
      ->check(CLI::IsMember({"remove", "add", "both"}));
  app->add_option("--methods", f.methods,
                  "allocation methods (comma separated, default all)")
      ->delimiter(',');
  app->add_option("--max-alpha", f.max_alpha, "largest RDP order");
}

absl::StatusOr<SchemeSpec> ToSpec(const SpecFlags& f) {
  SchemeSpec spec;
  absl::StatusOr<Scheme> scheme = ParseScheme(f.scheme);
  if (!scheme.ok()) return scheme.status();
  absl::StatusOr<Direction> direction = ParseDirection(f.direction);
  if (!direction.ok()) return direction.status();
  spec.scheme = *scheme;
  spec.direction = *direction;
  spec.sigma = f.sigma;
  spec.t = f.t;
  spec.k = f.k;
  spec.epochs = f.epochs;
  spec.max_alpha = f.max_alpha;
  if (f.lambda_option != nullptr && f.lambda_option->count() > 0) {
    spec.lambda = f.lambda;
  }
  for (const std::string& name : f.methods) {
    absl::StatusOr<Method> m = ParseMethod(name);
    if (!m.ok()) return m.status();
    spec.methods.push_back(*m);
  }
  if (absl::Status s = ValidateSchemeSpec(spec); !s.ok()) return s;
  return spec;
}

// ---------------------------------------------------------------------------
// JSON helpers.

Json Number(const std::optional<double>& v) {
  if (!v.has_value() || !std::isfinite(*v)) return nullptr;
  return *v;
}

Json MethodJson(const std::optional<Method>& m) {
  if (!m.has_value()) return nullptr;
  return std::string(MethodName(*m));
}

Json SpecJson(const SchemeSpec& spec) {
  Json j;
  j["scheme"] = std::string(SchemeName(spec.scheme));
  j["sigma"] = spec.sigma;
  j["t"] = spec.t;
  j["k"] = spec.k;
  j["epochs"] = spec.epochs;
  j["lambda"] = Number(spec.lambda);
  j["direction"] = std::string(DirectionName(spec.direction));
  Json methods = Json::array();
  if (spec.scheme == Scheme::kAllocation) {
    if (spec.methods.empty()) {
      for (Method m : kAllMethods) methods.push_back(std::string(MethodName(m)));
    } else {
      for (Method m : spec.methods) {
        methods.push_back(std::string(MethodName(m)));
      }
    }
  }
  j["methods"] = methods;
  j["max_alpha"] = spec.max_alpha;
  return j;
}

Json ResultJson(const BoundResult& r) {
  Json j;
  j["solved_for"] = r.solved_for_epsilon ? "epsilon" : "delta";
  j["value"] = r.value;
  j["remove"] = Number(r.remove);
  j["add"] = Number(r.add);
  j["winning_method"] = MethodJson(r.winning_method);
  j["remove_winner"] = MethodJson(r.remove_winner);
  j["add_winner"] = MethodJson(r.add_winner);
  j["baseline_poisson"] = Number(r.baseline_poisson);
  j["baseline_local"] = Number(r.baseline_local);
  Json methods = Json::object();
  for (const MethodOutcome& o : r.methods) {
    Json m;
    m["remove"] = Number(o.remove);
    m["add"] = Number(o.add);
    m["error"] = o.error.empty() ? Json(nullptr) : Json(o.error);
    m["flags"] = o.flags;
    methods[std::string(MethodName(o.method))] = m;
  }
  j["methods"] = methods;
  j["diagnostics"] = r.diagnostics;
  return j;
}

std::string FormatDouble(double v) { return absl::StrFormat("%.17g", v); }

std::string Cell(const std::optional<double>& v) {
  return v.has_value() && std::isfinite(*v) ? FormatDouble(*v) : "";
}

// ---------------------------------------------------------------------------
// epsilon / delta.

std::optional<Failure> RunQuery(bool solve_epsilon, const QueryFlags& f,
                                std::ostream& out) {
  absl::StatusOr<SchemeSpec> spec = ToSpec(f.spec);
  if (!spec.ok()) return FromStatus(spec.status());
  absl::StatusOr<BoundResult> result;
  if (solve_epsilon) {
    absl::StatusOr<Delta> delta = Delta::FromValue(f.delta);
    if (!delta.ok()) return FromStatus(delta.status());
    result = ComputeEpsilon(*spec, *delta);
  } else {
    result = ComputeDelta(*spec, f.epsilon);
  }
  if (!result.ok()) return FromStatus(result.status());
  Json j;
  j["command"] = solve_epsilon ? "epsilon" : "delta";
  Json inputs = SpecJson(*spec);
  if (solve_epsilon) {
    inputs["delta"] = f.delta;
  } else {
    inputs["epsilon"] = f.epsilon;
  }
  j["inputs"] = inputs;
  j["result"] = ResultJson(*result);
  out << j.dump(2) << "\n";
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// sweep.

absl::StatusOr<std::vector<double>> SweepValues(const SweepFlags& f) {
  std::vector<double> values = f.values;
  if (values.empty()) {
    if (f.count < 1) {
      return absl::InvalidArgumentError(
          "sweep needs --values or --start/--stop/--count");
    }
    if (f.spacing != "linear" && f.spacing != "log") {
      return absl::InvalidArgumentError("--spacing must be linear or log");
    }
    if (f.spacing == "log" && !(f.start > 0 && f.stop > 0)) {
      return absl::InvalidArgumentError("log spacing needs positive bounds");
    }
    for (int i = 0; i < f.count; ++i) {
      const double u = f.count == 1 ? 0.0 : static_cast<double>(i) / (f.count - 1);
      values.push_back(
          f.spacing == "linear"
              ? f.start + u * (f.stop - f.start)
              : std::exp(std::log(f.start) +
                         u * (std::log(f.stop) - std::log(f.start))));
    }
  }
  if (values.size() > 1) {
    const bool up = values[1] > values[0];
    for (size_t i = 1; i < values.size(); ++i) {
      if (up ? !(values[i] > values[i - 1]) : !(values[i] < values[i - 1])) {
        return absl::InvalidArgumentError("sweep values must be strictly monotone");
      }
    }
  }
  const bool integral = f.vary == "t" || f.vary == "k" || f.vary == "epochs";
  for (double& v : values) {
    if (integral) {
      if (std::abs(v - std::round(v)) > 1e-9 * std::max(1.0, std::abs(v))) {
        return absl::InvalidArgumentError(
            absl::StrFormat("--vary %s needs integer values, got %g", f.vary, v));
      }
      v = std::round(v);
    }
  }
  return values;
}

struct SweepPoint {
  absl::StatusOr<BoundResult> result = absl::UnknownError("not evaluated");
};

std::optional<Failure> RunSweep(const SweepFlags& f, std::ostream& out,
                                std::ostream& err) {
  absl::StatusOr<SchemeSpec> base = ToSpec(f.spec);
  if (!base.ok()) return FromStatus(base.status());
  bool solve_epsilon = f.solve_for == "epsilon";
  if (f.vary == "delta") solve_epsilon = true;
  if (f.vary == "epsilon") solve_epsilon = false;
  absl::StatusOr<std::vector<double>> values = SweepValues(f);
  if (!values.ok()) return FromStatus(values.status());

  std::vector<SweepPoint> points(values->size());
  ParallelFor(static_cast<int64_t>(values->size()), f.threads, [&](int64_t i) {
    SchemeSpec spec = *base;
    double delta = f.delta;
    double epsilon = f.epsilon;
    const double v = (*values)[i];
    if (f.vary == "sigma") spec.sigma = v;
    if (f.vary == "t") spec.t = static_cast<int64_t>(v);
    if (f.vary == "k") spec.k = static_cast<int64_t>(v);
    if (f.vary == "epochs") spec.epochs = static_cast<int64_t>(v);
    if (f.vary == "delta") delta = v;
    if (f.vary == "epsilon") epsilon = v;
    if (solve_epsilon) {
      absl::StatusOr<Delta> d = Delta::FromValue(delta);
      points[i].result = d.ok() ? ComputeEpsilon(spec, *d)
                                : absl::StatusOr<BoundResult>(d.status());
    } else {
      points[i].result = ComputeDelta(spec, epsilon);
    }
  });
  for (const SweepPoint& p : points) {
    if (!p.result.ok() &&
        p.result.status().code() == absl::StatusCode::kInvalidArgument) {
      return FromStatus(p.result.status());
    }
  }

  std::ostringstream csv;
  csv << kSweepCsvHeader << "\n";
  std::vector<Direction> sides;
  if (base->direction != Direction::kAdd) sides.push_back(Direction::kRemove);
  if (base->direction != Direction::kRemove) sides.push_back(Direction::kAdd);
  if (base->direction == Direction::kBoth) sides.push_back(Direction::kBoth);
  for (size_t i = 0; i < points.size(); ++i) {
    for (Direction side : sides) {
      auto pick = [side](const std::optional<double>& remove,
                         const std::optional<double>& add)
          -> std::optional<double> {
        if (side == Direction::kRemove) return remove;
        if (side == Direction::kAdd) return add;
        if (!remove || !add) return std::nullopt;
        return std::max(*remove, *add);
      };
      std::vector<std::string> cells = {f.vary, FormatDouble((*values)[i]),
                                        std::string(DirectionName(side))};
      const absl::StatusOr<BoundResult>& r = points[i].result;
      std::vector<std::string> diag;
      if (!r.ok()) {
        for (int c = 0; c < 8; ++c) cells.push_back("");
        diag.push_back("no_bound");
      } else {
        cells.push_back(Cell(pick(r->remove, r->add)));
        for (Method m : kAllMethods) {
          std::optional<double> v;
          for (const MethodOutcome& o : r->methods) {
            if (o.method != m) continue;
            v = pick(o.remove, o.add);
            for (const std::string& flag : o.flags) {
              diag.push_back(absl::StrFormat("%s:%s", std::string(MethodName(m)), flag));
            }
            if (!o.remove && !o.add) {
              diag.push_back(absl::StrFormat("%s:infeasible", std::string(MethodName(m))));
            }
          }
          cells.push_back(Cell(v));
        }
        std::optional<double> poisson = r->baseline_poisson;
        if (r->baseline_poisson_remove || r->baseline_poisson_add) {
          poisson = pick(r->baseline_poisson_remove, r->baseline_poisson_add);
        }
        cells.push_back(Cell(poisson));
        cells.push_back(Cell(r->baseline_local));
        for (const std::string& d : r->diagnostics) diag.push_back(d);
      }
      std::string diag_cell = absl::StrJoin(diag, "|");
      std::replace(diag_cell.begin(), diag_cell.end(), ',', ';');
      cells.push_back(diag_cell);
      csv << absl::StrJoin(cells, ",") << "\n";
    }
  }
  if (f.out.empty()) {
    out << csv.str();
    return std::nullopt;
  }
  std::ofstream file(f.out, std::ios::binary | std::ios::trunc);
  file << csv.str();
  file.close();
  if (!file) {
    return Failure{kExitIo, absl::StrFormat("cannot write '%s'", f.out)};
  }
  err << "wrote " << points.size() << " sweep points to " << f.out << "\n";
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// mc.

Json EstimateJson(const McEstimate& e) {
  Json j;
  j["estimate"] = e.estimate;
  j["ci_low"] = e.ci_low;
  j["ci_high"] = e.ci_high;
  j["n_samples"] = e.n_samples;
  j["confidence"] = e.confidence;
  j["seed"] = e.seed;
  return j;
}

std::optional<Failure> RunMc(const McFlags& f, std::ostream& out) {
  absl::StatusOr<Direction> direction = ParseDirection(f.direction);
  if (!direction.ok()) return FromStatus(direction.status());
  McOptions options{f.n, f.seed, f.confidence, f.threads};
  Json estimates = Json::object();
  if (*direction != Direction::kAdd) {
    absl::StatusOr<McEstimate> e = McDeltaRemove(f.sigma, f.t, f.epsilon, options);
    if (!e.ok()) return FromStatus(e.status());
    estimates["remove"] = EstimateJson(*e);
  }
  if (*direction != Direction::kRemove) {
    absl::StatusOr<McEstimate> e = McDeltaAdd(f.sigma, f.t, f.epsilon, options);
    if (!e.ok()) return FromStatus(e.status());
    estimates["add"] = EstimateJson(*e);
  }
  Json j;
  j["command"] = "mc";
  j["inputs"] = Json{{"sigma", f.sigma},
                     {"t", f.t},
                     {"epsilon", f.epsilon},
                     {"direction", f.direction},
                     {"n", f.n},
                     {"seed", f.seed},
                     {"confidence", f.confidence}};
  j["half_width"] = HoeffdingHalfWidth(f.n, f.confidence);
  j["estimates"] = estimates;
  if (f.t == 1) {
    absl::StatusOr<Delta> exact = GaussianDelta(f.sigma, f.epsilon);
    if (!exact.ok()) return FromStatus(exact.status());
    j["reference_closed_form"] = exact->value();
  }
  out << j.dump(2) << "\n";
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// utility.

std::optional<Failure> RunUtility(const UtilityFlags& f, std::ostream& out,
                                  std::ostream& err) {
  std::ostringstream csv;
  csv << kUtilityCsvHeader << "\n";
  for (const std::string& name : f.schemes) {
    absl::StatusOr<UtilityScheme> scheme = ParseUtilityScheme(name);
    if (!scheme.ok()) return FromStatus(scheme.status());
    double sigma = f.sigma;
    if (f.calibrate_epsilon > 0) {
      SchemeSpec spec;
      spec.scheme = *scheme == UtilityScheme::kAllocation ? Scheme::kAllocation
                                                          : Scheme::kPoisson;
      spec.t = f.t;
      absl::StatusOr<Delta> delta = Delta::FromValue(f.calibrate_delta);
      if (!delta.ok()) return FromStatus(delta.status());
      absl::StatusOr<double> s = CalibrateSigma(spec, f.calibrate_epsilon, *delta);
      if (!s.ok()) return FromStatus(s.status());
      sigma = *s;
      err << absl::StrFormat("calibrated sigma for %s: %.17g\n", name, sigma);
    }
    for (int64_t n : f.n_values) {
      UtilityConfig config{*scheme, f.p,      n,      f.t,
                           sigma,   f.trials, f.seed, f.dim};
      absl::StatusOr<AnalyticMse> analytic = ComputeAnalyticMse(config);
      if (!analytic.ok()) return FromStatus(analytic.status());
      absl::StatusOr<SimulatedMse> sim = SimulateMse(config, f.threads);
      if (!sim.ok()) return FromStatus(sim.status());
      csv << absl::StrJoin(
                 {absl::StrCat(n), name, FormatDouble(analytic->mse),
                  FormatDouble(sim->empirical_mse),
                  FormatDouble(sim->std_error)},
                 ",")
          << "\n";
    }
  }
  if (f.out.empty()) {
    out << csv.str();
    return std::nullopt;
  }
  std::ofstream file(f.out, std::ios::binary | std::ios::trunc);
  file << csv.str();
  file.close();
  if (!file) {
    return Failure{kExitIo, absl::StrFormat("cannot write '%s'", f.out)};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// --config support: key=value lines become "--key value" tokens placed right
// after the subcommand, so later command-line flags take precedence.

absl::StatusOr<std::vector<std::string>> ConfigTokens(const std::string& path) {
  std::ifstream file(path);
  if (!file) {
    return absl::NotFoundError(absl::StrFormat("cannot read config '%s'", path));
  }
  std::vector<std::string> tokens;
  std::string line;
  int line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    const std::string text(absl::StripAsciiWhitespace(line));
    if (text.empty() || text.front() == '#') continue;
    const size_t eq = text.find('=');
    if (eq == std::string::npos) {
      return absl::InvalidArgumentError(
          absl::StrFormat("%s:%d: expected key=value", path, line_no));
    }
    const std::string key(absl::StripAsciiWhitespace(text.substr(0, eq)));
    const std::string value(absl::StripAsciiWhitespace(text.substr(eq + 1)));
    if (key.empty() || key == "config") {
      return absl::InvalidArgumentError(
          absl::StrFormat("%s:%d: invalid key '%s'", path, line_no, key));
    }
    tokens.push_back("--" + key);
    tokens.push_back(value);
  }
  return tokens;
}

std::optional<std::string> FindConfigPath(const std::vector<std::string>& args) {
  std::optional<std::string> path;
  for (size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  return path;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Privacy accounting for random allocation", "allocdp"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string config_path;

  QueryFlags eps_flags;
  CLI::App* eps_cmd = app.add_subcommand("epsilon", "solve for epsilon at a delta");
  AddSpecOptions(eps_cmd, eps_flags.spec);
  eps_cmd->add_option("--delta", eps_flags.delta, "target delta")->required();

  QueryFlags delta_flags;
  CLI::App* delta_cmd = app.add_subcommand("delta", "solve for delta at an epsilon");
  AddSpecOptions(delta_cmd, delta_flags.spec);
  delta_cmd->add_option("--epsilon", delta_flags.epsilon, "target epsilon")
      ->required();

  SweepFlags sweep_flags;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "sweep one parameter (CSV)");
  AddSpecOptions(sweep_cmd, sweep_flags.spec);
  sweep_cmd->add_option("--vary", sweep_flags.vary, "parameter to sweep")
      ->required()
      ->check(CLI::IsMember({"sigma", "t", "k", "epochs", "epsilon", "delta"}));
  sweep_cmd->add_option("--values", sweep_flags.values, "explicit values")
      ->delimiter(',');
  sweep_cmd->add_option("--start", sweep_flags.start, "first grid value");
  sweep_cmd->add_option("--stop", sweep_flags.stop, "last grid value");
  sweep_cmd->add_option("--count", sweep_flags.count, "number of grid values");
  sweep_cmd->add_option("--spacing", sweep_flags.spacing, "linear | log")
      ->check(CLI::IsMember({"linear", "log"}));
  sweep_cmd->add_option("--solve-for", sweep_flags.solve_for, "epsilon | delta")
      ->check(CLI::IsMember({"epsilon", "delta"}));
  sweep_cmd->add_option("--delta", sweep_flags.delta, "fixed delta");
  sweep_cmd->add_option("--epsilon", sweep_flags.epsilon, "fixed epsilon");
  sweep_cmd->add_option("--out", sweep_flags.out, "output CSV (default stdout)");
  sweep_cmd->add_option("--threads", sweep_flags.threads, "worker count");

  McFlags mc_flags;
  CLI::App* mc_cmd = app.add_subcommand("mc", "Monte-Carlo profile estimate");
  mc_cmd->add_option("--sigma", mc_flags.sigma, "noise multiplier")->required();
  mc_cmd->add_option("--t", mc_flags.t, "number of steps")->required();
  mc_cmd->add_option("--epsilon", mc_flags.epsilon, "threshold")->required();
  mc_cmd->add_option("--direction", mc_flags.direction, "remove | add | both")
      ->check(CLI::IsMember({"remove", "add", "both"}));
  mc_cmd->add_option("--n", mc_flags.n, "number of samples");
  mc_cmd->add_option("--seed", mc_flags.seed, "random seed");
  mc_cmd->add_option("--confidence", mc_flags.confidence, "CI confidence");
  mc_cmd->add_option("--threads", mc_flags.threads, "worker count");

  UtilityFlags util_flags;
  CLI::App* util_cmd = app.add_subcommand("utility", "mean-estimation MSE (CSV)");
  util_cmd->add_option("--p", util_flags.p, "Bernoulli mean");
  util_cmd->add_option("--t", util_flags.t, "number of steps");
  util_cmd->add_option("--sigma", util_flags.sigma, "noise multiplier");
  util_cmd->add_option("--n-values", util_flags.n_values, "sample sizes")
      ->delimiter(',');
  util_cmd->add_option("--schemes", util_flags.schemes, "allocation,poisson")
      ->delimiter(',');
  util_cmd->add_option("--trials", util_flags.trials, "trials per point");
  util_cmd->add_option("--seed", util_flags.seed, "random seed");
  util_cmd->add_option("--dim", util_flags.dim, "dimension");
  util_cmd->add_option("--calibrate-epsilon", util_flags.calibrate_epsilon,
                       "calibrate sigma per scheme to this epsilon");
  util_cmd->add_option("--calibrate-delta", util_flags.calibrate_delta,
                       "delta used for calibration");
  util_cmd->add_option("--out", util_flags.out, "output CSV (default stdout)");
  util_cmd->add_option("--threads", util_flags.threads, "worker count");

  for (CLI::App* sub : {eps_cmd, delta_cmd, sweep_cmd, mc_cmd, util_cmd}) {
    sub->add_option("--config", config_path, "key=value file of flags");
  }

  std::vector<std::string> tokens(args.begin() + std::min<size_t>(1, args.size()),
                                  args.end());
  if (std::optional<std::string> path = FindConfigPath(args)) {
    absl::StatusOr<std::vector<std::string>> extra = ConfigTokens(*path);
    if (!extra.ok()) {
      err << "error: " << extra.status().message() << "\n";
      return extra.status().code() == absl::StatusCode::kNotFound ? kExitIo
                                                                  : kExitUsage;
    }
    auto sub = std::find_if(tokens.begin(), tokens.end(), [](const std::string& s) {
      return s == "epsilon" || s == "delta" || s == "sweep" || s == "mc" ||
             s == "utility";
    });
    if (sub != tokens.end()) tokens.insert(sub + 1, extra->begin(), extra->end());
  }
  std::reverse(tokens.begin(), tokens.end());
  try {
    app.parse(tokens);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitUsage;
  }

  std::optional<Failure> failure;
  if (eps_cmd->parsed()) {
    failure = RunQuery(true, eps_flags, out);
  } else if (delta_cmd->parsed()) {
    failure = RunQuery(false, delta_flags, out);
  } else if (sweep_cmd->parsed()) {
    failure = RunSweep(sweep_flags, out, err);
  } else if (mc_cmd->parsed()) {
    failure = RunMc(mc_flags, out);
  } else if (util_cmd->parsed()) {
    failure = RunUtility(util_flags, out, err);
  }
  if (failure.has_value()) {
    err << "error: " << failure->message << "\n";
    return failure->code;
  }
  return kExitOk;
}

}  // namespace allocdp
