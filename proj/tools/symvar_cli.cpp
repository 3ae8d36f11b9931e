// Copyright 2026 The symvar Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// symvar command-line front-end. Flags are collected into a request and
// handed to symvar::cli::run; output goes to stdout unless --outfile is set.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "symvar/cli.hpp"

namespace {

struct Flags {
  std::map<std::string, std::string> text;
  std::map<std::string, bool> toggles;
};

void text_option(CLI::App* sub, Flags& flags, const std::string& name, const std::string& key, const std::string& help) {
  sub->add_option_function<std::string>(name, [&flags, key](const std::string& v) { flags.text[key] = v; }, help);
}

void toggle_option(CLI::App* sub, Flags& flags, const std::string& name, const std::string& key, const std::string& help) {
  sub->add_flag_function(name, [&flags, key](std::int64_t) { flags.toggles[key] = true; }, help);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetrizing variance bounds under classical, free and Boolean independence"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string output = "json";
  std::string outfile;
  app.add_option("--output", output, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--outfile", outfile, "write the result to this path");

  Flags flags;
  const std::string measure_help = "bernoulli:P | neg-bernoulli:P | point:X | JSON | @file.json";

  auto* convolve = app.add_subcommand("convolve", "moments of x + y under an independence kind");
  text_option(convolve, flags, "--kind", "kind", "classical | free | boolean");
  text_option(convolve, flags, "--x", "x", measure_help);
  text_option(convolve, flags, "--y", "y", measure_help);
  text_option(convolve, flags, "--order", "order", "highest moment order (<= 13)");
  text_option(convolve, flags, "--mode", "mode", "exact | float");

  auto* symmetry = app.add_subcommand("symmetry", "odd-moment residual of bernoulli(p) + y");
  text_option(symmetry, flags, "--kind", "kind", "classical | free | boolean");
  text_option(symmetry, flags, "--p", "p", "Bernoulli parameter");
  text_option(symmetry, flags, "--y", "y", measure_help + " (default neg-bernoulli:P)");
  text_option(symmetry, flags, "--order", "order", "highest moment order (<= 13)");
  text_option(symmetry, flags, "--mode", "mode", "exact | float");
  toggle_option(symmetry, flags, "--explore-critical", "explore_critical", "allow p = 1/2, tagged as conjecture data");

  auto* certify = app.add_subcommand("certify", "check the dual certificate inequality");
  text_option(certify, flags, "--p", "p", "Bernoulli parameter");
  text_option(certify, flags, "--mode", "mode", "exact | grid");
  text_option(certify, flags, "--lo", "lo", "grid lower bound");
  text_option(certify, flags, "--hi", "hi", "grid upper bound");
  text_option(certify, flags, "--step", "step", "grid step");

  auto* optimize = app.add_subcommand("optimize", "minimum variance of a symmetrizing y");
  text_option(optimize, flags, "--kind", "kind", "classical | free | boolean");
  text_option(optimize, flags, "--p", "p", "Bernoulli parameter");
  text_option(optimize, flags, "--grid", "grid", "support grid lo:hi:step (classical)");
  text_option(optimize, flags, "--include", "include", "comma-separated mandatory atoms (default -1,0)");
  text_option(optimize, flags, "--relax", "relax", "match odd moments up to 2K+1 instead of the full law");
  toggle_option(optimize, flags, "--exact", "exact", "rational simplex (classical)");
  text_option(optimize, flags, "--seed", "seed", "master seed (free/boolean)");
  text_option(optimize, flags, "--restarts", "restarts", "number of search restarts");
  text_option(optimize, flags, "--atoms", "atoms", "atom budget of the search");
  text_option(optimize, flags, "--max-odd-order", "max_odd_order", "highest odd moment penalized");
  toggle_option(optimize, flags, "--explore-critical", "explore_critical", "allow p = 1/2, tagged as conjecture data");

  auto* simulate = app.add_subcommand("simulate", "random matrix experiments");
  text_option(simulate, flags, "--experiment", "experiment", "moments | identity");
  text_option(simulate, flags, "--p", "p", "Bernoulli parameter");
  text_option(simulate, flags, "--y", "y", measure_help + " (default neg-bernoulli:P)");
  text_option(simulate, flags, "--n", "n", "matrix dimension (moments)");
  text_option(simulate, flags, "--reps", "reps", "seeds per configuration");
  text_option(simulate, flags, "--order", "order", "highest moment order (moments)");
  text_option(simulate, flags, "--sizes", "sizes", "comma-separated dimensions (identity)");
  text_option(simulate, flags, "--seed", "seed", "master seed");
  toggle_option(simulate, flags, "--explore-critical", "explore_critical", "allow p = 1/2, tagged as conjecture data");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    nlohmann::json err = {{"error", e.what()}, {"hint", "run `symvar --help` for usage"}};
    std::cout << err.dump(2) << "\n";
    return symvar::cli::kExitError;
  }

  symvar::cli::CommandRequest req;
  req.subcommand = app.get_subcommands().front()->get_name();
  for (const auto& [key, value] : flags.text) req.params[key] = value;
  for (const auto& [key, value] : flags.toggles) req.params[key] = value;
  req.output = output == "csv" ? symvar::cli::OutputFormat::Csv : symvar::cli::OutputFormat::Json;
  if (!outfile.empty()) req.outfile = outfile;

  const auto resp = symvar::cli::run(req);
  if (resp.exit_status != symvar::cli::kExitOk || !req.outfile) std::cout << resp.body;
  return resp.exit_status;
}
