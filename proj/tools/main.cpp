// Copyright 2026 The mtk Authors.
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

#include <string>

#include <CLI11.hpp>

#include "mtk/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"mtk: SDF fitting, differentiable mesh extraction, prompt-embedding "
               "inversion, and evaluation rendering"};
  app.require_subcommand(1);

  struct SubCommand {
    const char* name;
    const char* help;
  };
  const SubCommand subcommands[] = {
      {"fit-shape", "fit the neural SDF to an analytic target and export the mesh"},
      {"invert", "optimize pseudo-token embeddings against a scoring oracle"},
      {"render", "rasterize mask/depth/normal (and RGB) views of an OBJ mesh"},
      {"eval", "compute mesh, chamfer, and PSNR metrics"},
      {"extract-mesh", "extract an OBJ from a saved SDF checkpoint"},
  };

  std::string config;
  mtk::cli::Overrides overrides;
  int exit_code = 0;
  for (const SubCommand& sc : subcommands) {
    CLI::App* sub = app.add_subcommand(sc.name, sc.help);
    sub->add_option("--config,-c", config, "JSON run config")->required();
    sub->add_option("--seed", overrides.seed, "override the config seed");
    sub->add_option("--out", overrides.out, "override the output directory");
    sub->add_option("--iters", overrides.iters,
                    "override iteration / generation counts");
    const std::string name = sc.name;
    sub->callback(
        [&, name] { exit_code = mtk::cli::run_command(name, config, overrides); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help exits clean, bad usage is a config error
  }
  return exit_code;
}
