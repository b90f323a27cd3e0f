#include <iostream>
#include <memory>
#include <sstream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dimlab/error.hpp"
#include "experiment.hpp"

using dimlab::cli::Json;

namespace {

enum class Kind { kInt, kUInt, kDouble, kString, kIntList };

struct Flag {
  std::string path;
  Kind kind;
  CLI::Option* option = nullptr;
  std::string value;
};

struct Subcommand {
  CLI::App* app = nullptr;
  std::string name;
  bool needs_seed = true;
  std::vector<std::unique_ptr<Flag>> flags;

  void add(const std::string& name_, const std::string& path, Kind kind, const std::string& help) {
    auto f = std::make_unique<Flag>();
    f->path = path;
    f->kind = kind;
    f->option = app->add_option(name_, f->value, help);
    flags.push_back(std::move(f));
  }
};

Json convert(const Flag& f) {
  try {
    switch (f.kind) {
      case Kind::kInt: return std::stoll(f.value);
      case Kind::kUInt: return std::stoull(f.value);
      case Kind::kDouble: return std::stod(f.value);
      case Kind::kString: return f.value;
      case Kind::kIntList: {
        Json out = Json::array();
        std::stringstream ss(f.value);
        for (std::string item; std::getline(ss, item, ',');) out.push_back(std::stoll(item));
        return out;
      }
    }
  } catch (const std::exception&) {
  }
  throw dimlab::Error(dimlab::errc::kConfigError, "bad value '" + f.value + "' for " + f.option->get_name());
}

void set_path(Json& root, const std::string& path, Json value) {
  Json* node = &root;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (dot == std::string::npos) {
      (*node)[key] = std::move(value);
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

void point_flags(Subcommand& s) {
  s.add("--kind", "point.kind", Kind::kString, "all_zero|bernoulli|block_dilution|line|joint_copy|joint_independent|cantor");
  s.add("--dim", "point.dim", Kind::kInt, "ambient dimension");
  s.add("--p", "point.p", Kind::kDouble, "Bernoulli digit probability");
  s.add("--alpha", "point.alpha", Kind::kDouble, "block dilution lower density");
  s.add("--beta", "point.beta", Kind::kDouble, "block dilution upper density");
  s.add("--m", "point.m", Kind::kString, "line slope (rational or random)");
  s.add("--b", "point.b", Kind::kString, "line intercept (rational or random)");
  s.add("--x", "point.x", Kind::kString, "line abscissa (rational or random)");
}

void schedule_flags(Subcommand& s) {
  s.add("--r1", "schedule.r1", Kind::kInt, "first precision");
  s.add("--rho", "schedule.rho", Kind::kDouble, "geometric ratio");
  s.add("--r-max", "schedule.r_max", Kind::kInt, "largest precision");
  s.add("--mode", "schedule.mode", Kind::kString, "identity|plus_sqrt|minus_sqrt");
  s.add("--window", "schedule.window", Kind::kDouble, "tail fraction for liminf/limsup");
}

void set_flags(Subcommand& s) {
  s.add("--set", "set.kind", Kind::kString, "cantor|ifs|segment_family|unit_cube|unit_segment|singleton");
  s.add("--depth", "set.depth", Kind::kInt, "Cantor/IFS depth");
  s.add("--set-dim", "set.dim", Kind::kInt, "ambient dimension of the set");
  s.add("--directions", "set.directions", Kind::kInt, "segment family size");
  s.add("--count", "params.count", Kind::kUInt, "sample size");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dimlab: algorithmic dimension laboratory"};
  app.require_subcommand(1);
  std::string seed;
  std::string model;
  std::string out_dir;
  int threads = 0;

  std::vector<std::unique_ptr<Subcommand>> subs;
  auto sub = [&](const std::string& name, const std::string& help) -> Subcommand& {
    auto s = std::make_unique<Subcommand>();
    s->name = name;
    s->app = app.add_subcommand(name, help);
    s->app->set_help_flag("--help", "show help");
    s->app->add_option("--seed", seed, "experiment seed");
    s->app->add_option("--model", model, "cm|lz78|machine|machine:L,T");
    s->app->add_option("--out", out_dir, "output directory");
    s->app->add_option("--threads", threads, "worker cap (falls back to DIMLAB_THREADS)");
    subs.push_back(std::move(s));
    return *subs.back();
  };

  for (const char* name : {"dim", "cond-dim", "mdim", "audit"}) {
    Subcommand& s = sub(name, std::string("estimate ") + name);
    point_flags(s);
    schedule_flags(s);
  }
  {
    Subcommand& s = sub("box-dim", "box-counting dimension of a sampled set");
    set_flags(s);
    s.add("--r-lo", "params.r_lo", Kind::kInt, "smallest precision");
    s.add("--r-hi", "params.r_hi", Kind::kInt, "largest precision (0 = automatic)");
  }
  {
    Subcommand& s = sub("cover", "low-complexity cover of a sampled set");
    set_flags(s);
    s.add("--s", "params.s", Kind::kDouble, "exponent");
    s.add("--r", "params.r_values", Kind::kIntList, "precision(s), comma separated");
  }
  {
    Subcommand& s = sub("packing", "greedy packing cost of a sampled set");
    set_flags(s);
    s.add("--s", "params.s", Kind::kDouble, "exponent");
    s.add("--delta", "params.deltas", Kind::kIntList, "delta exponent(s), comma separated");
  }
  {
    Subcommand& s = sub("p2s-audit", "box dimension against sampled point dimensions");
    set_flags(s);
    schedule_flags(s);
    s.add("--r-lo", "params.r_lo", Kind::kInt, "smallest box precision");
    s.add("--r-hi", "params.r_hi", Kind::kInt, "largest box precision (0 = automatic)");
    s.add("--points", "params.dim_points", Kind::kUInt, "sampled points to estimate");
  }
  {
    Subcommand& s = sub("kakeya-reconstruct", "run the line reconstruction machine");
    s.needs_seed = false;
    s.add("--r", "params.r", Kind::kInt, "precision");
    s.add("--m", "params.m", Kind::kString, "slope");
    s.add("--b", "params.b", Kind::kString, "intercept");
    s.add("--x", "params.x", Kind::kString, "abscissa");
    s.add("--h", "params.h", Kind::kUInt, "candidate rank");
    s.add("--oracle", "params.oracle", Kind::kString, "exact|reject|subgrid:<stride>");
  }
  {
    Subcommand& s = sub("kakeya-stats", "distribution of the minimal candidate rank");
    s.add("--r", "params.r", Kind::kInt, "precision");
    s.add("--trials", "params.trials", Kind::kUInt, "number of x samples");
    s.add("--m", "params.m", Kind::kString, "slope");
    s.add("--b", "params.b", Kind::kString, "intercept");
  }
  {
    Subcommand& s = sub("kakeya-audit", "finite-r lower-bound audit for a line point");
    schedule_flags(s);
    s.add("--m", "params.m", Kind::kString, "slope (rational or random)");
    s.add("--b", "params.b", Kind::kString, "intercept (rational or random)");
    s.add("--x", "params.x", Kind::kString, "random, m, or a rational");
  }
  {
    Subcommand& s = sub("machine-k", "exact toy-machine complexity K_M(w|v)");
    s.needs_seed = false;
    s.add("--w", "params.w", Kind::kString, "target bits");
    s.add("--v", "params.v", Kind::kString, "conditioning bits");
    s.add("--max-len", "params.max_len", Kind::kInt, "program length budget");
    s.add("--max-steps", "params.max_steps", Kind::kUInt, "step budget");
  }
  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("--config", config_path, "config JSON")->required();
  run->add_option("--threads", threads, "worker cap (falls back to DIMLAB_THREADS)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dimlab::cli::kExitUsage;
  }

  try {
    Json config;
    if (run->parsed()) {
      config = dimlab::cli::load_config_file(config_path);
      if (threads > 0 && config.is_object()) config["threads"] = threads;
    } else {
      for (const auto& s : subs) {
        if (!s->app->parsed()) continue;
        config["command"] = s->name;
        if (!seed.empty()) {
          try {
            config["seed"] = std::stoull(seed);
          } catch (const std::exception&) {
            throw dimlab::Error(dimlab::errc::kConfigError, "--seed must be a non-negative integer");
          }
        } else if (!s->needs_seed) {
          config["seed"] = std::uint64_t{0};
        } else {
          throw dimlab::Error(dimlab::errc::kConfigError, "--seed is required");
        }
        if (!model.empty()) config["model"] = model;
        if (!out_dir.empty()) config["output_dir"] = out_dir;
        config["threads"] = threads;
        for (const auto& f : s->flags) {
          if (f->option->count() > 0) set_path(config, f->path, convert(*f));
        }
      }
    }
    const dimlab::cli::Outcome out = dimlab::cli::run_experiment(config);
    for (const std::string& line : out.lines) std::cout << line << "\n";
    std::cout << "report: " << out.files.back().string() << "\n";
    return out.pass ? dimlab::cli::kExitPass : dimlab::cli::kExitAuditFailure;
  } catch (const dimlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dimlab::cli::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dimlab::cli::kExitUsage;
  }
}
