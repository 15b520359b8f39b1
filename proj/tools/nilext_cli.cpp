#include <CLI11.hpp>
#include <iostream>
#include <sstream>

#include "nilext/cli.hpp"

using namespace nilext;
using nilext::cli::json;

namespace {

std::vector<Int> parse_list(const std::string& s) {
  std::vector<Int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoll(item));
    } catch (const std::logic_error&) {
      throw io::ParseError("bad integer list \"" + s + "\"");
    }
  }
  return out;
}

int emit(const cli::RunReport& r, const std::string& json_out) {
  std::cout << r.doc.dump(2) << "\n";
  if (!json_out.empty()) io::write_file(json_out, r.doc);
  if (r.exit_code != cli::kOk) std::cerr << "nilext-cli: " << r.doc.value("error", "failed") << "\n";
  return r.exit_code;
}

// Loads inputs before the command runs; failures still produce a report.
int with_inputs(const std::string& command, const cli::RunOptions& opt, const std::string& json_out,
                const std::function<json()>& load, const std::function<cli::RunReport(const json&)>& run) {
  json inputs;
  try {
    inputs = load();
  } catch (const Error&) {
    return emit(cli::run_command(command, json::object(), opt, []() -> json { throw; }), json_out);
  } catch (const json::exception&) {
    return emit(cli::run_command(command, json::object(), opt, []() -> json { throw; }), json_out);
  }
  return emit(run(inputs), json_out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nilext: exact ladders, polynomial orbits and nilsequence extension"};
  app.require_subcommand(1);
  app.fallthrough();
  cli::RunOptions opt;
  std::string json_out;
  app.add_option("--seed", opt.seed, "64-bit seed for every random choice");
  app.add_option("--budget", opt.budget, "maximum enumeration size")->check(CLI::PositiveNumber);
  app.add_option("--json-out", json_out, "also write the report to this path");
  app.add_option("--tolerance", opt.tolerance, "tolerance for norm cross-checks")->check(CLI::PositiveNumber);
  app.add_flag("--timing", opt.timing, "include wall-clock timing in the report");

  // nonext
  Int p = 2;
  int k = 2;
  auto* nonext = app.add_subcommand("nonext", "the non-extendable quadratic phase on Z_{p^2} x Z_p");
  nonext->add_option("--p", p, "prime, at most 13");
  nonext->add_option("--k", k, "degree bound of the attempted extension");

  // gowers
  std::string function_file, poly_file, group_spec;
  int d = 2;
  bool random_f = false;
  auto* gowers = app.add_subcommand("gowers", "U^d norm by every method, cross-checked");
  gowers->add_option("--function", function_file, "function JSON ([re, im] pairs)");
  gowers->add_option("--poly", poly_file, "phase polynomial JSON; needs --group");
  gowers->add_flag("--random", random_f, "seeded random function; needs --group");
  gowers->add_option("--group", group_spec, "factors, e.g. 16 or 4,6");
  gowers->add_option("--d", d, "norm degree");

  // pipeline
  std::string config_file;
  Int pipeline_p = 2;
  double noise = 0;
  bool emit_nil = false;
  auto* pipeline = app.add_subcommand("pipeline", "subgroup nilsequence -> f -> extension -> assembly");
  pipeline->add_option("--config", config_file, "pipeline configuration JSON");
  pipeline->add_option("--nonext", pipeline_p, "use the non-extendable example at this prime (default 2)");
  pipeline->add_option("--noise", noise, "noise amplitude for the built-in configuration");
  pipeline->add_flag("--emit-nilsequence", emit_nil, "include the assembled nilsequence");

  // linearize / extend / assemble / verify
  std::string nil_file, emb_file, ref_file, t0_spec;
  double eps0 = -1;
  auto* lin = app.add_subcommand("linearize", "polynomial orbit -> linear orbit");
  lin->add_option("--nilsequence", nil_file, "nilsequence JSON in polynomial form");
  lin->add_option("--poly", poly_file, "torus-valued polymap JSON; needs --group");
  lin->add_option("--group", group_spec, "factors of the domain");
  auto* ext = app.add_subcommand("extend", "extend a nilsequence along the ladder of an embedding");
  ext->add_option("--nilsequence", nil_file, "nilsequence on Z_0")->required();
  ext->add_option("--embedding", emb_file, "embedding Z_0 -> Z")->required();
  auto* asm_ = app.add_subcommand("assemble", "extend, shift and twist to correlate with f on Z");
  asm_->add_option("--function", function_file, "f on Z")->required();
  asm_->add_option("--embedding", emb_file, "embedding Z_0 -> Z")->required();
  asm_->add_option("--nilsequence", nil_file, "N0 on Z_0")->required();
  asm_->add_option("--t0", t0_spec, "shift t_0, e.g. 1,0");
  asm_->add_option("--eps0", eps0, "claimed subgroup correlation (default: measured)");
  auto* ver = app.add_subcommand("verify", "check a nilsequence and its agreement with a reference");
  ver->add_option("--nilsequence", nil_file, "nilsequence to check")->required();
  ver->add_option("--reference", ref_file, "nilsequence on Z_0 it must extend");
  ver->add_option("--embedding", emb_file, "embedding Z_0 -> Z");

  CLI11_PARSE(app, argc, argv);

  try {
    if (nonext->parsed()) return emit(cli::cmd_nonext(p, k, opt), json_out);

    if (gowers->parsed()) {
      GroupFunction f;
      json inputs;
      auto load = [&]() -> json {
        if (!function_file.empty()) {
          inputs = {{"function", io::read_file(function_file)}};
          f = io::parse_function(inputs["function"]);
        } else {
          require(!group_spec.empty(), "--poly and --random need --group");
          FinAbGroup g(parse_list(group_spec));
          if (!poly_file.empty()) {
            inputs = {{"poly", io::read_file(poly_file)}, {"group", io::to_json(g)}};
            f = phase_function(io::parse_polymap(inputs["poly"]), g);
          } else {
            require(random_f, "give --function, --poly or --random");
            inputs = {{"random", true}, {"group", io::to_json(g)}};
            f = cli::detail::random_function(g, opt.seed);
          }
        }
        return inputs;
      };
      return with_inputs("gowers", opt, json_out, load,
                         [&](const json& in) { return cli::cmd_gowers(in, f, d, opt); });
    }

    if (pipeline->parsed()) {
      auto load = [&]() -> json {
        if (!config_file.empty()) return io::read_file(config_file);
        require(is_prime(pipeline_p) && pipeline_p <= 13, "--nonext needs a prime at most 13");
        return cli::nonext_pipeline_config(pipeline_p, noise);
      };
      return with_inputs("pipeline", opt, json_out, load,
                         [&](const json& in) { return cli::cmd_pipeline(in, opt, emit_nil); });
    }

    if (lin->parsed()) {
      auto load = [&]() -> json {
        if (!nil_file.empty()) return {{"nilsequence", io::read_file(nil_file)}};
        require(!poly_file.empty() && !group_spec.empty(), "give --nilsequence, or --poly with --group");
        FinAbGroup g(parse_list(group_spec));
        return {{"nilsequence", io::to_json(make_nilsequence(g, io::parse_polymap(io::read_file(poly_file))))}};
      };
      return with_inputs("linearize", opt, json_out, load,
                         [&](const json& in) { return cli::cmd_linearize(in, opt); });
    }

    if (ext->parsed()) {
      auto load = [&]() -> json {
        return {{"nilsequence", io::read_file(nil_file)}, {"embedding", io::read_file(emb_file)}};
      };
      return with_inputs("extend", opt, json_out, load, [&](const json& in) { return cli::cmd_extend(in, opt); });
    }

    if (asm_->parsed()) {
      auto load = [&]() -> json {
        json in = {{"function", io::read_file(function_file)},
                   {"embedding", io::read_file(emb_file)},
                   {"nilsequence", io::read_file(nil_file)}};
        if (!t0_spec.empty()) in["t0"] = parse_list(t0_spec);
        if (eps0 >= 0) in["eps0"] = eps0;
        return in;
      };
      return with_inputs("assemble", opt, json_out, load,
                         [&](const json& in) { return cli::cmd_assemble(in, opt); });
    }

    if (ver->parsed()) {
      auto load = [&]() -> json {
        json in = {{"nilsequence", io::read_file(nil_file)}};
        if (!ref_file.empty()) in["reference"] = io::read_file(ref_file);
        if (!emb_file.empty()) in["embedding"] = io::read_file(emb_file);
        return in;
      };
      return with_inputs("verify", opt, json_out, load, [&](const json& in) { return cli::cmd_verify(in, opt); });
    }
  } catch (const Error& e) {
    std::cerr << "nilext-cli: " << e.what() << "\n";
    return cli::kPrecondition;
  }
  return cli::kPrecondition;
}
