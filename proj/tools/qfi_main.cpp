#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "qfis/job.hpp"

namespace {

struct Options {
  std::string config_path;
  std::string out_path;
  std::string format = "json";
};

qfis::JobConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qfis::config_error("cannot open config file: " + path);
  qfis::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw qfis::config_error(std::string("config is not valid JSON: ") + e.what());
  }
  return qfis::parse_config(j);
}

void emit(const Options& opt, const std::string& text) {
  if (opt.out_path.empty() || opt.out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(opt.out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + opt.out_path);
  out << text;
}

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config_path, "JSON job configuration")->required();
  cmd->add_option("--out", opt.out_path, "output path (default stdout)");
  cmd->add_option("--format", opt.format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum Fisher information of SU(2) unitary processes"};
  app.require_subcommand(1);
  Options opt;

  CLI::App* compute = app.add_subcommand("compute", "QFI matrix at a single point");
  CLI::App* sweep = app.add_subcommand("sweep", "parameter or time sweep");
  CLI::App* reparam = app.add_subcommand("reparam", "transfer-matrix reparametrization");
  CLI::App* oracle = app.add_subcommand("oracle-check", "cross-validate computation routes");
  for (CLI::App* c : {compute, sweep, reparam, oracle}) add_common(c, opt);

  CLI11_PARSE(app, argc, argv);

  try {
    qfis::JobConfig cfg = load_config(opt.config_path);
    if (app.got_subcommand(compute)) {
      emit(opt, qfis::run_compute(cfg).dump(2) + "\n");
    } else if (app.got_subcommand(sweep)) {
      qfis::SweepTable table = qfis::run_sweep(cfg);
      if (opt.format == "csv")
        emit(opt, qfis::sweep_to_csv(table));
      else
        emit(opt, qfis::sweep_to_json(table).dump(2) + "\n");
    } else if (app.got_subcommand(reparam)) {
      emit(opt, qfis::run_reparam(cfg).dump(2) + "\n");
    } else {
      qfis::OracleCheckResult res = qfis::run_oracle_check(cfg);
      emit(opt, qfis::oracle_check_to_json(res).dump(2) + "\n");
      if (!res.all_pass) {
        std::cerr << "oracle-check: at least one route pair exceeds its tolerance\n";
        return 4;
      }
    }
  } catch (const qfis::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const qfis::precondition_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const qfis::branch_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
