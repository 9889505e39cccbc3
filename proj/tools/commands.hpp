#pragma once

#include <cstdint>
#include <string>

namespace qaoa::cli {

// Every run_* call resolves its options, does the work, and writes the report
// to options.out (stdout when empty). Errors surface as the library exception
// types; the entry point maps them to exit codes.

struct PredictOptions {
  std::string model;  // er | sk | chung-lu | diluted-p1
  int p = 1;
  double degree = 4.0;     // er mean degree, or diluted interactions per spin
  int arity = 2;           // diluted interaction order
  std::string dist;        // chung-lu classes as "degree:prob,degree:prob"
  int restarts = 100;
  int budget = 1000;       // objective evaluations per restart
  std::uint64_t seed = 0;
  std::string out;
  std::string angles_out;  // optional standalone angle file
};
void run_predict(const PredictOptions& opt);

struct TransferOptions {
  std::string angles_file;
  double degree = 1.0;
  std::string out;
};
void run_transfer(const TransferOptions& opt);

struct McOptions {
  int n = 0;
  std::string angles_file;
  int samples = 10000;
  std::uint64_t seed = 0;
  bool force = false;
  std::string out;
  std::string samples_out;  // optional CSV of the raw draws
};
void run_mc(const McOptions& opt);

struct SimulateOptions {
  std::string model;  // er | chung-lu | sk
  int n = 0;
  double degree = 4.0;
  std::string dist;
  std::string angles_file;
  std::uint64_t seed = 0;
  int cut_draws = 0;  // graph models only
  std::string out;
};
void run_simulate(const SimulateOptions& opt);

struct ExperimentOptions {
  std::string ensemble;  // er | chung-lu
  int n = 16;
  int p = 3;
  int instances = 50;
  int restarts = 200;
  int budget = 300;
  double degree = 4.0;
  std::string dist = "4:0.6666666666666666,9:0.3333333333333333";
  std::uint64_t seed = 0;
  std::string out;
};
void run_experiment(const ExperimentOptions& opt);

struct LandscapeOptions {
  std::string model;
  int p = 1;
  double degree = 4.0;
  int arity = 2;
  std::string dist;
  std::string beta_axis = "-1.5707963267948966:1.5707963267948966:33";
  std::string gamma_axis = "-3.141592653589793:3.141592653589793:33";
  std::string out;
};
void run_landscape(const LandscapeOptions& opt);

}  // namespace qaoa::cli
