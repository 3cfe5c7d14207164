// Regenerates the bundled synthetic ranking fixtures. Usage:
//   make_fixture [out_dir]   (default: data)

#include <filesystem>
#include <iostream>
#include <string>

#include <sortnet/data.hpp>
#include <sortnet/synthetic.hpp>

int main(int argc, char** argv) {
  const std::string out_dir = argc > 1 ? argv[1] : "data";
  std::filesystem::create_directories(out_dir);
  using sortnet::SyntheticConfig;

  struct Job {
    const char* name;
    SyntheticConfig cfg;
  };
  const Job jobs[] = {
      {"synth_train.letor", {3, 200, 5, 0.10, 11}},
      {"synth_valid.letor", {3, 200, 5, 0.10, 22}},
      {"synth_test.letor", {3, 200, 5, 0.10, 33}},
      {"synth_small.letor", {3, 30, 5, 0.10, 44}},
  };
  for (const Job& job : jobs) {
    const std::string path = out_dir + "/" + job.name;
    sortnet::serialize_letor_file(path, sortnet::make_synthetic_groups(job.cfg));
    std::cout << "wrote " << path << '\n';
  }
  return 0;
}
