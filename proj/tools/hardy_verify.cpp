#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "hardy/errors.hpp"
#include "hardy/experiment.hpp"

namespace {

int usage() {
  std::cerr << "usage:\n"
            << "  hardy-verify run <config.json>   run one experiment from a JSON config\n"
            << "  hardy-verify list                list the available experiments\n"
            << "exit codes: 0 all checks passed, 1 completed with failed checks,\n"
            << "            2 rejected input, 3 numerical failure\n";
  return 2;
}

int run(const std::string& config_path) {
  const auto cfg = hardy::load_config(config_path);
  const auto result = hardy::run_experiment(cfg);

  const std::filesystem::path base(cfg.output_path);
  if (base.has_parent_path()) std::filesystem::create_directories(base.parent_path());
  const auto csv_path = cfg.output_path + ".csv";
  const auto json_path = cfg.output_path + ".json";
  {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw hardy::invalid_input("cannot write " + csv_path);
    csv << hardy::render_csv(result.rows);
  }
  {
    std::ofstream js(json_path, std::ios::binary);
    if (!js) throw hardy::invalid_input("cannot write " + json_path);
    js << result.report.dump(2) << '\n';
  }

  int passed = 0;
  for (const auto& r : result.rows) passed += r.pass ? 1 : 0;
  std::cout << hardy::experiment_kind_name(cfg.experiment) << ": " << passed << "/"
            << result.rows.size() << " checks passed\n"
            << "wrote " << csv_path << " and " << json_path << "\n";
  return result.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) return usage();
  const std::string cmd = argv[1];
  try {
    if (cmd == "list") {
      std::cout << hardy::list_experiments();
      return 0;
    }
    if (cmd == "run") {
      if (argc != 3) return usage();
      return run(argv[2]);
    }
    return usage();
  } catch (const hardy::invalid_input& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const hardy::numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
