#include "cli.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace testcli {

int run(const std::string& args, const std::filesystem::path& log) {
  const std::string cmd = std::string("\"") + RADARSR_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path scratch(const std::string& name) {
  const std::filesystem::path p = std::filesystem::path(RADARSR_TEST_TMP) / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::filesystem::path config_file(const std::string& name) {
  return std::filesystem::path(RADARSR_SOURCE_DIR) / "configs" / name;
}

}  // namespace testcli
