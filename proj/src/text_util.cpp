#include "text_util.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace stratlearn::detail {

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace stratlearn::detail
