#include "fracsys/csv.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "fracsys/errors.hpp"

namespace fracsys {
namespace {

double parse_field(const std::string& line, std::size_t& pos, std::size_t lineno) {
  const std::size_t end = std::min(line.find(',', pos), line.size());
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + end, v);
  if (ec != std::errc() || ptr != line.data() + end) {
    throw DomainError("csv line " + std::to_string(lineno) + ": bad number");
  }
  pos = end + 1;
  return v;
}

}  // namespace

void write_csv(std::ostream& os, const Trajectory& tr, int precision) {
  if (precision < 1 || precision > 17) throw DomainError("precision must lie in [1, 17]");
  os << "t,x,y\n";
  char buf[96];
  for (std::size_t j = 0; j < tr.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.*g,%.*g,%.*g\n", precision, tr.t[j], precision, tr.x[j],
                  precision, tr.y[j]);
    os << buf;
  }
}

Trajectory read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "t,x,y") throw DomainError("csv header must be t,x,y");
  Trajectory tr;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::size_t pos = 0;
    tr.t.push_back(parse_field(line, pos, lineno));
    tr.x.push_back(parse_field(line, pos, lineno));
    tr.y.push_back(parse_field(line, pos, lineno));
    if (pos != line.size() + 1) throw DomainError("csv line " + std::to_string(lineno) + ": extra fields");
  }
  return tr;
}

}  // namespace fracsys
