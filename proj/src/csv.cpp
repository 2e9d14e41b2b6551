#include <charconv>

#include "matcon/report.hpp"

namespace matcon {

std::string format_number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

void write_csv(std::ostream& out, const Trajectory<double>& traj) {
  const Index d = traj.dims.d;
  out << "t,node";
  for (Index c = 1; c <= d; ++c) out << ",dim_" << c;
  out << ",V\n";
  for (std::size_t s = 0; s < traj.times.size(); ++s) {
    const std::string t = format_number(traj.times[s]);
    const std::string v = format_number(traj.disagreement[s]);
    for (Index i = 0; i < traj.dims.n; ++i) {
      out << t << ',' << (i + 1);
      for (Index c = 0; c < d; ++c) out << ',' << format_number(traj.states[s](i * d + c));
      out << ',' << v << '\n';
    }
  }
}

}  // namespace matcon
