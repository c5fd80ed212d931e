#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "driftplan/track/track.hpp"

namespace tr = driftplan::track;

int main(int argc, char** argv) {
  CLI::App app{"Write the synthetic track files"};
  std::string dir = "tracks";
  app.add_option("dir", dir, "output directory");
  CLI11_PARSE(app, argc, argv);

  const std::filesystem::path out(dir);
  std::filesystem::create_directories(out);
  tr::save_track_csv(tr::mixed_circuit_waypoints(), 10.0, true, out / "circuit.csv");
  tr::save_track_csv(tr::uturn_waypoints(15.0, 20.0, 60.0), 10.0, false, out / "uturn.csv");
  tr::save_track_csv(tr::straight_waypoints(300.0), 10.0, false, out / "straight.csv");
  tr::save_track_csv(tr::s_curve_waypoints(20.0), 10.0, false, out / "s_curve.csv");
  std::cout << "tracks written to " << out.string() << '\n';
  return 0;
}
