// Lotka-Volterra with a few schemes: RMSE against the RK45 reference and
// the largest imaginary part seen along the way.

#include <cstdio>

#include "cwsplit/bench.hpp"

int main() {
  using namespace cwsplit;
  const SystemSpec sys = make_system("lotka-volterra");
  const Experiment exp = default_experiment("lotka-volterra");
  const long long n = 1000;
  const Trajectory ref = reference_solution(sys, exp.horizon, n, exp.initial_state);

  std::printf("%-12s %8s %14s %14s\n", "scheme", "factors", "rmse", "max_imag");
  for (const char* name : {"lie-trotter", "strang", "3rd", "4th", "6th", "8th"}) {
    const Scheme s = named_scheme(name, sys.dim);
    const Trajectory run = integrate(sys, s, exp.horizon, n, exp.initial_state);
    std::printf("%-12s %8zu %14.3e %14.3e\n", name, s.size(), rmse(run, ref), run.max_imag);
  }
}
